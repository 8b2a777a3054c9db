//! Conjugacy invariants of an outer class in `Out(F_3)`, each tagged with
//! the module that computed it.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Budgets;
use crate::automorphism::{words_of_length, Automorphism};
use crate::error::{CoreError, Result};
use crate::folding::{subgroups_conjugate, FoldedGraph};
use crate::peripheral::{classify_peripherals, periodic_classes, PeripheralProfile};
use crate::traintrack::growth::{classify_growth, rose_candidates, unipotent_power, GrowthSource};
use crate::traintrack::lamination::lamination_support;
use crate::traintrack::upg::invariant_rank2_factor;
use crate::traintrack::{validate_rtt, GraphMap, GrowthType};
use crate::word::{CyclicWord, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Module {
    FgCore,
    Traintrack,
    Peripheral,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field<T> {
    pub value: T,
    pub source: Module,
    /// Exact when true; unverified fields only steer routing.
    pub verified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Growth {
    pub growth: GrowthType,
    pub degree: Option<u32>,
    pub method: GrowthSource,
}

impl fmt::Display for Growth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.growth, self.degree) {
            (GrowthType::Exponential, _) => write!(f, "exponential"),
            (GrowthType::Polynomial, Some(d)) => write!(f, "polynomial of degree {d}"),
            (GrowthType::Polynomial, None) => write!(f, "polynomial"),
        }
    }
}

/// Free factor carrying the attracting lamination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Carrier {
    pub rank: usize,
    pub factor: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Reducibility {
    /// A proper free factor invariant up to conjugacy, and a basis of `F_3`
    /// whose first two elements generate it.
    Reducible { factor: Vec<Word>, basis: Automorphism },
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Peripherals {
    pub profile: PeripheralProfile,
    pub classes: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantProfile {
    pub charpoly: Field<Vec<i64>>,
    pub growth: Field<Growth>,
    pub carrier: Option<Field<Carrier>>,
    pub peripheral: Option<Field<Peripherals>>,
    pub reducibility: Field<Reducibility>,
}

/// The parts of a profile that do not depend on the chosen representative.
/// Peripheral counts enter only when the candidate list is complete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileKey {
    pub charpoly: Vec<i64>,
    pub growth: (GrowthType, Option<u32>, bool),
    pub carrier_rank: Option<(usize, bool)>,
    pub peripheral_counts: Option<(usize, usize, usize)>,
    pub reducible: bool,
}

impl InvariantProfile {
    pub fn key(&self) -> ProfileKey {
        ProfileKey {
            charpoly: self.charpoly.value.clone(),
            growth: (self.growth.value.growth, self.growth.value.degree, self.growth.verified),
            carrier_rank: self.carrier.as_ref().map(|c| (c.value.rank, c.verified)),
            peripheral_counts: self.peripheral.as_ref().filter(|p| p.value.profile.complete).map(|p| p.value.profile.counts()),
            reducible: matches!(self.reducibility.value, Reducibility::Reducible { .. }),
        }
    }

    pub fn carrier_rank(&self) -> Option<usize> {
        self.carrier.as_ref().map(|c| c.value.rank)
    }
}

/// Completes a basis of a rank-2 free factor to a basis of `F_3`.
pub fn complete_basis(factor: &[Word], max_len: usize) -> Option<Automorphism> {
    if factor.len() != 2 {
        return None;
    }
    for len in 1..=max_len {
        for z in words_of_length(3, len) {
            let gens = vec![factor[0].clone(), factor[1].clone(), z];
            if FoldedGraph::from_generators(&gens, 3).is_whole_group() {
                return Automorphism::new(gens).ok();
            }
        }
    }
    None
}

/// Support of the attracting lamination, from the first validated rose
/// train track among the descent candidates.
fn carrier(phi: &Automorphism, power: Option<u32>, budgets: &Budgets) -> Option<Field<Carrier>> {
    let psi = phi.pow(power.unwrap_or(1) as i64);
    let mut tried = 0;
    for (chi, a) in rose_candidates(&psi, budgets.rose_candidates) {
        let map = GraphMap::rose(&a);
        let Ok(rtt) = validate_rtt(&map) else { continue };
        if !rtt.valid || rtt.strata.eg_strata().is_empty() {
            continue;
        }
        tried += 1;
        if tried > budgets.lamination_attempts {
            break;
        }
        let Ok(support) = lamination_support(&map, &budgets.lamination) else { continue };
        let system = support.system.transport(&chi.inverse());
        let factors = system.factors();
        if factors.len() != 1 {
            continue;
        }
        let factor = factors[0].clone();
        let rank = factor.len();
        let images: Vec<Word> = factor.iter().map(|w| phi.apply(w)).collect();
        let verified = rank == 3 || subgroups_conjugate(&factor, &images, 3);
        return Some(Field { value: Carrier { rank, factor }, source: Module::Traintrack, verified });
    }
    None
}

/// Short periodic classes in each descent basis, carried back, one per
/// cyclic subgroup up to conjugacy. The list need not be complete.
fn peripherals(phi: &Automorphism, exponential: bool, budgets: &Budgets) -> Result<Field<Peripherals>> {
    let mut seen: Vec<CyclicWord> = Vec::new();
    let mut classes = Vec::new();
    for (chi, a) in rose_candidates(phi, budgets.periodic_bases) {
        let back = chi.inverse();
        for w in periodic_classes(&a, budgets.periodic_length, 1) {
            let v = back.apply(&w).cyclic_core().0;
            let c = CyclicWord::new(&v);
            if !seen.contains(&c) && !seen.contains(&c.inverse()) {
                seen.push(c);
                classes.push(v);
            }
        }
    }
    let cands: Vec<Vec<Word>> = classes.iter().map(|w| vec![w.clone()]).collect();
    let profile = classify_peripherals(phi, &cands, exponential, false)?;
    Ok(Field { value: Peripherals { profile, classes }, source: Module::Peripheral, verified: false })
}

pub fn profile(phi: &Automorphism, budgets: &Budgets) -> Result<InvariantProfile> {
    if phi.rank() != 3 {
        return Err(CoreError::RankMismatch(phi.rank(), 3));
    }
    let charpoly = Field { value: phi.matrix().char_poly(), source: Module::FgCore, verified: true };
    let g = classify_growth(phi);
    let growth = Field {
        value: Growth { growth: g.growth, degree: g.degree, method: g.source },
        source: if g.source == GrowthSource::Matrix { Module::FgCore } else { Module::Traintrack },
        verified: g.verified,
    };
    let exponential = g.growth == GrowthType::Exponential;
    let mut reducibility = Field { value: Reducibility::Unknown, source: Module::Traintrack, verified: false };
    let mut carrier_field = None;
    let mut peripheral = None;
    if exponential {
        let power = if g.source == GrowthSource::Matrix { None } else { unipotent_power(&phi.matrix()) };
        carrier_field = carrier(phi, power, budgets);
        match &carrier_field {
            Some(c) if c.value.rank == 2 && c.verified => {
                if let Some(basis) = complete_basis(&c.value.factor, budgets.complement_length) {
                    reducibility.value = Reducibility::Reducible { factor: c.value.factor.clone(), basis };
                    reducibility.verified = true;
                }
            }
            _ => peripheral = Some(peripherals(phi, true, budgets)?),
        }
    } else if g.degree == Some(2) {
        if let Ok(factor) = invariant_rank2_factor(phi, &budgets.upg) {
            if let Some(basis) = complete_basis(&factor, budgets.complement_length) {
                reducibility.value = Reducibility::Reducible { factor: factor.to_vec(), basis };
                reducibility.verified = true;
            }
        }
    }
    Ok(InvariantProfile { charpoly, growth, carrier: carrier_field, peripheral, reducibility })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::elementary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e1() -> Automorphism {
        Automorphism::from_ints(&[&[1], &[2, 1], &[3, 2]])
    }

    fn e2() -> Automorphism {
        Automorphism::from_ints(&[&[1, 2], &[3, 1, 2, 2, 1, 2], &[3]])
    }

    fn e3() -> Automorphism {
        Automorphism::from_ints(&[&[1, 2], &[1], &[3, 1]])
    }

    #[test]
    fn quadratic_example() {
        let p = profile(&e1(), &Budgets::default()).unwrap();
        assert_eq!((p.growth.value.growth, p.growth.value.degree, p.growth.verified), (GrowthType::Polynomial, Some(2), true));
        let Reducibility::Reducible { factor, basis } = &p.reducibility.value else { panic!("not reducible") };
        assert!(subgroups_conjugate(factor, &[Word::gen(0), Word::gen(1)], 3));
        assert_eq!(&basis.images()[..2], &factor[..]);
        assert!(p.carrier.is_none());
    }

    #[test]
    fn identity_has_degree_zero() {
        let p = profile(&Automorphism::identity(3), &Budgets::default()).unwrap();
        assert_eq!(p.growth.value.degree, Some(0));
        assert_eq!(p.charpoly.value, vec![-1, 3, -3, 1]);
    }

    #[test]
    fn wedge_example_has_rank_two_carrier() {
        let p = profile(&e3(), &Budgets::default()).unwrap();
        let c = p.carrier.unwrap();
        assert!(c.verified);
        assert_eq!(c.value.rank, 2);
        assert!(subgroups_conjugate(&c.value.factor, &[Word::gen(0), Word::gen(1)], 3));
        assert!(matches!(p.reducibility.value, Reducibility::Reducible { .. }));
    }

    #[test]
    fn punctured_torus_fills() {
        let p = profile(&e2(), &Budgets::default()).unwrap();
        assert_eq!(p.carrier_rank(), Some(3));
        let per = p.peripheral.unwrap();
        assert_eq!(per.value.profile.counts(), (2, 0, 0));
        assert!(!per.verified);
    }

    #[test]
    fn profiles_are_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let gens = elementary::generators(3);
        let b = Budgets::default();
        for phi in [e1(), e2(), e3(), Automorphism::identity(3), Automorphism::from_ints(&[&[1], &[2, 1], &[3]])] {
            let key = profile(&phi, &b).unwrap().key();
            for _ in 0..6 {
                let len = rng.gen_range(1..=3);
                let chi = (0..len).fold(Automorphism::identity(3), |a, _| a.then(&gens[rng.gen_range(0..gens.len())]));
                let other = profile(&phi.conjugate_by(&chi), &b).unwrap().key();
                assert_eq!(key, other, "{phi} conjugated by {chi}");
            }
        }
    }
}
