//! Peripheral toolkit for almost toral mapping tori: the Klein bottle group,
//! Minkowski checks, mapping tori, and typing of candidate peripheral
//! subgroups.

pub mod klein;
pub mod minkowski;
pub mod torus;

pub use klein::{klein_conjugate, klein_mixed_whitehead, klein_out_group, KleinAuto, KleinElement, OutKleinClass};
pub use minkowski::{minkowski_check_klein, minkowski_check_z2};
pub use torus::{build_mapping_torus, check_standard_iso, MappingTorus, TorusElement};

use serde::{Deserialize, Serialize};

use crate::automorphism::{words_of_length, Automorphism};
use crate::error::{CoreError, Result};
use crate::folding::{subgroups_conjugate, FoldedGraph};
use crate::word::{conjugate_in_free, CyclicWord, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeripheralType {
    /// `Z × Z`: the fiber class is carried to a conjugate of itself.
    Torus,
    /// `Z ⋊ Z`: the fiber class is carried to a conjugate of its inverse.
    Klein,
    /// A polynomially growing subgroup of rank at least two.
    HigherRank(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralProfile {
    pub entries: Vec<PeripheralType>,
    pub almost_toral: bool,
    /// No candidates and exponential growth.
    pub hyperbolic: bool,
    /// Whether the candidate list is known to be complete.
    pub complete: bool,
}

impl PeripheralProfile {
    pub fn counts(&self) -> (usize, usize, usize) {
        let c = |p: &dyn Fn(&PeripheralType) -> bool| self.entries.iter().filter(|e| p(e)).count();
        (
            c(&|e| *e == PeripheralType::Torus),
            c(&|e| *e == PeripheralType::Klein),
            c(&|e| matches!(e, PeripheralType::HigherRank(_))),
        )
    }
}

/// Types each candidate after checking it is invariant up to conjugacy.
pub fn classify_peripherals(phi: &Automorphism, candidates: &[Vec<Word>], exponential: bool, complete: bool) -> Result<PeripheralProfile> {
    let rank = phi.rank();
    let mut entries = Vec::new();
    for gens in candidates {
        let images: Vec<Word> = gens.iter().map(|g| phi.apply(g)).collect();
        if !subgroups_conjugate(gens, &images, rank) {
            return Err(CoreError::Unsupported("candidate subgroup is not invariant".into()));
        }
        let r = FoldedGraph::from_generators(gens, rank).subgroup_rank();
        entries.push(match r {
            1 => {
                let g = &gens[0];
                if conjugate_in_free(&phi.apply(g), g).is_some() {
                    PeripheralType::Torus
                } else {
                    PeripheralType::Klein
                }
            }
            r => PeripheralType::HigherRank(r),
        });
    }
    entries.sort();
    let almost_toral = entries.iter().all(|e| !matches!(e, PeripheralType::HigherRank(_)));
    Ok(PeripheralProfile { hyperbolic: entries.is_empty() && exponential, entries, almost_toral, complete })
}

/// Root conjugacy classes up to length `max_len` sent by `φ^period` to
/// themselves or their inverses, one per cyclic subgroup up to conjugacy.
pub fn periodic_classes(phi: &Automorphism, max_len: usize, period: i64) -> Vec<Word> {
    let psi = phi.pow(period);
    let mut found: Vec<CyclicWord> = Vec::new();
    let mut out = Vec::new();
    for len in 1..=max_len {
        for w in words_of_length(phi.rank(), len) {
            if !w.is_cyclically_reduced() || w.root().1 != 1 {
                continue;
            }
            let c = CyclicWord::new(&w);
            if found.contains(&c) || found.contains(&c.inverse()) {
                continue;
            }
            let img = CyclicWord::new(&psi.apply(&w));
            if img == c || img == c.inverse() {
                found.push(c);
                out.push(w);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn punctured_torus() -> Automorphism {
        Automorphism::from_ints(&[&[1, 2], &[3, 1, 2, 2, 1, 2], &[3]])
    }

    #[test]
    fn punctures_are_torus_peripherals() {
        let phi = punctured_torus();
        let classes = periodic_classes(&phi, 5, 1);
        assert_eq!(classes.len(), 2, "{classes:?}");
        let cands: Vec<Vec<Word>> = classes.into_iter().map(|w| vec![w]).collect();
        let p = classify_peripherals(&phi, &cands, true, false).unwrap();
        assert_eq!(p.entries, vec![PeripheralType::Torus, PeripheralType::Torus]);
        assert!(p.almost_toral);
        assert!(!p.hyperbolic);
    }

    #[test]
    fn inverted_class_is_klein() {
        // c ↦ C
        let phi = Automorphism::from_ints(&[&[1, 2], &[1], &[-3]]);
        let p = classify_peripherals(&phi, &[vec![Word::gen(2)]], true, false).unwrap();
        assert_eq!(p.entries, vec![PeripheralType::Klein]);
    }

    #[test]
    fn rank_two_candidate() {
        let phi = Automorphism::from_ints(&[&[1], &[2, 1], &[3, 1, 2]]);
        let p = classify_peripherals(&phi, &[vec![Word::gen(0), Word::gen(1)]], false, false).unwrap();
        assert_eq!(p.entries, vec![PeripheralType::HigherRank(2)]);
        assert!(!p.almost_toral);
    }

    #[test]
    fn empty_list_is_hyperbolic() {
        let p = classify_peripherals(&Automorphism::from_ints(&[&[2], &[3], &[1, 2]]), &[], true, false).unwrap();
        assert!(p.hyperbolic && p.almost_toral);
    }

    #[test]
    fn non_invariant_candidate_rejected() {
        let phi = Automorphism::from_ints(&[&[1, 2], &[1], &[3]]);
        assert!(classify_peripherals(&phi, &[vec![Word::gen(0)]], true, false).is_err());
    }
}
