//! Triangular normal form `a ↦ a, b ↦ b a^k, c ↦ u c v` for unipotent
//! polynomially growing automorphisms of `F_3`, and the invariant rank-2
//! free factor it exhibits.

use serde::{Deserialize, Serialize};

use super::growth::{classify_growth, rose_candidates, unipotent_power};
use super::strata::GrowthType;
use crate::automorphism::Automorphism;
use crate::error::{CoreError, Result};
use crate::folding::subgroups_conjugate;
use crate::whitehead::{enumerate_whitehead, MoveKind};
use crate::word::{conjugate_in_free, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpgForm {
    /// `form = χ^-1 φ^power χ · Ad(inner)`.
    pub chi: Automorphism,
    pub inner: Word,
    pub power: u32,
    pub k: i64,
    pub u: Word,
    pub v: Word,
    pub form: Automorphism,
}

impl UpgForm {
    pub fn verify(&self, phi: &Automorphism) -> bool {
        let direct = phi.pow(self.power as i64).conjugate_by(&self.chi).then(&Automorphism::inner(&self.inner, 3));
        direct == self.form && Self::shape(&self.form) == Some((self.k, self.u.clone(), self.v.clone()))
    }

    /// `(k, u, v)` when the automorphism already has the triangular shape.
    pub fn shape(a: &Automorphism) -> Option<(i64, Word, Word)> {
        if a.rank() != 3 || *a.image(0) != Word::gen(0) {
            return None;
        }
        let b = a.image(1).letters();
        if b.first() != Some(&Letter::gen(1)) || b[1..].iter().any(|l| l.index() != 0) {
            return None;
        }
        let k = b[1..].iter().map(|l| if l.is_inverse() { -1 } else { 1 }).sum::<i64>();
        let c = a.image(2).letters();
        let hits: Vec<usize> = (0..c.len()).filter(|&i| c[i].index() == 2).collect();
        match hits.as_slice() {
            [i] if !c[*i].is_inverse() => {
                Some((k, Word::reduce(c[..*i].iter().copied()), Word::reduce(c[*i + 1..].iter().copied())))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpgBudget {
    /// Rose candidates from the descent.
    pub candidates: usize,
    /// Also try two further Whitehead moves from the descent end point.
    pub depth_two: bool,
}

impl Default for UpgBudget {
    fn default() -> Self {
        UpgBudget { candidates: 64, depth_two: true }
    }
}

/// Signed permutation and inner adjustment bringing `a` to the shape.
fn match_shape(a: &Automorphism) -> Option<(Automorphism, Word, Automorphism)> {
    for m in enumerate_whitehead(3).into_iter().take_while(|m| matches!(m.kind, MoveKind::Permutation { .. })) {
        let sigma = m.automorphism;
        let b = a.conjugate_by(&sigma);
        let Some(h) = conjugate_in_free(b.image(0), &Word::gen(0)) else { continue };
        let b = b.then(&Automorphism::inner(&h, 3));
        let w = b.image(1).letters();
        let m = w.iter().take_while(|l| l.index() == 0).count();
        let lead = Word::reduce(w[..m].iter().copied());
        let b = b.then(&Automorphism::inner(&lead, 3));
        if UpgForm::shape(&b).is_some() {
            return Some((sigma, h.mul(&lead), b));
        }
    }
    None
}

pub fn upg_normal_form(phi: &Automorphism, budget: &UpgBudget) -> Option<UpgForm> {
    if phi.rank() != 3 {
        return None;
    }
    let p = unipotent_power(&phi.matrix())?;
    let psi = phi.pow(p as i64);
    let cands = rose_candidates(&psi, budget.candidates);
    let mut tries: Vec<Automorphism> = cands.iter().map(|(chi, _)| chi.clone()).collect();
    if budget.depth_two {
        let moves = enumerate_whitehead(3);
        let end = cands.last().map(|(c, _)| c.clone()).unwrap_or_else(|| Automorphism::identity(3));
        for m1 in &moves {
            for m2 in &moves {
                tries.push(end.then(&m1.automorphism).then(&m2.automorphism));
            }
        }
    }
    for chi in tries {
        let (a, h0) = psi.conjugate_by(&chi).inner_normalize();
        if let Some((sigma, h1, form)) = match_shape(&a) {
            // a = ψ^χ Ad(h0); form = a^σ Ad(h1) = ψ^{χσ} Ad(h0 σ · h1)
            let chi = chi.then(&sigma);
            let inner = sigma.apply(&h0).mul(&h1);
            let (k, u, v) = UpgForm::shape(&form).expect("matched");
            let out = UpgForm { chi, inner, power: p, k, u, v, form };
            debug_assert!(out.verify(phi));
            return Some(out);
        }
    }
    None
}

/// `⟨a, b⟩` of the normal form, carried back to the input basis and checked
/// to be invariant up to conjugacy.
/// Quadratic growth is required: `k = 0` forces linear growth, but linear
/// maps such as `b ↦ ba, c ↦ c` also have `k ≠ 0`.
pub fn invariant_rank2_factor(phi: &Automorphism, budget: &UpgBudget) -> Result<[Word; 2]> {
    let growth = classify_growth(phi);
    if growth.growth != GrowthType::Polynomial || growth.degree != Some(2) {
        return Err(CoreError::Unsupported("growth is not quadratic".into()));
    }
    let form = upg_normal_form(phi, budget).ok_or(CoreError::NormalFormNotFound)?;
    let back = form.chi.inverse();
    let gens = [back.apply(&Word::gen(0)), back.apply(&Word::gen(1))];
    let images: Vec<Word> = gens.iter().map(|g| phi.apply(g)).collect();
    if !subgroups_conjugate(&gens, &images, 3) {
        return Err(CoreError::NormalFormNotFound);
    }
    Ok(gens)
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

    #[test]
    fn first_example_is_in_form() {
        let f = upg_normal_form(&e1(), &UpgBudget::default()).unwrap();
        assert_eq!((f.k, f.u.clone(), f.v.clone()), (1, Word::identity(), Word::gen(1)));
        assert!(f.verify(&e1()));
    }

    #[test]
    fn identity_has_k_zero() {
        let f = upg_normal_form(&Automorphism::identity(3), &UpgBudget::default()).unwrap();
        assert_eq!(f.k, 0);
    }

    #[test]
    fn factor_of_first_example() {
        let [x, y] = invariant_rank2_factor(&e1(), &UpgBudget::default()).unwrap();
        assert!(subgroups_conjugate(&[x, y], &[Word::gen(0), Word::gen(1)], 3));
    }

    #[test]
    fn linear_input_is_rejected() {
        let lin = Automorphism::from_ints(&[&[1], &[2, 1], &[3]]);
        assert_eq!(upg_normal_form(&lin, &UpgBudget::default()).unwrap().k, 1);
        assert!(invariant_rank2_factor(&lin, &UpgBudget::default()).is_err());
    }

    #[test]
    fn conjugates_recover_k_and_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let chi = elementary::random_word(3, rng.gen_range(1..=3), |n| rng.gen_range(0..n));
            let psi = e1().conjugate_by(&chi);
            let f = upg_normal_form(&psi, &UpgBudget::default()).unwrap_or_else(|| panic!("{chi:?}"));
            assert!(f.verify(&psi));
            assert_eq!(f.k.abs(), 1);
            let [x, y] = invariant_rank2_factor(&psi, &UpgBudget::default()).unwrap();
            let expected = [chi.apply(&Word::gen(0)), chi.apply(&Word::gen(1))];
            assert!(subgroups_conjugate(&[x, y], &expected, 3), "{chi:?}");
        }
    }

    #[test]
    fn budgets_agree() {
        let chi = Automorphism::from_ints(&[&[1, 3], &[2], &[3, -2]]);
        let psi = e1().conjugate_by(&chi);
        let small = invariant_rank2_factor(&psi, &UpgBudget { candidates: 8, depth_two: true }).unwrap();
        let large = invariant_rank2_factor(&psi, &UpgBudget { candidates: 128, depth_two: true }).unwrap();
        assert!(subgroups_conjugate(&small, &large, 3));
    }
}
