//! Mapping tori `F_n ⋊_φ ⟨t⟩` with `t^-1 x t = xφ`, elements in the
//! normal form `g t^k`.

use serde::{Deserialize, Serialize};

use crate::automorphism::Automorphism;
use crate::error::{CoreError, Result};
use crate::folding::FoldedGraph;
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusElement {
    pub fiber: Word,
    pub power: i64,
}

impl TorusElement {
    pub fn fiber(g: Word) -> TorusElement {
        TorusElement { fiber: g, power: 0 }
    }

    pub fn t_power(k: i64) -> TorusElement {
        TorusElement { fiber: Word::identity(), power: k }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingTorus {
    monodromy: Automorphism,
    inverse: Automorphism,
}

impl MappingTorus {
    pub fn new(phi: &Automorphism) -> MappingTorus {
        MappingTorus { monodromy: phi.clone(), inverse: phi.inverse() }
    }

    pub fn rank(&self) -> usize {
        self.monodromy.rank()
    }

    pub fn monodromy(&self) -> &Automorphism {
        &self.monodromy
    }

    fn phi_pow(&self, w: &Word, k: i64) -> Word {
        let f = if k < 0 { &self.inverse } else { &self.monodromy };
        (0..k.unsigned_abs()).fold(w.clone(), |acc, _| f.apply(&acc))
    }

    /// `(g t^k)(h t^l) = g (hφ^-k) t^(k+l)`, from `t^k h = (hφ^-k) t^k`.
    pub fn mul(&self, x: &TorusElement, y: &TorusElement) -> TorusElement {
        TorusElement { fiber: x.fiber.mul(&self.phi_pow(&y.fiber, -x.power)), power: x.power + y.power }
    }

    pub fn inverse(&self, x: &TorusElement) -> TorusElement {
        // (g t^k)^-1 = t^-k g^-1 = (g^-1 φ^k) t^-k
        TorusElement { fiber: self.phi_pow(&x.fiber.inverse(), x.power), power: -x.power }
    }

    /// `t w` in normal form.
    pub fn t_times(&self, w: &Word) -> TorusElement {
        self.mul(&TorusElement::t_power(1), &TorusElement::fiber(w.clone()))
    }

    /// Evaluates a word in the fiber generators with the given values.
    pub fn evaluate(&self, w: &Word, values: &[TorusElement]) -> TorusElement {
        let mut out = TorusElement::fiber(Word::identity());
        for l in w.letters() {
            let v = &values[l.index()];
            let v = if l.is_inverse() { self.inverse(v) } else { v.clone() };
            out = self.mul(&out, &v);
        }
        out
    }

    /// Relators `t^-1 a_i t (a_i φ)^-1`, each rewritten to normal form.
    pub fn relators_reduce(&self) -> bool {
        let t = TorusElement::t_power(1);
        let tinv = self.inverse(&t);
        (0..self.rank()).all(|i| {
            let a = TorusElement::fiber(Word::gen(i));
            let lhs = self.mul(&self.mul(&tinv, &a), &t);
            let rel = self.mul(&lhs, &self.inverse(&TorusElement::fiber(self.monodromy.image(i).clone())));
            rel == TorusElement::fiber(Word::identity())
        })
    }
}

pub fn build_mapping_torus(phi: &Automorphism) -> MappingTorus {
    MappingTorus::new(phi)
}

/// A map from `F_n ⋊_φ ⟨t⟩` to `F_n ⋊_ψ ⟨t⟩` given by images of the fiber
/// generators and of `t`. Checks `f(G) = G`, `f(t) ∈ tG` and that every
/// defining relator maps to the identity.
pub fn check_standard_iso(fiber_images: &[TorusElement], t_image: &TorusElement, source: &MappingTorus, target: &MappingTorus) -> Result<bool> {
    let n = source.rank();
    if fiber_images.len() != n || target.rank() != n {
        return Err(CoreError::RankMismatch(fiber_images.len(), n));
    }
    if fiber_images.iter().any(|x| x.power != 0) {
        return Ok(false);
    }
    let gens: Vec<Word> = fiber_images.iter().map(|x| x.fiber.clone()).collect();
    if !FoldedGraph::from_generators(&gens, n).is_whole_group() {
        return Ok(false);
    }
    if t_image.power != 1 {
        return Ok(false);
    }
    let tinv = target.inverse(t_image);
    Ok((0..n).all(|i| {
        let lhs = target.mul(&target.mul(&tinv, &fiber_images[i]), t_image);
        let rhs = target.evaluate(source.monodromy().image(i), fiber_images);
        lhs == rhs
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn phi() -> Automorphism {
        Automorphism::from_ints(&[&[1, 2], &[1], &[3, 1]])
    }

    #[test]
    fn relators_hold() {
        assert!(build_mapping_torus(&phi()).relators_reduce());
        assert!(build_mapping_torus(&Automorphism::identity(3)).relators_reduce());
    }

    #[test]
    fn identity_is_standard() {
        let m = build_mapping_torus(&phi());
        let gens: Vec<TorusElement> = (0..3).map(|i| TorusElement::fiber(Word::gen(i))).collect();
        assert!(check_standard_iso(&gens, &TorusElement::t_power(1), &m, &m).unwrap());
        assert!(!check_standard_iso(&gens, &TorusElement::t_power(2), &m, &m).unwrap());
    }

    #[test]
    fn twisting_by_inner() {
        // ψ = φ·Ad(w^-1): identity on the fiber and t ↦ t w
        let w = Word::from_ints(&[2, -3]);
        let psi = phi().then(&Automorphism::inner(&w.inverse(), 3));
        let (src, dst) = (build_mapping_torus(&phi()), build_mapping_torus(&psi));
        let gens: Vec<TorusElement> = (0..3).map(|i| TorusElement::fiber(Word::gen(i))).collect();
        assert!(check_standard_iso(&gens, &dst.t_times(&w), &src, &dst).unwrap());
        assert!(!check_standard_iso(&gens, &dst.t_times(&Word::gen(0)), &src, &dst).unwrap());
    }

    #[test]
    fn conjugating_automorphism() {
        // ψ = χ^-1 φ χ: fiber map χ, t ↦ t
        let chi = Automorphism::from_ints(&[&[1, 3], &[2], &[3]]);
        let psi = phi().conjugate_by(&chi);
        let (src, dst) = (build_mapping_torus(&phi()), build_mapping_torus(&psi));
        let gens: Vec<TorusElement> = (0..3).map(|i| TorusElement::fiber(chi.image(i).clone())).collect();
        assert!(check_standard_iso(&gens, &TorusElement::t_power(1), &src, &dst).unwrap());
    }

    fn word() -> impl Strategy<Value = Word> {
        prop::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2), Just(3), Just(-3)], 0..6).prop_map(|v| Word::from_ints(&v))
    }

    proptest! {
        #[test]
        fn associative(g in word(), h in word(), k in word(), p in -2i64..3, q in -2i64..3, r in -2i64..3) {
            let m = build_mapping_torus(&phi());
            let (x, y, z) = (TorusElement { fiber: g, power: p }, TorusElement { fiber: h, power: q }, TorusElement { fiber: k, power: r });
            prop_assert_eq!(m.mul(&m.mul(&x, &y), &z), m.mul(&x, &m.mul(&y, &z)));
            prop_assert_eq!(m.mul(&x, &m.inverse(&x)), TorusElement::fiber(Word::identity()));
        }
    }
}
