//! Finite quotients `F / (γ_{c+1} F · F^m)` for `c ∈ {1, 2}`.
//!
//! Elements are `x_1^{e_1} ... x_n^{e_n} · Π_{i<j} [x_i, x_j]^{k_ij}` with
//! exponents mod `m`. For `c = 2` the multiplication is only a quotient of
//! `F` compatible with every automorphism when `m` is odd.

use crate::automorphism::Automorphism;
use crate::error::{CoreError, Result};
use crate::word::Word;

#[derive(Clone, Debug)]
pub struct NilQuotient {
    rank: usize,
    modulus: i64,
    class: u8,
    pairs: Vec<(usize, usize)>,
}

pub type Elem = Vec<i64>;

impl NilQuotient {
    pub fn new(rank: usize, modulus: i64, class: u8) -> Result<NilQuotient> {
        if modulus < 2 {
            return Err(CoreError::Unsupported(format!("modulus {modulus}")));
        }
        if !(1..=2).contains(&class) {
            return Err(CoreError::Unsupported(format!("nilpotency class {class}")));
        }
        if class == 2 && modulus % 2 == 0 {
            return Err(CoreError::Unsupported(format!("class 2 needs an odd modulus, got {modulus}")));
        }
        let pairs = if class == 2 {
            (0..rank).flat_map(|i| (i + 1..rank).map(move |j| (i, j))).collect()
        } else {
            Vec::new()
        };
        Ok(NilQuotient { rank, modulus, class, pairs })
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn class(&self) -> u8 {
        self.class
    }

    fn len(&self) -> usize {
        self.rank + self.pairs.len()
    }

    pub fn size(&self) -> u64 {
        (self.modulus as u64).saturating_pow(self.len() as u32)
    }

    pub fn identity(&self) -> Elem {
        vec![0; self.len()]
    }

    pub fn gen(&self, i: usize) -> Elem {
        let mut e = self.identity();
        e[i] = 1;
        e
    }

    fn norm(&self, mut e: Elem) -> Elem {
        for x in e.iter_mut() {
            *x = x.rem_euclid(self.modulus);
        }
        e
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out: Elem = a.iter().zip(b).map(|(x, y)| x + y).collect();
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            out[self.rank + p] -= a[j] * b[i];
        }
        self.norm(out)
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        let mut out: Elem = a.iter().map(|x| -x).collect();
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            out[self.rank + p] -= a[j] * a[i];
        }
        self.norm(out)
    }

    pub fn pow(&self, a: &Elem, k: i64) -> Elem {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut out = self.identity();
        for _ in 0..k.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        out
    }

    pub fn word(&self, w: &Word) -> Elem {
        let mut out = self.identity();
        for l in w.letters() {
            let g = self.gen(l.index());
            out = self.mul(&out, &if l.is_inverse() { self.inv(&g) } else { g });
        }
        out
    }

    fn comm(&self, a: &Elem, b: &Elem) -> Elem {
        let t = self.mul(&self.inv(a), &self.inv(b));
        self.mul(&self.mul(&t, a), b)
    }

    /// The induced map on the quotient, given by generator images.
    pub fn induced(&self, phi: &Automorphism) -> InducedMap<'_> {
        let imgs: Vec<Elem> = phi.images().iter().map(|w| self.word(w)).collect();
        let comms: Vec<Elem> = self.pairs.iter().map(|&(i, j)| self.comm(&imgs[i], &imgs[j])).collect();
        InducedMap { q: self, imgs, comms }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        let n = self.len();
        let m = self.modulus;
        (0..self.size()).map(move |mut code| {
            let mut e = vec![0i64; n];
            for x in e.iter_mut() {
                *x = (code % m as u64) as i64;
                code /= m as u64;
            }
            e
        })
    }
}

pub struct InducedMap<'a> {
    q: &'a NilQuotient,
    imgs: Vec<Elem>,
    comms: Vec<Elem>,
}

impl InducedMap<'_> {
    pub fn apply(&self, e: &Elem) -> Elem {
        let q = self.q;
        let mut out = q.identity();
        for i in 0..q.rank {
            out = q.mul(&out, &q.pow(&self.imgs[i], e[i]));
        }
        for (p, c) in self.comms.iter().enumerate() {
            out = q.mul(&out, &q.pow(c, e[q.rank + p]));
        }
        out
    }
}

/// Whether `x = (wφ) y w^-1` for some `w` in the quotient, by enumeration.
pub fn twisted_in_quotient(q: &NilQuotient, phi: &Automorphism, x: &Word, y: &Word) -> bool {
    let f = q.induced(phi);
    let (xe, ye) = (q.word(x), q.word(y));
    q.elements().any(|w| {
        let lhs = q.mul(&q.mul(&f.apply(&w), &ye), &q.inv(&w));
        lhs == xe
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn commutator_basis() {
        let q = NilQuotient::new(3, 5, 2).unwrap();
        let c = q.comm(&q.gen(0), &q.gen(2));
        assert_eq!(c, vec![0, 0, 0, 0, 1, 0]);
    }

    #[test]
    fn even_modulus_class_two_rejected() {
        assert!(NilQuotient::new(2, 2, 2).is_err());
        assert!(NilQuotient::new(2, 4, 2).is_err());
        assert!(NilQuotient::new(2, 4, 1).is_ok());
    }

    fn rand_word() -> impl Strategy<Value = Word> {
        prop::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2), Just(3), Just(-3)], 0..10)
            .prop_map(|v| Word::from_ints(&v))
    }

    proptest! {
        #[test]
        fn word_map_is_homomorphism(u in rand_word(), v in rand_word(), m in prop_oneof![Just(3i64), Just(5)]) {
            let q = NilQuotient::new(3, m, 2).unwrap();
            prop_assert_eq!(q.word(&u.mul(&v)), q.mul(&q.word(&u), &q.word(&v)));
        }

        #[test]
        fn induced_map_matches_words(w in rand_word(), m in prop_oneof![Just(3i64), Just(5)]) {
            let q = NilQuotient::new(3, m, 2).unwrap();
            let phi = Automorphism::from_ints(&[&[1, 2], &[2], &[3, 1]]);
            let f = q.induced(&phi);
            prop_assert_eq!(f.apply(&q.word(&w)), q.word(&phi.apply(&w)));
        }

        #[test]
        fn associative(a in rand_word(), b in rand_word(), c in rand_word()) {
            let q = NilQuotient::new(3, 3, 2).unwrap();
            let (x, y, z) = (q.word(&a), q.word(&b), q.word(&c));
            prop_assert_eq!(q.mul(&q.mul(&x, &y), &z), q.mul(&x, &q.mul(&y, &z)));
        }
    }
}
