//! Automorphisms of free groups, acting on the right: `w(φψ) = (wφ)ψ`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::folding::{evaluate, FoldedGraph};
use crate::matrix::IMat;
use crate::verdict::Verdict;
use crate::word::{simultaneous_conjugator, Alphabet, Word};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Automorphism {
    images: Vec<Word>,
}

impl Automorphism {
    /// Checks that the images form a basis.
    pub fn new(images: Vec<Word>) -> Result<Automorphism> {
        let rank = images.len();
        if rank == 0 {
            return Err(CoreError::ImageCount { expected: 1, got: 0 });
        }
        if images.iter().any(|w| w.max_index().is_some_and(|m| m >= rank)) {
            return Err(CoreError::RankMismatch(rank, images.iter().filter_map(|w| w.max_index()).max().unwrap() + 1));
        }
        if !FoldedGraph::from_generators(&images, rank).is_whole_group() {
            return Err(CoreError::NotAutomorphism);
        }
        Ok(Automorphism { images })
    }

    /// Skips the basis check. Callers guarantee the images form a basis.
    pub fn new_unchecked(images: Vec<Word>) -> Automorphism {
        debug_assert!(FoldedGraph::from_generators(&images, images.len()).is_whole_group());
        Automorphism { images }
    }

    pub fn from_ints(images: &[&[i32]]) -> Automorphism {
        Automorphism::new(images.iter().map(|w| Word::from_ints(w)).collect()).expect("not an automorphism")
    }

    pub fn identity(rank: usize) -> Automorphism {
        Automorphism { images: (0..rank).map(Word::gen).collect() }
    }

    /// `Ad(g): x -> g^-1 x g`.
    pub fn inner(g: &Word, rank: usize) -> Automorphism {
        Automorphism { images: (0..rank).map(|i| Word::gen(i).conjugate_by(g)).collect() }
    }

    /// Generator `i` goes to `gen(perm[i])^signs[i]`.
    pub fn signed_permutation(perm: &[usize], inverted: &[bool]) -> Automorphism {
        Automorphism {
            images: perm
                .iter()
                .zip(inverted)
                .map(|(&p, &s)| if s { Word::gen(p).inverse() } else { Word::gen(p) })
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Word {
        &self.images[i]
    }

    /// Total length of the images.
    pub fn size(&self) -> usize {
        self.images.iter().map(|w| w.len()).sum()
    }

    pub fn apply(&self, w: &Word) -> Word {
        evaluate(w, &self.images)
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Automorphism) -> Automorphism {
        Automorphism { images: self.images.iter().map(|w| other.apply(w)).collect() }
    }

    pub fn inverse(&self) -> Automorphism {
        let g = FoldedGraph::from_generators(&self.images, self.rank());
        Automorphism { images: g.loop_omegas().expect("automorphism images form a basis") }
    }

    pub fn pow(&self, k: i64) -> Automorphism {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Automorphism::identity(self.rank());
        for _ in 0..k.unsigned_abs() {
            out = out.then(&base);
        }
        out
    }

    /// `χ^-1 φ χ`.
    pub fn conjugate_by(&self, chi: &Automorphism) -> Automorphism {
        chi.inverse().then(self).then(chi)
    }

    /// Abelianization. Row `i` holds the exponent sums of the image of generator `i`.
    pub fn matrix(&self) -> IMat {
        IMat::from_rows(&self.images.iter().map(|w| w.exponent_sums(self.rank())).collect::<Vec<_>>())
    }

    /// `Some(g)` when `self = Ad(g)`.
    pub fn inner_element(&self) -> Option<Word> {
        let pairs: Vec<(Word, Word)> = self.images.iter().enumerate().map(|(i, w)| (Word::gen(i), w.clone())).collect();
        simultaneous_conjugator(&pairs)
    }

    pub fn is_inner(&self) -> bool {
        self.inner_element().is_some()
    }

    /// `Some(g)` with `self = other * Ad(g)`.
    pub fn outer_difference(&self, other: &Automorphism) -> Option<Word> {
        other.inverse().then(self).inner_element()
    }

    pub fn outer_equal(&self, other: &Automorphism) -> bool {
        self.outer_difference(other).is_some()
    }

    /// Composes with `Ad(g)` on the right and shortens the images by an inner
    /// automorphism: returns `(ψ, h)` with `ψ = self * Ad(h)` and `ψ` of
    /// locally minimal size.
    pub fn inner_normalize(&self) -> (Automorphism, Word) {
        let rank = self.rank();
        let mut cur = self.clone();
        let mut h = Word::identity();
        loop {
            let mut best: Option<(usize, Automorphism, Word)> = None;
            for i in 0..rank {
                for l in [Word::gen(i), Word::gen(i).inverse()] {
                    let cand = cur.then(&Automorphism::inner(&l, rank));
                    let s = cand.size();
                    if s < cur.size() && best.as_ref().map_or(true, |b| s < b.0) {
                        best = Some((s, cand, l));
                    }
                }
            }
            match best {
                Some((_, c, l)) => {
                    cur = c;
                    h = h.mul(&l);
                }
                None => return (cur, h),
            }
        }
    }

    pub fn format(&self, alpha: &Alphabet) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{} -> {}", alpha.names()[i], alpha.format(w)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{}->{}", Word::gen(i), w))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// All reduced words of length exactly `len`, in shortlex order.
pub fn words_of_length(rank: usize, len: usize) -> Vec<Word> {
    let mut level = vec![Word::identity()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(level.len() * (2 * rank));
        for w in &level {
            for i in 0..rank {
                for l in [crate::word::Letter::gen(i), crate::word::Letter::gen(i).inverse()] {
                    if w.last() != Some(l.inverse()) {
                        next.push(w.mul_letter(l));
                    }
                }
            }
        }
        level = next;
    }
    level
}

/// Result of the bounded fixed-subgroup search.
#[derive(Clone, Debug)]
pub struct FixedSubgroup {
    /// Free basis of the subgroup generated by the fixed words found.
    pub basis: Vec<Word>,
    /// Every fixed word up to this length lies in the subgroup.
    pub searched_length: usize,
    /// No fixed word outside the subgroup appeared in the last two length levels.
    pub stable: bool,
}

/// Collects fixed words by length and folds them.
pub fn fixed_subgroup(phi: &Automorphism, max_len: usize) -> Verdict<FixedSubgroup, ()> {
    let rank = phi.rank();
    let mut gens: Vec<Word> = Vec::new();
    let mut last_growth = 0;
    for len in 1..=max_len {
        let g = FoldedGraph::from_generators(&gens, rank);
        let mut grew = false;
        for w in words_of_length(rank, len) {
            if phi.apply(&w) == w && !g.contains(&w) && !gens.iter().any(|x| *x == w) {
                gens.push(w);
                grew = true;
            }
        }
        if grew {
            gens = FoldedGraph::from_generators(&gens, rank).basis();
            last_growth = len;
        }
        if gens.len() == rank && FoldedGraph::from_generators(&gens, rank).is_whole_group() {
            return Verdict::Yes(FixedSubgroup { basis: gens, searched_length: len, stable: true });
        }
    }
    let stable = max_len >= last_growth + 2;
    if stable {
        Verdict::Yes(FixedSubgroup { basis: gens, searched_length: max_len, stable })
    } else {
        Verdict::Unknown(format!("fixed words still appearing at length {last_growth}"))
    }
}

/// Elementary automorphisms used for lifting matrices and random generation.
pub mod elementary {
    use super::*;

    /// `x_i -> x_i x_j^e` for `e = ±1`.
    pub fn right_transvection(rank: usize, i: usize, j: usize, inverse: bool) -> Automorphism {
        assert_ne!(i, j);
        let mut images: Vec<Word> = (0..rank).map(Word::gen).collect();
        let g = if inverse { Word::gen(j).inverse() } else { Word::gen(j) };
        images[i] = Word::gen(i).mul(&g);
        Automorphism { images }
    }

    /// `x_i -> x_j^e x_i`.
    pub fn left_transvection(rank: usize, i: usize, j: usize, inverse: bool) -> Automorphism {
        assert_ne!(i, j);
        let mut images: Vec<Word> = (0..rank).map(Word::gen).collect();
        let g = if inverse { Word::gen(j).inverse() } else { Word::gen(j) };
        images[i] = g.mul(&Word::gen(i));
        Automorphism { images }
    }

    pub fn swap(rank: usize, i: usize, j: usize) -> Automorphism {
        let mut perm: Vec<usize> = (0..rank).collect();
        perm.swap(i, j);
        Automorphism::signed_permutation(&perm, &vec![false; rank])
    }

    pub fn invert(rank: usize, i: usize) -> Automorphism {
        let mut inv = vec![false; rank];
        inv[i] = true;
        Automorphism::signed_permutation(&(0..rank).collect::<Vec<_>>(), &inv)
    }

    /// All the above, a generating set of `Aut(F_n)`.
    pub fn generators(rank: usize) -> Vec<Automorphism> {
        let mut out = Vec::new();
        for i in 0..rank {
            out.push(invert(rank, i));
            for j in 0..rank {
                if i != j {
                    for inv in [false, true] {
                        out.push(right_transvection(rank, i, j, inv));
                        out.push(left_transvection(rank, i, j, inv));
                    }
                    if i < j {
                        out.push(swap(rank, i, j));
                    }
                }
            }
        }
        out
    }

    /// Product of `len` generators chosen by `pick(n)` returning an index below `n`.
    pub fn random_word<F: FnMut(usize) -> usize>(rank: usize, len: usize, mut pick: F) -> Automorphism {
        let gens = generators(rank);
        let mut a = Automorphism::identity(rank);
        for _ in 0..len {
            a = a.then(&gens[pick(gens.len())]);
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn right_action_convention() {
        let phi = Automorphism::from_ints(&[&[1, 2], &[2]]); // a -> ab
        let psi = Automorphism::from_ints(&[&[1], &[2, 1]]); // b -> ba
        let comp = phi.then(&psi);
        // a (φψ) = (ab)ψ = a ba
        assert_eq!(comp.image(0), &Word::from_ints(&[1, 2, 1]));
        assert_eq!(comp.matrix(), phi.matrix().mul(&psi.matrix()));
    }

    #[test]
    fn example_matrix_rows() {
        let phi = Automorphism::from_ints(&[&[1], &[2, 1], &[3, 2]]);
        assert_eq!(phi.matrix(), IMat::from_array([[1, 0, 0], [1, 1, 0], [0, 1, 1]]));
    }

    #[test]
    fn not_an_automorphism() {
        let r = Automorphism::new(vec![Word::from_ints(&[1, 1]), Word::from_ints(&[2])]);
        assert_eq!(r, Err(CoreError::NotAutomorphism));
    }

    #[test]
    fn inner_detection() {
        let g = Word::from_ints(&[1, -2, 3]);
        let ad = Automorphism::inner(&g, 3);
        assert_eq!(ad.inner_element(), Some(g.clone()));
        assert!(!Automorphism::from_ints(&[&[1, 2], &[2]]).is_inner());
        // Ad(g)^χ = Ad(gχ)
        let chi = Automorphism::from_ints(&[&[1, 3], &[2, 1], &[3]]);
        assert_eq!(ad.conjugate_by(&chi), Automorphism::inner(&chi.apply(&g), 3));
    }

    #[test]
    fn inner_normalize_shrinks() {
        let phi = Automorphism::from_ints(&[&[1], &[2, 1]]);
        let g = Word::from_ints(&[2, 1, 2]);
        let twisted = phi.then(&Automorphism::inner(&g, 2));
        let (n, h) = twisted.inner_normalize();
        assert!(n.size() <= phi.size());
        assert_eq!(twisted.then(&Automorphism::inner(&h, 2)), n);
    }

    #[test]
    fn fixed_subgroups() {
        let phi = Automorphism::from_ints(&[&[1], &[2, 1]]);
        let fix = fixed_subgroup(&phi, 7).yes().unwrap();
        for b in &fix.basis {
            assert_eq!(&phi.apply(b), b);
        }
        assert_eq!(fix.basis.len(), 2);
        let expected = FoldedGraph::from_generators(&[Word::from_ints(&[1]), Word::from_ints(&[2, 1, -2])], 2);
        for b in &fix.basis {
            assert!(expected.contains(b));
        }
        let got = FoldedGraph::from_generators(&fix.basis, 2);
        assert!(got.contains(&Word::from_ints(&[1])) && got.contains(&Word::from_ints(&[2, 1, -2])));
        let id = fixed_subgroup(&Automorphism::identity(2), 4).yes().unwrap();
        assert!(FoldedGraph::from_generators(&id.basis, 2).is_whole_group());
    }

    proptest! {
        #[test]
        fn inverse_and_matrix(len in 0usize..12, seed in any::<u64>()) {
            let mut s = seed;
            let a = elementary::random_word(3, len, |n| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); ((s >> 33) as usize) % n });
            let inv = a.inverse();
            prop_assert_eq!(a.then(&inv), Automorphism::identity(3));
            prop_assert_eq!(inv.then(&a), Automorphism::identity(3));
            prop_assert_eq!(a.matrix().mul(&inv.matrix()), IMat::identity(3));
        }
    }
}
