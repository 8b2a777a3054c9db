//! Bounded conjugator search in `Out(F_3)`, meeting in the middle.

use std::collections::{HashMap, HashSet};

use crate::automorphism::{elementary, Automorphism};
use crate::word::{CyclicWord, Word};

/// Products of at most `radius` elementary automorphisms, deduplicated.
pub fn ball(rank: usize, radius: usize) -> Vec<Automorphism> {
    let gens = elementary::generators(rank);
    let mut seen: HashSet<Automorphism> = HashSet::from([Automorphism::identity(rank)]);
    let mut out = vec![Automorphism::identity(rank)];
    let mut frontier = out.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for a in &frontier {
            for g in &gens {
                let b = a.then(g);
                if seen.insert(b.clone()) {
                    next.push(b);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Conjugacy classes of a few images; equal for outer-equal automorphisms.
fn class_key(phi: &Automorphism) -> Vec<CyclicWord> {
    let n = phi.rank();
    let mut probes: Vec<Word> = (0..n).map(Word::gen).collect();
    for i in 0..n {
        for j in i + 1..n {
            probes.push(Word::gen(i).mul(&Word::gen(j)));
        }
    }
    probes.iter().map(|w| CyclicWord::new(&phi.apply(w))).collect()
}

/// Some `χ` with `χ^-1 φ χ` outer-equal to `ψ`, `χ` a product of at most
/// `length` elementary automorphisms. Every returned `χ` is checked.
pub fn bounded_conjugator(phi: &Automorphism, psi: &Automorphism, length: usize) -> Option<Automorphism> {
    let rank = phi.rank();
    let (r1, r2) = (length.div_ceil(2), length / 2);
    let mut table: HashMap<Vec<CyclicWord>, Vec<Automorphism>> = HashMap::new();
    for chi in ball(rank, r1) {
        table.entry(class_key(&phi.conjugate_by(&chi))).or_default().push(chi);
    }
    for eta in ball(rank, r2) {
        let Some(hits) = table.get(&class_key(&psi.conjugate_by(&eta))) else { continue };
        let eta_inv = eta.inverse();
        for chi in hits {
            let w = chi.then(&eta_inv);
            if phi.conjugate_by(&w).outer_equal(psi) {
                return Some(w);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes_grow() {
        assert_eq!(ball(3, 0).len(), 1);
        assert_eq!(ball(3, 1).len(), 31);
        assert!(ball(3, 2).len() > 31);
    }

    #[test]
    fn finds_planted_conjugators() {
        let phi = Automorphism::from_ints(&[&[1], &[2, 1], &[3]]);
        let gens = elementary::generators(3);
        let chi = gens[3].then(&gens[17]).then(&gens[8]);
        let psi = phi.conjugate_by(&chi).then(&Automorphism::inner(&Word::from_ints(&[2, 3]), 3));
        let w = bounded_conjugator(&phi, &psi, 3).unwrap();
        assert!(phi.conjugate_by(&w).outer_equal(&psi));
    }

    #[test]
    fn different_matrices_never_match() {
        let phi = Automorphism::from_ints(&[&[1], &[2, 1], &[3]]);
        let psi = Automorphism::from_ints(&[&[1], &[2, 1, 1], &[3]]);
        assert_eq!(bounded_conjugator(&phi, &psi, 4), None);
    }
}
