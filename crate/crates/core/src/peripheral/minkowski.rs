//! Finite characteristic quotients in which the torsion of the outer
//! automorphism group survives.

use std::collections::HashMap;

use super::klein::{klein_out_group, KleinAuto, KleinElement};
use crate::matrix::IMat;

/// Element of `K / ⟨a^2, t^s⟩ = Z/2 × Z/s` for even `s`.
type Q = (i64, i64);

/// `t^6` generates a characteristic subgroup: `(a^k t^±1)^6 = t^±6`. With
/// `t^3` instead, `t ↦ at` sends `t^3` to `a t^3`.
pub const T_MODULUS: i64 = 6;

fn reduce(x: KleinElement, s: i64) -> Q {
    (x.m.rem_euclid(2), x.n.rem_euclid(s))
}

/// Induced map on the quotient from the images of `a` and `t`.
fn induced_from_generators(alpha: &KleinAuto, s: i64) -> HashMap<Q, Q> {
    let (ia, it) = (reduce(alpha.apply(KleinElement::A), s), reduce(alpha.apply(KleinElement::T), s));
    let mut out = HashMap::new();
    for x in 0..2 {
        for y in 0..s {
            out.insert((x, y), ((x * ia.0 + y * it.0).rem_euclid(2), (x * ia.1 + y * it.1).rem_euclid(s)));
        }
    }
    out
}

/// Induced map by pushing many elements of `K` through `α` and reducing;
/// `None` when the result is not well defined on the quotient.
fn induced_by_enumeration(alpha: &KleinAuto, s: i64) -> Option<HashMap<Q, Q>> {
    let mut out: HashMap<Q, Q> = HashMap::new();
    for m in -8..=8 {
        for n in -13..=13 {
            let x = KleinElement::new(m, n);
            let (q, img) = (reduce(x, s), reduce(alpha.apply(x), s));
            if *out.entry(q).or_insert(img) != img {
                return None;
            }
        }
    }
    Some(out)
}

fn is_identity(map: &HashMap<Q, Q>) -> bool {
    map.iter().all(|(k, v)| k == v)
}

/// The four outer classes of `K` have pairwise distinct images in
/// `Aut(Z/2 × Z/6)`; the quotient is abelian, so inner automorphisms act
/// trivially.
pub fn minkowski_check_klein() -> bool {
    klein_quotient_check(T_MODULUS)
}

pub fn klein_quotient_check(s: i64) -> bool {
    let classes = klein_out_group();
    let mut maps = Vec::new();
    for c in &classes {
        let alpha = c.representative();
        let a = induced_from_generators(&alpha, s);
        let Some(b) = induced_by_enumeration(&alpha, s) else { return false };
        if a != b {
            return false;
        }
        maps.push(a);
    }
    let distinct = (0..maps.len()).all(|i| (i + 1..maps.len()).all(|j| maps[i] != maps[j]));
    let nontrivial = classes.iter().zip(&maps).all(|(c, m)| (c.representative().is_inner()) == is_identity(m));
    distinct && nontrivial
}

/// Finite-order elements of `GL(2, Z)` with entries bounded by `bound`.
pub fn finite_order_gl2(bound: i64) -> Vec<IMat> {
    let mut out = Vec::new();
    let id = IMat::identity(2);
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    if (a * d - b * c).abs() != 1 {
                        continue;
                    }
                    let m = IMat::from_array([[a, b], [c, d]]);
                    if (1..=6).any(|k| m.pow(k) == id) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Every nontrivial finite-order element of `GL(2, Z)` (entries up to 3)
/// stays nontrivial modulo `modulus`.
pub fn minkowski_check_z2(modulus: i64) -> bool {
    let id = IMat::identity(2);
    finite_order_gl2(3).iter().filter(|m| **m != id).all(|m| {
        (0..2).any(|i| (0..2).any(|j| (m[(i, j)] - id[(i, j)]).rem_euclid(modulus) != 0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klein_quotient_detects_outer_classes() {
        assert!(minkowski_check_klein());
    }

    #[test]
    fn t_cubed_quotient_is_not_characteristic() {
        assert!(!klein_quotient_check(3));
        assert_eq!(induced_by_enumeration(&KleinAuto::new(1, 1, 1), 3), None);
        // with t^2 the orientation class is invisible
        assert!(!klein_quotient_check(2));
    }

    #[test]
    fn z2_modulus_three_but_not_two() {
        assert!(minkowski_check_z2(3));
        assert!(!minkowski_check_z2(2));
        assert!(minkowski_check_z2(4));
    }

    #[test]
    fn finite_orders_present() {
        let all = finite_order_gl2(2);
        let id = IMat::identity(2);
        let order = |m: &IMat| (1..=6).find(|&k| m.pow(k) == id).unwrap();
        let mut orders: Vec<u32> = all.iter().map(order).collect();
        orders.sort_unstable();
        orders.dedup();
        assert_eq!(orders, vec![1, 2, 3, 4, 6]);
    }

    #[test]
    fn enumeration_agrees_with_generators_for_all_shapes() {
        for e1 in [1, -1] {
            for e2 in [1, -1] {
                for k in -3..=3 {
                    let alpha = KleinAuto::new(e1, k, e2);
                    assert_eq!(induced_by_enumeration(&alpha, T_MODULUS), Some(induced_from_generators(&alpha, T_MODULUS)));
                }
            }
        }
    }
}
