//! Twisted conjugacy `x ~_φ y`, meaning `x = (wφ) · y · w^-1` for some `w ∈ F`.

pub mod nilpotent;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::automorphism::{words_of_length, Automorphism};
use crate::matrix::{row_lattice_contains, IMat};
use crate::verdict::Verdict;
use crate::word::{conjugate_in_free, Word};
use nilpotent::{twisted_in_quotient, NilQuotient};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedBudget {
    /// Longest witness tried by the bidirectional search.
    pub max_len: usize,
    /// Moduli for the finite quotient sweep.
    pub moduli: Vec<i64>,
    /// Highest nilpotency class used in the sweep.
    pub max_class: u8,
    /// Quotients larger than this are skipped.
    pub quotient_cap: u64,
    /// `y` is also compared against `yφ^k` for `|k|` up to this.
    pub power_shifts: i64,
}

impl Default for TwistedBudget {
    fn default() -> Self {
        TwistedBudget { max_len: 12, moduli: vec![2, 3, 4, 5], max_class: 2, quotient_cap: 20_000, power_shifts: 3 }
    }
}

/// Certificates that `x` and `y` are not twisted conjugate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "obstruction", rename_all = "snake_case")]
pub enum TwistedNo {
    /// `x̄ - ȳ` lies outside the row lattice of `M - I`.
    Abelian { difference: Vec<i64> },
    /// No solution in the class-`c`, exponent-`m` nilpotent quotient.
    FiniteQuotient { modulus: i64, class: u8 },
    /// `φ^N = Ad(g)` and the twisted powers `g·X`, `g·Y` are not conjugate.
    PowerClass { order: u32 },
    /// The only candidate conjugators left by the power condition fail.
    FiniteOrderExhausted { order: u32 },
}

pub fn is_twisted_witness(phi: &Automorphism, x: &Word, y: &Word, w: &Word) -> bool {
    phi.apply(w).mul(y).mul(&w.inverse()) == *x
}

pub fn abelian_obstruction(phi: &Automorphism, x: &Word, y: &Word) -> Option<TwistedNo> {
    let n = phi.rank();
    let diff: Vec<i64> = x.exponent_sums(n).iter().zip(y.exponent_sums(n)).map(|(a, b)| a - b).collect();
    let rel = phi.matrix().sub(&IMat::identity(n));
    if row_lattice_contains(&rel, &diff) {
        None
    } else {
        Some(TwistedNo::Abelian { difference: diff })
    }
}

pub fn finite_quotient_obstruction(phi: &Automorphism, x: &Word, y: &Word, budget: &TwistedBudget) -> Option<TwistedNo> {
    for class in 1..=budget.max_class.min(2) {
        for &m in &budget.moduli {
            let Ok(q) = NilQuotient::new(phi.rank(), m, class) else { continue };
            if q.size() > budget.quotient_cap {
                continue;
            }
            if !twisted_in_quotient(&q, phi, x, y) {
                return Some(TwistedNo::FiniteQuotient { modulus: m, class });
            }
        }
    }
    None
}

/// Product `(xφ^{N-1}) ... (xφ) x`, the `F`-part of `(t x)^N` in the mapping torus.
fn twisted_power(phi: &Automorphism, x: &Word, n: u32) -> Word {
    let mut out = Word::identity();
    let mut cur = x.clone();
    for _ in 0..n {
        out = cur.mul(&out);
        cur = phi.apply(&cur);
    }
    out
}

/// Smallest `N <= 12` with `φ^N` inner, and the `g` with `φ^N = Ad(g)`.
///
/// `N` is the order of the abelianization; if `φ^N` is not inner then `φ`
/// has infinite order in `Out(F)`, the kernel to `GL(n, Z)` being torsion free.
pub fn finite_outer_order(phi: &Automorphism) -> Option<(u32, Word)> {
    let m = phi.matrix();
    let id = IMat::identity(phi.rank());
    let n = (1..=12u32).find(|&k| m.checked_pow(k).as_ref() == Some(&id))?;
    let g = phi.pow(n as i64).inner_element()?;
    Some((n, g))
}

fn power_of(d: &Word, r: &Word) -> Option<i64> {
    if d.is_identity() {
        return Some(0);
    }
    let (root, k) = d.root();
    if root == *r {
        Some(k as i64)
    } else if root == r.inverse() {
        Some(-(k as i64))
    } else {
        None
    }
}

/// Exact decision when `φ` has finite order in `Out(F)` and the twisted
/// power `g·X` is nontrivial. `None` when the fragment does not apply.
pub fn finite_order_decision(phi: &Automorphism, x: &Word, y: &Word) -> Option<Verdict<Word, TwistedNo>> {
    let (order, g) = finite_outer_order(phi)?;
    let gx = g.mul(&twisted_power(phi, x, order));
    let gy = g.mul(&twisted_power(phi, y, order));
    if gx.is_identity() && gy.is_identity() {
        return None;
    }
    let Some(h) = conjugate_in_free(&gx, &gy) else {
        return Some(Verdict::No(TwistedNo::PowerClass { order }));
    };
    // Candidates lie in h·<r>, r the root of gY; t·y acts on <r> by ±1.
    let (r, _) = gy.root();
    let s = phi.apply(&r).conjugate_by(y);
    let candidate = if s == r {
        Some(h.clone())
    } else if s == r.inverse() {
        let inner = phi.apply(&h.inverse()).mul(x).mul(&h).mul(&y.inverse());
        let d = phi.inverse().apply(&inner);
        match power_of(&d, &r) {
            Some(e) if e % 2 == 0 => Some(h.mul(&r.pow(e / 2))),
            _ => None,
        }
    } else {
        return None;
    };
    Some(match candidate {
        Some(w) if is_twisted_witness(phi, x, y, &w) => Verdict::Yes(w),
        _ => Verdict::No(TwistedNo::FiniteOrderExhausted { order }),
    })
}

/// Witness `w` of length at most `max_len` for `x ~_φ y`, found by meeting in
/// the middle, with `y` replaced by `yφ^k` for `|k| <= shifts`.
pub fn twisted_search(phi: &Automorphism, x: &Word, y: &Word, max_len: usize, shifts: i64) -> Option<Word> {
    let rank = phi.rank();
    let left_len = max_len.div_ceil(2);
    let right_len = max_len / 2;
    // x = (uφ)(vφ) y v^-1 u^-1  <=>  (uφ)^-1 x u = (vφ) y v^-1
    let mut left: HashMap<Word, Word> = HashMap::new();
    for l in 0..=left_len {
        for u in words_of_length(rank, l) {
            let key = phi.apply(&u).inverse().mul(x).mul(&u);
            left.entry(key).or_insert(u);
        }
    }
    let right_words: Vec<Word> = (0..=right_len).flat_map(|l| words_of_length(rank, l)).collect();
    let phi_inv = phi.inverse();
    // |(uφ)^-1 x u| and |(vφ) yk v^-1| differ by at most max_len (1 + L),
    // so a longer shifted target can never match. A word shrinks by at most
    // a factor L' per application, which bounds when a direction is dead.
    let stretch = |f: &Automorphism| f.images().iter().map(Word::len).max().unwrap_or(1).max(1);
    let (l, l_inv) = (stretch(phi), stretch(&phi_inv));
    let reach = x.len() + max_len * (1 + l);
    let alive = |w: &Word, k: i64, shrink: usize| {
        let room = (shrink as u128).saturating_pow((shifts - k) as u32).saturating_mul(reach as u128);
        (w.len() as u128) <= room
    };
    let mut shifted = vec![(0i64, y.clone(), Word::identity())];
    let (mut up, mut down) = (Some(y.clone()), Some(y.clone()));
    let (mut chain_up, mut chain_down) = (Word::identity(), Word::identity());
    for k in 1..=shifts {
        // y = (cφ) yφ^k c^-1 with c = y^-1 (yφ)^-1 ...
        if let Some(u) = up.take() {
            chain_up = chain_up.mul(&u.inverse());
            let next = phi.apply(&u);
            if next.len() <= reach {
                shifted.push((k, next.clone(), chain_up.clone()));
            }
            up = alive(&next, k, l_inv).then_some(next);
        }
        if let Some(d) = down.take() {
            let next = phi_inv.apply(&d);
            chain_down = chain_down.mul(&next);
            if next.len() <= reach {
                shifted.push((-k, next.clone(), chain_down.clone()));
            }
            down = alive(&next, k, l).then_some(next);
        }
    }
    for (_, yk, chain) in &shifted {
        for v in &right_words {
            let key = phi.apply(v).mul(yk).mul(&v.inverse());
            if let Some(u) = left.get(&key) {
                let w = u.mul(v).mul(&chain.inverse());
                if is_twisted_witness(phi, x, y, &w) {
                    return Some(w);
                }
            }
        }
    }
    None
}

/// Decides `x ~_φ y` where a certificate is available, searches otherwise.
pub fn twisted_conjugate(phi: &Automorphism, x: &Word, y: &Word, budget: &TwistedBudget) -> Verdict<Word, TwistedNo> {
    if let Some(no) = abelian_obstruction(phi, x, y) {
        return Verdict::No(no);
    }
    if let Some(w) = twisted_search(phi, x, y, budget.max_len.min(4), 0) {
        return Verdict::Yes(w);
    }
    if let Some(v) = finite_order_decision(phi, x, y) {
        return v;
    }
    if let Some(no) = finite_quotient_obstruction(phi, x, y, budget) {
        return Verdict::No(no);
    }
    if let Some(w) = twisted_search(phi, x, y, budget.max_len, budget.power_shifts) {
        return Verdict::Yes(w);
    }
    Verdict::Unknown(format!("no obstruction found and no witness of length <= {}", budget.max_len))
}

/// Re-derives a negative certificate from scratch.
pub fn recheck(phi: &Automorphism, x: &Word, y: &Word, no: &TwistedNo) -> bool {
    match no {
        TwistedNo::Abelian { .. } => abelian_obstruction(phi, x, y).as_ref() == Some(no),
        TwistedNo::FiniteQuotient { modulus, class } => NilQuotient::new(phi.rank(), *modulus, *class)
            .map(|q| !twisted_in_quotient(&q, phi, x, y))
            .unwrap_or(false),
        TwistedNo::PowerClass { .. } | TwistedNo::FiniteOrderExhausted { .. } => {
            matches!(finite_order_decision(phi, x, y), Some(Verdict::No(ref n)) if n == no)
        }
    }
}
