//! The Klein bottle group `K = ⟨a⟩ ⋊ ⟨t⟩` with `t^-1 a t = a^-1`, its four
//! outer classes and the multiple conjugacy problem up to them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::verdict::Verdict;

/// `a^m t^n`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KleinElement {
    pub m: i64,
    pub n: i64,
}

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 { 1 } else { -1 }
}

impl KleinElement {
    pub const IDENTITY: KleinElement = KleinElement { m: 0, n: 0 };
    pub const A: KleinElement = KleinElement { m: 1, n: 0 };
    pub const T: KleinElement = KleinElement { m: 0, n: 1 };

    pub fn new(m: i64, n: i64) -> KleinElement {
        KleinElement { m, n }
    }

    pub fn mul(self, o: KleinElement) -> KleinElement {
        KleinElement { m: self.m + sign(self.n) * o.m, n: self.n + o.n }
    }

    pub fn inverse(self) -> KleinElement {
        KleinElement { m: -sign(self.n) * self.m, n: -self.n }
    }

    pub fn pow(self, k: i64) -> KleinElement {
        let base = if k < 0 { self.inverse() } else { self };
        (0..k.unsigned_abs()).fold(KleinElement::IDENTITY, |acc, _| acc.mul(base))
    }

    /// `g^-1 self g`.
    pub fn conjugate_by(self, g: KleinElement) -> KleinElement {
        g.inverse().mul(self).mul(g)
    }

    /// Image in `K / ⟨a^2⟩ ≅ Z/2 × Z`.
    pub fn abelianize(self) -> (i64, i64) {
        (self.m.rem_euclid(2), self.n)
    }
}

impl fmt::Debug for KleinElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a^{} t^{}", self.m, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "invariant", rename_all = "snake_case")]
pub enum KleinNo {
    Abelianization { left: (i64, i64), right: (i64, i64) },
    /// For even `n`, `|m|` is a conjugacy invariant of `a^m t^n`.
    FiberExponent { left: i64, right: i64 },
}

/// `Yes(g)` with `g^-1 x g = y`.
pub fn klein_conjugate(x: KleinElement, y: KleinElement) -> Verdict<KleinElement, KleinNo> {
    if x.abelianize() != y.abelianize() {
        return Verdict::No(KleinNo::Abelianization { left: x.abelianize(), right: y.abelianize() });
    }
    if x.n.rem_euclid(2) == 0 {
        if x.m == y.m {
            Verdict::Yes(KleinElement::IDENTITY)
        } else if x.m == -y.m {
            Verdict::Yes(KleinElement::T)
        } else {
            Verdict::No(KleinNo::FiberExponent { left: x.m.abs(), right: y.m.abs() })
        }
    } else {
        // a^-p (a^m t^n) a^p = a^(m - 2p) t^n
        Verdict::Yes(KleinElement::new((x.m - y.m) / 2, 0))
    }
}

/// `a ↦ a^e1, t ↦ a^k t^e2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KleinAuto {
    pub e1: i64,
    pub k: i64,
    pub e2: i64,
}

impl KleinAuto {
    pub fn new(e1: i64, k: i64, e2: i64) -> KleinAuto {
        assert!(e1.abs() == 1 && e2.abs() == 1);
        KleinAuto { e1, k, e2 }
    }

    pub fn identity() -> KleinAuto {
        KleinAuto::new(1, 0, 1)
    }

    pub fn inner(g: KleinElement) -> KleinAuto {
        let a = KleinElement::A.conjugate_by(g);
        let t = KleinElement::T.conjugate_by(g);
        KleinAuto::new(a.m, t.m, t.n)
    }

    pub fn apply(&self, x: KleinElement) -> KleinElement {
        let a = KleinElement::new(self.e1, 0);
        let t = KleinElement::new(self.k, self.e2);
        a.pow(x.m).mul(t.pow(x.n))
    }

    /// `self` first.
    pub fn then(&self, other: &KleinAuto) -> KleinAuto {
        let a = other.apply(self.apply(KleinElement::A));
        let t = other.apply(self.apply(KleinElement::T));
        KleinAuto::new(a.m, t.m, t.n)
    }

    /// The defining relation `t^-1 a t = a^-1` holds for the images.
    pub fn respects_relation(&self) -> bool {
        let a = KleinElement::new(self.e1, 0);
        let t = KleinElement::new(self.k, self.e2);
        a.conjugate_by(t) == a.inverse()
    }

    /// `(u, ε)` with `u = k mod 2` and `ε = e2`.
    pub fn outer_class(&self) -> OutKleinClass {
        OutKleinClass { u: self.k.rem_euclid(2) as u8, epsilon: self.e2 as i8 }
    }

    pub fn is_inner(&self) -> bool {
        self.outer_class() == OutKleinClass::identity()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutKleinClass {
    pub u: u8,
    pub epsilon: i8,
}

impl OutKleinClass {
    pub fn identity() -> OutKleinClass {
        OutKleinClass { u: 0, epsilon: 1 }
    }

    /// `a ↦ a, t ↦ a^u t^ε`.
    pub fn representative(&self) -> KleinAuto {
        KleinAuto::new(1, self.u as i64, self.epsilon as i64)
    }

    pub fn compose(&self, other: &OutKleinClass) -> OutKleinClass {
        OutKleinClass { u: (self.u + other.u) % 2, epsilon: self.epsilon * other.epsilon }
    }
}

pub fn klein_out_group() -> Vec<OutKleinClass> {
    let mut out = Vec::new();
    for u in 0..2 {
        for epsilon in [1, -1] {
            out.push(OutKleinClass { u, epsilon });
        }
    }
    out
}

/// Simultaneous conjugator `g` with `g^-1 x_i g = y_i`, exactly.
pub fn klein_simultaneous(xs: &[KleinElement], ys: &[KleinElement]) -> Option<KleinElement> {
    if xs.len() != ys.len() {
        return None;
    }
    // t^2 is central, so g = t^q a^p with q in {0, 1}
    for q in 0..2 {
        let tq = KleinElement::T.pow(q);
        let zs: Vec<KleinElement> = xs.iter().map(|x| x.conjugate_by(tq)).collect();
        let mut p: Option<i64> = None;
        let mut ok = true;
        for (z, y) in zs.iter().zip(ys) {
            if z.n != y.n {
                ok = false;
                break;
            }
            if z.n.rem_euclid(2) == 0 {
                ok &= z.m == y.m;
            } else {
                let d = z.m - y.m;
                if d.rem_euclid(2) != 0 || p.is_some_and(|p| p != d / 2) {
                    ok = false;
                } else {
                    p = Some(d / 2);
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            let g = tq.mul(KleinElement::new(p.unwrap_or(0), 0));
            debug_assert!(xs.iter().zip(ys).all(|(x, y)| x.conjugate_by(g) == *y));
            return Some(g);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedWitness {
    pub class: OutKleinClass,
    pub conjugator: KleinElement,
}

/// Tuples related by a fiber-and-orientation preserving outer class and a
/// single conjugator. Every outer class of `K` preserves the fiber `⟨a⟩`
/// and the coset `⟨a⟩t`, so the sweep runs over all four.
pub fn klein_mixed_whitehead(xs: &[KleinElement], ys: &[KleinElement]) -> Verdict<MixedWitness, Vec<OutKleinClass>> {
    let mut tried = Vec::new();
    for class in klein_out_group() {
        let alpha = class.representative();
        let img: Vec<KleinElement> = xs.iter().map(|&x| alpha.apply(x)).collect();
        if let Some(g) = klein_simultaneous(&img, ys) {
            return Verdict::Yes(MixedWitness { class, conjugator: g });
        }
        tried.push(class);
    }
    Verdict::No(tried)
}
