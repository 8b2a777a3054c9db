//! Figure-style dispatcher: compare invariants, route both inputs down the
//! same branch, and hand off to the relative algorithm or a bounded search.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::profile::{profile, InvariantProfile, Reducibility};
use super::search::bounded_conjugator;
use super::Budgets;
use crate::automorphism::Automorphism;
use crate::error::{CoreError, Result};
use crate::outf3k::{decide_conjugacy_f3k, to_triple, F3KCertificate, Triple};
use crate::traintrack::GrowthType;
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Quadratic growth: unique invariant rank-2 free factor.
    Quadratic,
    /// Exponential growth with lamination carried by a rank-2 free factor.
    ExponentialReducible,
    /// Polynomial growth of degree at most one.
    Subquadratic,
    /// Exponential growth with filling lamination, or carrier unknown.
    AlmostToral,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::Quadratic => "quadratic",
            Branch::ExponentialReducible => "exponential, rank-2 carrier",
            Branch::Subquadratic => "polynomial of degree at most 1",
            Branch::AlmostToral => "exponential, filling or unknown carrier",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A verified conjugacy invariant takes different values.
    Invariant { invariant: String, left: String, right: String },
    /// After moving both invariant factors to `<a, b>`, the triples are not
    /// conjugate in `Out(F_3, <a, b>)`; the factor is unique, so neither
    /// are the inputs.
    Relative {
        branch: Branch,
        left_basis: Automorphism,
        right_basis: Automorphism,
        left: Triple,
        right: Triple,
        certificate: F3KCertificate,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    /// `Yes(χ)` means `χ^-1 φ χ` and `ψ` are equal in `Out(F_3)`.
    pub verdict: Verdict<Automorphism, Certificate>,
    pub branch: Option<Branch>,
    pub transcript: Vec<String>,
    pub profiles: [InvariantProfile; 2],
}

pub fn branch_of(p: &InvariantProfile) -> Option<Branch> {
    let g = &p.growth.value;
    match (g.growth, g.degree) {
        (GrowthType::Polynomial, Some(0 | 1)) => Some(Branch::Subquadratic),
        (GrowthType::Polynomial, Some(2)) => Some(Branch::Quadratic),
        (GrowthType::Polynomial, _) => None,
        (GrowthType::Exponential, _) => {
            let two = p.carrier.as_ref().is_some_and(|c| c.value.rank == 2 && c.verified);
            Some(if two { Branch::ExponentialReducible } else { Branch::AlmostToral })
        }
    }
}

/// First verified invariant on which the profiles differ.
pub fn mismatch(l: &InvariantProfile, r: &InvariantProfile) -> Option<(String, String, String)> {
    if l.charpoly.value != r.charpoly.value {
        return Some(("characteristic polynomial".into(), format!("{:?}", l.charpoly.value), format!("{:?}", r.charpoly.value)));
    }
    if l.growth.verified && r.growth.verified {
        let (a, b) = (&l.growth.value, &r.growth.value);
        if a.growth != b.growth {
            return Some(("growth type".into(), a.to_string(), b.to_string()));
        }
        if a.degree != b.degree {
            return Some(("growth degree".into(), a.to_string(), b.to_string()));
        }
    }
    if let (Some(a), Some(b)) = (&l.carrier, &r.carrier) {
        if a.verified && b.verified && a.value.rank != b.value.rank {
            return Some(("lamination carrier rank".into(), a.value.rank.to_string(), b.value.rank.to_string()));
        }
    }
    None
}

fn describe(p: &InvariantProfile) -> String {
    let v = |b: bool| if b { "verified" } else { "measured" };
    let mut s = format!("growth {} ({}), charpoly {:?}", p.growth.value, v(p.growth.verified), p.charpoly.value);
    if let Some(c) = &p.carrier {
        s += &format!(", carrier rank {} ({})", c.value.rank, v(c.verified));
    }
    if let Some(per) = &p.peripheral {
        let (t, k, h) = per.value.profile.counts();
        s += &format!(", peripheral torus {t} klein {k} higher {h} (incomplete)");
    }
    if matches!(p.reducibility.value, Reducibility::Reducible { .. }) {
        s += ", reducible";
    }
    s
}

fn factor_basis(p: &InvariantProfile) -> Option<&Automorphism> {
    match &p.reducibility.value {
        Reducibility::Reducible { basis, .. } if p.reducibility.verified => Some(basis),
        _ => None,
    }
}

/// Conjugate of `φ` in which the factor generated by the first two basis
/// elements becomes `<a, b>`.
fn aligned(phi: &Automorphism, basis: &Automorphism) -> Result<Triple> {
    to_triple(&phi.conjugate_by(&basis.inverse()))
}

enum Relative {
    Done(Verdict<Automorphism, Certificate>),
    Fallback(String),
}

fn relative(phi: &Automorphism, psi: &Automorphism, branch: Branch, lp: &InvariantProfile, rp: &InvariantProfile, budgets: &Budgets, log: &mut Vec<String>) -> Relative {
    let (Some(lb), Some(rb)) = (factor_basis(lp), factor_basis(rp)) else {
        return Relative::Fallback("invariant factor not found within budget".into());
    };
    let (lt, rt) = match (aligned(phi, lb), aligned(psi, rb)) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(e), _) | (_, Err(e)) => return Relative::Fallback(format!("alignment failed: {e}")),
    };
    log.push(format!("align: invariant factors moved to <a, b>; triples {lt} and {rt}"));
    match decide_conjugacy_f3k(&lt, &rt, &budgets.twisted) {
        Ok(Verdict::Yes(tau)) => {
            // (lb^-1 τ rb)^-1 φ (lb^-1 τ rb) = ψ in Out(F_3)
            let w = lb.inverse().then(&tau.to_automorphism()).then(rb);
            if phi.conjugate_by(&w).outer_equal(psi) {
                log.push("relative: conjugate in Out(F_3, <a, b>); witness verified".into());
                Relative::Done(Verdict::Yes(w))
            } else {
                Relative::Fallback("relative witness failed verification".into())
            }
        }
        Ok(Verdict::No(cert)) => {
            let exact = lp.growth.verified && rp.growth.verified;
            if !exact {
                return Relative::Fallback("relative answer is no, but growth is not verified".into());
            }
            log.push("relative: not conjugate in Out(F_3, <a, b>); the invariant factor is unique".into());
            Relative::Done(Verdict::No(Certificate::Relative {
                branch,
                left_basis: lb.clone(),
                right_basis: rb.clone(),
                left: lt,
                right: rt,
                certificate: cert,
            }))
        }
        Ok(Verdict::Unknown(r)) => Relative::Fallback(format!("relative algorithm undecided: {r}")),
        Err(CoreError::FiniteOrderRestriction) => {
            Relative::Fallback("restriction to the invariant factor has finite order, outside the relative algorithm".into())
        }
        Err(e) => Relative::Fallback(format!("relative algorithm failed: {e}")),
    }
}

fn missing_oracle(branch: Option<Branch>) -> &'static str {
    match branch {
        Some(Branch::Subquadratic) => "exact conjugacy for linearly growing automorphisms is not implemented",
        Some(Branch::AlmostToral) => "conjugacy for irreducible and relatively hyperbolic mapping tori is not implemented",
        Some(Branch::Quadratic) | Some(Branch::ExponentialReducible) => "relative train track construction beyond the search budget",
        None => "no branch applies to the measured growth",
    }
}

pub fn decide(phi: &Automorphism, psi: &Automorphism, budgets: &Budgets) -> Result<Decision> {
    let lp = profile(phi, budgets)?;
    let rp = profile(psi, budgets)?;
    let mut log = vec![format!("profile left: {}", describe(&lp)), format!("profile right: {}", describe(&rp))];
    let done = |verdict, branch, log, lp, rp| Ok(Decision { verdict, branch, transcript: log, profiles: [lp, rp] });

    if let Some((inv, l, r)) = mismatch(&lp, &rp) {
        log.push(format!("compare: {inv} differs ({l} vs {r})"));
        return done(Verdict::No(Certificate::Invariant { invariant: inv, left: l, right: r }), None, log, lp, rp);
    }
    log.push("compare: verified invariants agree".into());

    let (lb, rb) = (branch_of(&lp), branch_of(&rp));
    if lb != rb {
        log.push(format!("route: branches differ on unverified data ({lb:?} vs {rb:?})"));
        return done(Verdict::Unknown("inputs follow different arrows on unverified invariants".into()), None, log, lp, rp);
    }
    let branch = lb;
    match branch {
        Some(b) => log.push(format!("route: {b}")),
        None => log.push("route: none".into()),
    }

    if phi.outer_equal(psi) {
        log.push("search: inputs are equal in Out(F_3)".into());
        return done(Verdict::Yes(Automorphism::identity(3)), branch, log, lp, rp);
    }

    let mut reason = missing_oracle(branch).to_string();
    if let Some(b @ (Branch::Quadratic | Branch::ExponentialReducible)) = branch {
        match relative(phi, psi, b, &lp, &rp, budgets, &mut log) {
            Relative::Done(v) => return done(v, branch, log, lp, rp),
            Relative::Fallback(r) => {
                log.push(format!("relative: {r}"));
                reason = r;
            }
        }
    }
    if let (Some(Branch::AlmostToral), Some(a), Some(b)) = (branch, &lp.peripheral, &rp.peripheral) {
        let (x, y) = (a.value.profile.counts(), b.value.profile.counts());
        log.push(format!("peripheral: {x:?} vs {y:?} (candidate lists incomplete, routing only)"));
    }
    if let Some(w) = bounded_conjugator(phi, psi, budgets.search_length) {
        log.push(format!("search: conjugator found within length {}", budgets.search_length));
        return done(Verdict::Yes(w), branch, log, lp, rp);
    }
    log.push(format!("search: nothing within length {}", budgets.search_length));
    done(Verdict::Unknown(reason), branch, log, lp, rp)
}

/// Re-verifies a decision from scratch: witnesses by composition, invariant
/// certificates by recomputing both values, relative certificates by
/// re-running the relative algorithm in the other direction.
pub fn recheck(phi: &Automorphism, psi: &Automorphism, d: &Decision, budgets: &Budgets) -> bool {
    match &d.verdict {
        Verdict::Yes(w) => phi.conjugate_by(w).outer_equal(psi),
        Verdict::Unknown(_) => true,
        Verdict::No(Certificate::Invariant { invariant, .. }) => {
            let (Ok(l), Ok(r)) = (profile(phi, budgets), profile(psi, budgets)) else { return false };
            if invariant == "characteristic polynomial" {
                return phi.matrix().char_poly() != psi.matrix().char_poly();
            }
            mismatch(&l, &r).is_some_and(|(inv, _, _)| &inv == invariant)
        }
        Verdict::No(Certificate::Relative { left_basis, right_basis, left, right, .. }) => {
            let ok_l = aligned(phi, left_basis).is_ok_and(|t| &t == left);
            let ok_r = aligned(psi, right_basis).is_ok_and(|t| &t == right);
            ok_l && ok_r && matches!(decide_conjugacy_f3k(right, left, &budgets.twisted), Ok(Verdict::No(_)))
        }
    }
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

    fn e3() -> Automorphism {
        Automorphism::from_ints(&[&[1, 2], &[1], &[3, 1]])
    }

    fn random_chi(rng: &mut ChaCha8Rng, max: usize) -> Automorphism {
        let gens = elementary::generators(3);
        let len = rng.gen_range(1..=max);
        (0..len).fold(Automorphism::identity(3), |a, _| a.then(&gens[rng.gen_range(0..gens.len())]))
    }

    #[test]
    fn planted_quadratic_conjugates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = Budgets::default();
        for _ in 0..5 {
            let chi = random_chi(&mut rng, 5);
            let d = decide(&e1(), &e1().conjugate_by(&chi), &b).unwrap();
            assert_eq!(d.branch, Some(Branch::Quadratic));
            assert!(d.verdict.is_yes(), "{:?}", d.transcript);
            assert!(recheck(&e1(), &e1().conjugate_by(&chi), &d, &b));
        }
    }

    #[test]
    fn quadratic_against_identity() {
        let d = decide(&e1(), &Automorphism::identity(3), &Budgets::default()).unwrap();
        match d.verdict {
            Verdict::No(Certificate::Invariant { invariant, .. }) => assert_eq!(invariant, "growth degree"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quadratic_against_exponential() {
        let d = decide(&e1(), &e3(), &Budgets::default()).unwrap();
        assert!(matches!(d.verdict, Verdict::No(Certificate::Invariant { .. })));
        assert_eq!(d.branch, None);
    }

    #[test]
    fn relative_no_for_distinct_quadratics() {
        // same characteristic polynomial and growth: c ↦ c b vs c ↦ c b^2
        let psi = Automorphism::from_ints(&[&[1], &[2, 1], &[3, 2, 2]]);
        let b = Budgets::default();
        let d = decide(&e1(), &psi, &b).unwrap();
        assert_eq!(d.branch, Some(Branch::Quadratic));
        assert!(matches!(d.verdict, Verdict::No(Certificate::Relative { .. })), "{:?}", d.transcript);
        assert!(recheck(&e1(), &psi, &d, &b));
    }

    #[test]
    fn verdicts_are_symmetric() {
        let b = Budgets::default();
        let pairs = [
            (e1(), Automorphism::from_ints(&[&[1], &[2, 1], &[3, 1]])),
            (e3(), Automorphism::from_ints(&[&[1, 2], &[1], &[3, 2]])),
            (Automorphism::from_ints(&[&[1], &[2, 1], &[3]]), Automorphism::from_ints(&[&[1], &[2], &[3, 1]])),
        ];
        for (x, y) in pairs {
            let (d1, d2) = (decide(&x, &y, &b).unwrap(), decide(&y, &x, &b).unwrap());
            assert_eq!(d1.verdict.kind(), d2.verdict.kind(), "{x} {y}");
            assert!(recheck(&x, &y, &d1, &b) && recheck(&y, &x, &d2, &b));
        }
    }
}
