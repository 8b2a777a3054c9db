//! `Out(F_3, K)` for `K = <a, b>`, as triples `(ε, χ_0, g)` standing for
//! `a -> aχ_0, b -> bχ_0, c -> g c^ε`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automorphism::Automorphism;
use crate::error::{CoreError, Result};
use crate::folding::FoldedGraph;
use crate::outf2::{
    aut_f2_conjugate, centralizer_cosets, classify, gl2z_conjugate, lift_matrix, to_gl2z, AutF2Certificate, Gl2Certificate,
};
use crate::twisted::{twisted_conjugate, TwistedBudget, TwistedNo};
use crate::verdict::Verdict;
use crate::word::{Letter, Word};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub epsilon: i8,
    pub chi0: Automorphism,
    pub g: Word,
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.epsilon, self.chi0, self.g)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn ad(g: &Word) -> Automorphism {
    Automorphism::inner(g, 2)
}

impl Triple {
    pub fn new(epsilon: i8, chi0: Automorphism, g: Word) -> Result<Triple> {
        if epsilon.abs() != 1 {
            return Err(CoreError::Unsupported(format!("epsilon must be ±1, got {epsilon}")));
        }
        if chi0.rank() != 2 || g.max_index().is_some_and(|m| m >= 2) {
            return Err(CoreError::RankMismatch(chi0.rank(), 2));
        }
        Ok(Triple { epsilon, chi0, g })
    }

    pub fn identity() -> Triple {
        Triple { epsilon: 1, chi0: Automorphism::identity(2), g: Word::identity() }
    }

    /// The lift of the `C_2` factor: `c -> c^-1`.
    pub fn involution() -> Triple {
        Triple { epsilon: -1, chi0: Automorphism::identity(2), g: Word::identity() }
    }

    pub fn inner_part(h: &Word) -> Triple {
        Triple { epsilon: 1, chi0: Automorphism::identity(2), g: h.clone() }
    }

    pub fn aut_part(chi0: &Automorphism) -> Triple {
        Triple { epsilon: 1, chi0: chi0.clone(), g: Word::identity() }
    }

    /// `self` then `other`.
    pub fn then(&self, other: &Triple) -> Triple {
        let gp = other.chi0.apply(&self.g);
        let chi = self.chi0.then(&other.chi0);
        if self.epsilon == 1 {
            Triple { epsilon: other.epsilon, chi0: chi, g: gp.mul(&other.g) }
        } else {
            // c -> (gψ0) c^{-ε2} v^-1, then conjugate by v
            Triple { epsilon: -other.epsilon, chi0: chi.then(&ad(&other.g)), g: other.g.inverse().mul(&gp) }
        }
    }

    pub fn inverse(&self) -> Triple {
        let ci = self.chi0.inverse();
        let v = ci.apply(&self.g);
        if self.epsilon == 1 {
            Triple { epsilon: 1, chi0: ci, g: v.inverse() }
        } else {
            Triple { epsilon: -1, chi0: ci.then(&ad(&v.inverse())), g: v }
        }
    }

    /// `χ^-1 Φ χ`.
    pub fn conjugate_by(&self, chi: &Triple) -> Triple {
        let out = if chi.epsilon == 1 {
            let (chi0, h) = (&chi.chi0, &chi.g);
            let phi_c = self.chi0.conjugate_by(chi0);
            let uc = chi0.apply(&self.g);
            let hi = h.inverse();
            if self.epsilon == 1 {
                Triple { epsilon: 1, chi0: phi_c.clone(), g: phi_c.apply(&hi).mul(&uc).mul(h) }
            } else {
                Triple { epsilon: -1, chi0: phi_c.then(&ad(h)), g: hi.mul(&phi_c.apply(&hi)).mul(&uc) }
            }
        } else {
            chi.inverse().then(self).then(chi)
        };
        if cfg!(debug_assertions) {
            let direct = chi.to_automorphism().inverse().then(&self.to_automorphism()).then(&chi.to_automorphism());
            debug_assert_eq!(to_triple(&direct).as_ref(), Ok(&out), "conjugation formula disagrees with Aut(F3)");
        }
        out
    }

    pub fn to_automorphism(&self) -> Automorphism {
        from_triple(self)
    }
}

pub fn from_triple(t: &Triple) -> Automorphism {
    let c = Word::gen(2);
    let cc = if t.epsilon == 1 { c } else { c.inverse() };
    let mut images: Vec<Word> = t.chi0.images().to_vec();
    images.push(t.g.mul(&cc));
    Automorphism::new_unchecked(images)
}

/// The unique triple in the outer class of `φ`. Errors when no
/// representative preserves `<a, b>`.
pub fn to_triple(phi: &Automorphism) -> Result<Triple> {
    if phi.rank() != 3 {
        return Err(CoreError::RankMismatch(phi.rank(), 3));
    }
    let gens = [phi.image(0).clone(), phi.image(1).clone()];
    let (_, p) = FoldedGraph::from_generators(&gens, 3).core();
    let phi1 = phi.then(&Automorphism::inner(&p, 3));
    let ab: Vec<Word> = (0..2).map(|i| phi1.image(i).clone()).collect();
    if ab.iter().any(|w| w.uses(2)) || !FoldedGraph::from_generators(&ab, 2).is_whole_group() {
        return Err(CoreError::NotPreservingFactor);
    }
    let cw = phi1.image(2);
    let pos: Vec<usize> = cw.letters().iter().enumerate().filter(|(_, l)| l.index() == 2).map(|(i, _)| i).collect();
    if pos.len() != 1 {
        return Err(CoreError::NotPreservingFactor);
    }
    let k1 = cw.prefix(pos[0]);
    let k2 = cw.suffix_from(pos[0] + 1);
    let epsilon = if cw.letters()[pos[0]] == Letter::gen(2) { 1 } else { -1 };
    // conjugate by k2^-1: c -> k2 k1 c^ε
    let s = k2.inverse();
    let chi0 = Automorphism::new_unchecked(ab.iter().map(|w| w.conjugate_by(&s)).collect());
    Ok(Triple { epsilon, chi0, g: k2.mul(&k1) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CosetNo {
    /// The restrictions to `K` are not conjugate in `Aut(F_2)`.
    AutClass { certificate: AutF2Certificate },
    /// The restrictions to `K` are not conjugate in `Out(F_2)`.
    OutClass { certificate: Gl2Certificate },
    /// Every residual twisted instance is obstructed.
    Twisted { instances: Vec<TwistedNo> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum F3KCertificate {
    EpsilonMismatch { left: i8, right: i8 },
    /// Conjugators with `ε = 1`, tried from `Φ` and from `Φ` conjugated by the involution.
    Cosets { direct: CosetNo, involuted: CosetNo },
}

fn check_hypothesis(t: &Triple) -> Result<()> {
    if classify(&to_gl2z(&t.chi0)?).is_finite() {
        return Err(CoreError::FiniteOrderRestriction);
    }
    Ok(())
}

/// Decides whether `χ^-1 Φ χ = Ψ` for some triple `χ`.
pub fn decide_conjugacy_f3k(phi: &Triple, psi: &Triple, budget: &TwistedBudget) -> Result<Verdict<Triple, F3KCertificate>> {
    check_hypothesis(phi)?;
    check_hypothesis(psi)?;
    if phi.epsilon != psi.epsilon {
        return Ok(Verdict::No(F3KCertificate::EpsilonMismatch { left: phi.epsilon, right: psi.epsilon }));
    }
    let sigma = Triple::involution();
    let direct = decide_positive(phi, psi, budget);
    let direct = match direct {
        Verdict::Yes(chi) => return Ok(Verdict::Yes(chi)),
        Verdict::No(n) => Some(n),
        Verdict::Unknown(_) => None,
    };
    let phi_s = phi.conjugate_by(&sigma);
    let inv = decide_positive(&phi_s, psi, budget);
    Ok(match (direct, inv) {
        (_, Verdict::Yes(chi)) => Verdict::Yes(sigma.then(&chi)),
        (Some(d), Verdict::No(i)) => Verdict::No(F3KCertificate::Cosets { direct: d, involuted: i }),
        (_, Verdict::Unknown(r)) => Verdict::Unknown(r),
        (None, Verdict::No(_)) => Verdict::Unknown("direct coset undecided".into()),
    })
}

/// Conjugators with `ε_3 = 1`.
fn decide_positive(phi: &Triple, psi: &Triple, budget: &TwistedBudget) -> Verdict<Triple, CosetNo> {
    let found = if phi.epsilon == 1 { positive_case(phi, psi, budget) } else { negative_case(phi, psi, budget) };
    if let Verdict::Yes(chi) = &found {
        if phi.conjugate_by(chi) != *psi {
            return Verdict::Unknown("conjugator failed verification".into());
        }
    }
    found
}

fn aggregate(results: Vec<Verdict<Triple, TwistedNo>>) -> Verdict<Triple, CosetNo> {
    let mut nos = Vec::new();
    let mut unknown = None;
    for r in results {
        match r {
            Verdict::Yes(chi) => return Verdict::Yes(chi),
            Verdict::No(n) => nos.push(n),
            Verdict::Unknown(r) => unknown = Some(r),
        }
    }
    match unknown {
        Some(r) => Verdict::Unknown(r),
        None => Verdict::No(CosetNo::Twisted { instances: nos }),
    }
}

fn positive_case(phi: &Triple, psi: &Triple, budget: &TwistedBudget) -> Verdict<Triple, CosetNo> {
    let chi1 = match aut_f2_conjugate(&phi.chi0, &psi.chi0, budget) {
        Verdict::Yes(c) => c,
        Verdict::No(cert) => return Verdict::No(CosetNo::AutClass { certificate: cert }),
        Verdict::Unknown(r) => return Verdict::Unknown(r),
    };
    let step1 = Triple::aut_part(&chi1);
    let phi1 = phi.conjugate_by(&step1);
    debug_assert_eq!(phi1.chi0, psi.chi0);
    let phi0 = &psi.chi0;
    let reps = match centralizer_cosets(&to_gl2z(phi0).expect("rank 2")) {
        Ok(d) => d.representatives,
        Err(e) => return Verdict::Unknown(e.to_string()),
    };
    let mut results = Vec::new();
    for r in reps {
        let rho = lift_matrix(&r.to_imat()).expect("unimodular");
        let w = phi0.conjugate_by(&rho).outer_difference(phi0).expect("centralizes in Out");
        // ρ Ad(h') centralizes φ0 iff w ~ 1 with witness h'
        let hp = match twisted_conjugate(phi0, &w, &Word::identity(), budget) {
            Verdict::Yes(hp) => hp,
            // this coset meets no strict centralizer element
            Verdict::No(_) => continue,
            Verdict::Unknown(r) => {
                results.push(Verdict::Unknown(r));
                continue;
            }
        };
        let c = rho.then(&ad(&hp));
        debug_assert_eq!(phi0.conjugate_by(&c), *phi0);
        let u = c.apply(&phi1.g);
        // need v = (h^-1 φ0) u h, i.e. v = (wφ0) u w^-1 with w = h^-1
        let res = twisted_conjugate(phi0, &psi.g, &u, budget)
            .map_yes(|w| step1.then(&Triple::aut_part(&c)).then(&Triple::inner_part(&w.inverse())));
        results.push(res);
    }
    aggregate(results)
}

fn negative_case(phi: &Triple, psi: &Triple, budget: &TwistedBudget) -> Verdict<Triple, CosetNo> {
    let (m, n) = (to_gl2z(&phi.chi0).expect("rank 2"), to_gl2z(&psi.chi0).expect("rank 2"));
    let c = match gl2z_conjugate(&m, &n) {
        Verdict::Yes(c) => c,
        Verdict::No(cert) => return Verdict::No(CosetNo::OutClass { certificate: cert }),
        Verdict::Unknown(r) => return Verdict::Unknown(r),
    };
    let chi1 = lift_matrix(&c.to_imat()).expect("unimodular");
    let z = phi.chi0.conjugate_by(&chi1).outer_difference(&psi.chi0).expect("same outer class");
    let step1 = Triple { epsilon: 1, chi0: chi1, g: z.inverse() };
    let phi1 = phi.conjugate_by(&step1);
    debug_assert_eq!(phi1.chi0, psi.chi0);
    let phi0 = &psi.chi0;
    let phi0_sq = phi0.then(phi0);
    let reps = match centralizer_cosets(&n) {
        Ok(d) => d.representatives,
        Err(e) => return Verdict::Unknown(e.to_string()),
    };
    let mut results = Vec::new();
    for r in reps {
        let rho = lift_matrix(&r.to_imat()).expect("unimodular");
        let w = phi0.conjugate_by(&rho).outer_difference(phi0).expect("centralizes in Out");
        let step2 = Triple { epsilon: 1, chi0: rho, g: w.inverse() };
        let phi_r = phi1.conjugate_by(&step2);
        debug_assert_eq!(phi_r.chi0, *phi0);
        for k in 0..2 {
            let y = phi0.pow(k).apply(&phi_r.g);
            // v = (x^-1 φ0^2)(u φ0^k) x: twisted for φ0^2 with witness x^-1
            let res = twisted_conjugate(&phi0_sq, &psi.g, &y, budget).map_yes(|wit| {
                let x = wit.inverse();
                let chi0 = phi0.pow(k).then(&ad(&x));
                let h = x.inverse().mul(&phi0.apply(&x));
                step1.then(&step2).then(&Triple { epsilon: 1, chi0, g: h })
            });
            results.push(res);
        }
    }
    aggregate(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::elementary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn aut(images: &[&[i32]]) -> Automorphism {
        Automorphism::from_ints(images)
    }

    fn w(v: &[i32]) -> Word {
        Word::from_ints(v)
    }

    fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
        let raw: Vec<i32> = (0..len).map(|_| if rng.gen_bool(0.5) { rng.gen_range(1..=2) } else { -rng.gen_range(1..=2) }).collect();
        Word::from_ints(&raw)
    }

    fn random_triple(rng: &mut ChaCha8Rng, len: usize) -> Triple {
        let chi0 = elementary::random_word(2, len, |n| rng.gen_range(0..n));
        let eps = if rng.gen_bool(0.5) { 1 } else { -1 };
        Triple::new(eps, chi0, random_word(rng, 3)).unwrap()
    }

    #[test]
    fn triple_of_worked_example() {
        let phi = aut(&[&[1], &[2, 1], &[3, 2]]);
        let t = to_triple(&phi).unwrap();
        assert_eq!(t.epsilon, 1);
        assert_eq!(t.g, w(&[2]));
        assert_eq!(t.chi0, aut(&[&[2, 1, -2], &[2, 2, 1, -2]]));
        assert!(from_triple(&t).outer_equal(&phi));
    }

    #[test]
    fn trivial_triples() {
        assert_eq!(to_triple(&Automorphism::identity(3)).unwrap(), Triple::identity());
        assert_eq!(to_triple(&aut(&[&[1], &[2], &[-3]])).unwrap(), Triple::involution());
        assert_eq!(Triple::involution().then(&Triple::involution()), Triple::identity());
    }

    #[test]
    fn conjugated_factor_is_found() {
        // (a -> c a c^-1, b -> c b c^-1, c -> c): inner, so the identity triple
        let phi = aut(&[&[3, 1, -3], &[3, 2, -3], &[3]]);
        assert_eq!(to_triple(&phi).unwrap(), Triple::identity());
        assert_eq!(to_triple(&aut(&[&[1, 3], &[2], &[3]])), Err(CoreError::NotPreservingFactor));
    }

    #[test]
    fn positive_row_with_inner_conjugator() {
        let phi0 = aut(&[&[1, 2], &[2, 1, 2]]);
        let u = w(&[1, -2]);
        let h = w(&[2, 1]);
        let t = Triple::new(1, phi0.clone(), u.clone()).unwrap();
        let got = t.conjugate_by(&Triple::inner_part(&h));
        let expect = phi0.apply(&h.inverse()).mul(&u).mul(&h);
        assert_eq!(got, Triple::new(1, phi0, expect).unwrap());
    }

    #[test]
    fn negative_row_second_entry() {
        let phi0 = aut(&[&[1, 2], &[2, 1, 2]]);
        let t = Triple::new(-1, phi0.clone(), w(&[1])).unwrap();
        for h in [w(&[2]), w(&[1, -2, 1])] {
            let got = t.conjugate_by(&Triple::inner_part(&h));
            assert_eq!(got.chi0, phi0.then(&ad(&h)));
        }
    }

    #[test]
    fn group_laws_against_aut_f3() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let t1 = random_triple(&mut rng, 3);
            let t2 = random_triple(&mut rng, 3);
            let direct = to_triple(&from_triple(&t1).then(&from_triple(&t2))).unwrap();
            assert_eq!(t1.then(&t2), direct);
            assert_eq!(t1.then(&t1.inverse()), Triple::identity());
            assert_eq!(to_triple(&from_triple(&t1)).unwrap(), t1);
        }
    }

    #[test]
    fn conjugation_is_an_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let phi = random_triple(&mut rng, 3);
            let c1 = random_triple(&mut rng, 2);
            let c2 = random_triple(&mut rng, 2);
            assert_eq!(phi.conjugate_by(&c1.then(&c2)), phi.conjugate_by(&c1).conjugate_by(&c2));
        }
    }

    #[test]
    fn epsilon_mismatch() {
        let phi0 = aut(&[&[1, 2], &[2, 1, 2]]);
        let u = w(&[1]);
        let a = Triple::new(1, phi0.clone(), u.clone()).unwrap();
        let b = Triple::new(-1, phi0, u).unwrap();
        let v = decide_conjugacy_f3k(&a, &b, &TwistedBudget::default()).unwrap();
        assert_eq!(v, Verdict::No(F3KCertificate::EpsilonMismatch { left: 1, right: -1 }));
    }

    #[test]
    fn finite_order_restriction_rejected() {
        let t = Triple::new(1, aut(&[&[2], &[1]]), w(&[1])).unwrap();
        assert_eq!(decide_conjugacy_f3k(&t, &t, &TwistedBudget::default()), Err(CoreError::FiniteOrderRestriction));
    }

    #[test]
    fn unipotent_trivial_versus_a() {
        // Abelianly fine, but in the Heisenberg quotient mod 3 every w with
        // b-exponent 1 gives (wφ0) w^-1 = a [a,b]^-1, never a.
        let phi0 = aut(&[&[1], &[2, 1]]);
        let p = Triple::new(1, phi0.clone(), Word::identity()).unwrap();
        let q = Triple::new(1, phi0.clone(), w(&[1])).unwrap();
        let quotient = crate::twisted::nilpotent::NilQuotient::new(2, 3, 2).unwrap();
        assert!(!crate::twisted::nilpotent::twisted_in_quotient(&quotient, &phi0, &w(&[1]), &Word::identity()));
        match decide_conjugacy_f3k(&p, &q, &TwistedBudget::default()).unwrap() {
            Verdict::No(F3KCertificate::Cosets { direct, involuted }) => {
                for c in [direct, involuted] {
                    assert!(matches!(c, CosetNo::Twisted { ref instances } if !instances.is_empty()), "{c:?}");
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn planted_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let budget = TwistedBudget::default();
        let mut done = 0;
        while done < 12 {
            let phi = random_triple(&mut rng, 4);
            if classify(&to_gl2z(&phi.chi0).unwrap()).is_finite() {
                continue;
            }
            let chi = random_triple(&mut rng, 2);
            let psi = phi.conjugate_by(&chi);
            match decide_conjugacy_f3k(&phi, &psi, &budget).unwrap() {
                Verdict::Yes(c) => assert_eq!(phi.conjugate_by(&c), psi),
                other => panic!("{phi:?} {psi:?}: {other:?}"),
            }
            done += 1;
        }
    }
}
