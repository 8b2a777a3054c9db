//! Growth classification: the abelianization test, rose representatives
//! found by basis changes, and measured growth of conjugacy lengths.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::graph::GraphMap;
use super::strata::{growth_degrees, validate_rtt, GrowthReport, GrowthType, RttReport};
use crate::automorphism::{words_of_length, Automorphism};
use crate::matrix::IMat;
use crate::whitehead::enumerate_whitehead;
use crate::word::Word;

const POWERS: [u32; 6] = [1, 2, 3, 4, 6, 12];

/// Smallest `p` with `M^p` unipotent. `None` means some eigenvalue is not a
/// root of unity, so (Kronecker) the spectral radius exceeds one.
pub fn unipotent_power(m: &IMat) -> Option<u32> {
    POWERS.into_iter().find(|&p| m.checked_pow(p).is_some_and(|q| q.is_unipotent()))
}

pub const LENGTH_CAP: usize = 200_000;

pub fn test_classes(rank: usize) -> Vec<Word> {
    let mut out: Vec<Word> = words_of_length(rank, 1);
    out.extend(words_of_length(rank, 2).into_iter().filter(|w| w.is_cyclically_reduced()));
    let all: Word = Word::reduce((0..rank).map(crate::word::Letter::gen));
    out.push(all);
    if rank >= 2 {
        out.push(Word::from_ints(&[1, 1, 2]));
        out.push(Word::from_ints(&[1, 2, -1, -2]));
    }
    if rank >= 3 {
        out.push(Word::from_ints(&[1, -2, 3]));
        out.push(Word::from_ints(&[1, 2, -3]));
    }
    out
}

/// Cyclic lengths of `wφ^k` for `k = 0..=iterations`; `None` past the cap.
pub fn class_lengths(phi: &Automorphism, w: &Word, iterations: usize) -> Option<Vec<usize>> {
    let mut cur = w.cyclic_core().0;
    let mut out = vec![cur.len()];
    for _ in 0..iterations {
        cur = phi.apply(&cur).cyclic_core().0;
        if cur.len() > LENGTH_CAP {
            return None;
        }
        out.push(cur.len());
    }
    Some(out)
}

/// Smallest `d ≤ 3` whose `(d+1)`-st difference vanishes on the last seven terms.
pub fn fitted_degree(seq: &[usize]) -> Option<u32> {
    let tail: Vec<i64> = seq[seq.len().saturating_sub(7)..].iter().map(|&x| x as i64).collect();
    let mut diff = tail;
    for d in 0..=3u32 {
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
        if diff.is_empty() {
            return None;
        }
        if diff.iter().all(|&x| x == 0) {
            return Some(d);
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "degree")]
pub enum Measured {
    Polynomial(u32),
    Exponential,
}

/// Measured growth over the test classes: the largest fitted degree, or
/// exponential when some class overflows or fits no low-degree polynomial.
pub fn empirical_growth(phi: &Automorphism, iterations: usize) -> Measured {
    let mut best = 0;
    for w in test_classes(phi.rank()) {
        match class_lengths(phi, &w, iterations).and_then(|s| fitted_degree(&s)) {
            Some(d) => best = best.max(d),
            None => return Measured::Exponential,
        }
    }
    Measured::Polynomial(best)
}

/// Basis changes `χ` tried while looking for a train track on the rose,
/// paired with the inner-normalized `χ^-1 φ χ`. Greedy descent in size,
/// then the one-move neighbourhood of the end point.
pub fn rose_candidates(phi: &Automorphism, limit: usize) -> Vec<(Automorphism, Automorphism)> {
    let rank = phi.rank();
    let moves = enumerate_whitehead(rank);
    let norm = |chi: &Automorphism| phi.conjugate_by(chi).inner_normalize().0;
    let mut chi = Automorphism::identity(rank);
    let mut cur = norm(&chi);
    let mut out = vec![(chi.clone(), cur.clone())];
    let mut seen: HashSet<Automorphism> = HashSet::from([cur.clone()]);
    loop {
        let mut best: Option<(usize, Automorphism, Automorphism)> = None;
        for m in &moves {
            let c = chi.then(&m.automorphism);
            let a = norm(&c);
            if a.size() < cur.size() && best.as_ref().map_or(true, |b| a.size() < b.0) {
                best = Some((a.size(), c, a));
            }
        }
        match best {
            Some((_, c, a)) => {
                chi = c;
                cur = a;
                if seen.insert(cur.clone()) {
                    out.push((chi.clone(), cur.clone()));
                }
            }
            None => break,
        }
    }
    for m in &moves {
        if out.len() >= limit {
            break;
        }
        let c = chi.then(&m.automorphism);
        let a = norm(&c);
        if a.size() <= cur.size() + 2 && seen.insert(a.clone()) {
            out.push((c, a));
        }
    }
    out.truncate(limit);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthSource {
    /// Abelianization has an eigenvalue off the unit circle.
    Matrix,
    /// Rose train track with an EG stratum, confirmed by measurement.
    TrainTrack,
    /// Degree recursion on a validated rose map, confirmed by measurement.
    Recursion,
    /// Measurement alone.
    Measured,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthClass {
    pub growth: GrowthType,
    pub degree: Option<u32>,
    /// Exact when true; otherwise usable for routing only.
    pub verified: bool,
    pub source: GrowthSource,
    /// Power taken to make the abelianization unipotent.
    pub power: Option<u32>,
    /// Validated rose representative of the power, in the basis `chi`.
    pub representative: Option<Representative>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representative {
    pub chi: Automorphism,
    pub map: GraphMap,
    pub rtt: RttReport,
    pub report: GrowthReport,
}

pub const MEASURE_ITERATIONS: usize = 12;

pub fn classify_growth(phi: &Automorphism) -> GrowthClass {
    let Some(p) = unipotent_power(&phi.matrix()) else {
        return GrowthClass {
            growth: GrowthType::Exponential,
            degree: None,
            verified: true,
            source: GrowthSource::Matrix,
            power: None,
            representative: None,
        };
    };
    let psi = phi.pow(p as i64);
    let measured = empirical_growth(&psi, MEASURE_ITERATIONS);
    for (chi, a) in rose_candidates(&psi, 64) {
        let map = GraphMap::rose(&a);
        let Ok(rtt) = validate_rtt(&map) else { continue };
        if !rtt.valid {
            continue;
        }
        let Ok(report) = growth_degrees(&map, &rtt) else { continue };
        let agrees = match (report.growth, measured) {
            (GrowthType::Exponential, Measured::Exponential) => true,
            (GrowthType::Polynomial, Measured::Polynomial(d)) => report.degree == Some(d),
            _ => false,
        };
        if !agrees {
            continue;
        }
        let source = if report.growth == GrowthType::Exponential { GrowthSource::TrainTrack } else { GrowthSource::Recursion };
        return GrowthClass {
            growth: report.growth,
            degree: report.degree,
            verified: true,
            source,
            power: Some(p),
            representative: Some(Representative { chi, map, rtt, report }),
        };
    }
    let (growth, degree) = match measured {
        Measured::Polynomial(d) => (GrowthType::Polynomial, Some(d)),
        Measured::Exponential => (GrowthType::Exponential, None),
    };
    GrowthClass { growth, degree, verified: false, source: GrowthSource::Measured, power: Some(p), representative: None }
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
    fn unipotent_powers() {
        assert_eq!(unipotent_power(&e1().matrix()), Some(1));
        let rot = Automorphism::from_ints(&[&[2], &[-1], &[3]]);
        assert_eq!(unipotent_power(&rot.matrix()), Some(4));
        let golden = Automorphism::from_ints(&[&[1, 2], &[1], &[3]]);
        assert_eq!(unipotent_power(&golden.matrix()), None);
        let order_three = Automorphism::from_ints(&[&[2], &[3], &[1]]);
        assert_eq!(unipotent_power(&order_three.matrix()), Some(3));
    }

    #[test]
    fn fitted_degrees() {
        assert_eq!(fitted_degree(&[3; 13]), Some(0));
        let lin: Vec<usize> = (0..13).map(|k| 2 * k + 1).collect();
        assert_eq!(fitted_degree(&lin), Some(1));
        let quad: Vec<usize> = (0..13).map(|k| k * (k + 1) / 2 + 1).collect();
        assert_eq!(fitted_degree(&quad), Some(2));
        let exp: Vec<usize> = (0..13).map(|k| 1usize << k).collect();
        assert_eq!(fitted_degree(&exp), None);
    }

    #[test]
    fn first_example_lengths() {
        // c φ^k = c b a^{k-1} ... b a b has length 1 + k + k(k-1)/2 + ... : quadratic
        let s = class_lengths(&e1(), &Word::gen(2), 12).unwrap();
        assert_eq!(fitted_degree(&s), Some(2));
        assert_eq!(empirical_growth(&e1(), 12), Measured::Polynomial(2));
    }

    #[test]
    fn first_example_classified_exactly() {
        let g = classify_growth(&e1());
        assert_eq!((g.growth, g.degree, g.verified), (GrowthType::Polynomial, Some(2), true));
        let rep = g.representative.unwrap();
        assert_eq!(rep.report.edge_degrees, vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn conjugates_of_first_example() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let len = rng.gen_range(1..=3);
            let chi = elementary::random_word(3, len, |n| rng.gen_range(0..n));
            let g = classify_growth(&e1().conjugate_by(&chi));
            assert_eq!((g.growth, g.degree), (GrowthType::Polynomial, Some(2)), "{chi:?}");
            assert!(g.verified, "{chi:?}");
        }
    }

    #[test]
    fn exponential_examples() {
        let g = classify_growth(&Automorphism::from_ints(&[&[1, 2], &[1], &[3, 1]]));
        assert_eq!((g.growth, g.verified, g.source), (GrowthType::Exponential, true, GrowthSource::Matrix));
        // twice-punctured torus, positive twists on two parallel curves and a negative one across
        let pa = Automorphism::from_ints(&[&[1, 2], &[3, 1, 2, 2, 1, 2], &[3]]);
        let g = classify_growth(&pa);
        assert_eq!((g.growth, g.verified, g.source), (GrowthType::Exponential, true, GrowthSource::Matrix));
        // opposite twists on the parallel curves: abelianization is unipotent, growth is not
        let blind = Automorphism::from_ints(&[&[1, 2], &[3, 1, 2, -1], &[3]]);
        assert!(blind.matrix().is_unipotent());
        let g = classify_growth(&blind);
        assert_eq!(g.growth, GrowthType::Exponential);
        assert_eq!(g.power, Some(1));
    }

    #[test]
    fn identity_and_inner() {
        let g = classify_growth(&Automorphism::identity(3));
        assert_eq!((g.degree, g.verified), (Some(0), true));
        let g = classify_growth(&Automorphism::inner(&Word::from_ints(&[1, 2]), 3));
        assert_eq!((g.degree, g.verified), (Some(0), true));
    }

    #[test]
    fn linear_examples() {
        let g = classify_growth(&Automorphism::from_ints(&[&[1], &[2, 1], &[3]]));
        assert_eq!((g.degree, g.verified), (Some(1), true));
        // Dehn twist on a separating commutator
        let g = classify_growth(&Automorphism::from_ints(&[&[1], &[2], &[3, 1, 2, -1, -2]]));
        assert_eq!((g.growth, g.degree), (GrowthType::Polynomial, Some(1)));
    }
}
