//! Filtrations, stratum labels, the train track checks used downstream and
//! the polynomial degree recursion.

use std::collections::HashSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::graph::GraphMap;
use crate::error::{CoreError, Result};
use crate::word::{Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumKind {
    Zero,
    Neg,
    Eg,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub edges: Vec<usize>,
    pub kind: StratumKind,
    /// Rows and columns indexed by `edges`.
    pub matrix: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strata {
    /// Bottom stratum first.
    pub strata: Vec<Stratum>,
    /// Stratum index of each edge.
    pub level: Vec<usize>,
}

impl Strata {
    pub fn eg_strata(&self) -> Vec<usize> {
        (0..self.strata.len()).filter(|&i| self.strata[i].kind == StratumKind::Eg).collect()
    }

    pub fn labels(&self) -> Vec<StratumKind> {
        self.strata.iter().map(|s| s.kind).collect()
    }
}

/// `M[i][j]` counts crossings of edge `i` by `f(E_j)`.
pub fn transition_matrix(f: &GraphMap) -> Vec<Vec<u64>> {
    let n = f.edge_count();
    let mut m = vec![vec![0u64; n]; n];
    for (j, img) in f.edge_images.iter().enumerate() {
        for l in img.letters() {
            m[l.index()][j] += 1;
        }
    }
    m
}

/// An irreducible nonnegative integer matrix has spectral radius 1 exactly
/// when it is a permutation matrix, i.e. when its entries sum to its size.
fn is_expanding(block: &[Vec<u64>]) -> bool {
    let total: u64 = block.iter().flatten().sum();
    total > block.len() as u64
}

pub fn analyze_strata(f: &GraphMap) -> Strata {
    let n = f.edge_count();
    let m = transition_matrix(f);
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<_> = (0..n).map(|i| g.add_node(i)).collect();
    for j in 0..n {
        for i in 0..n {
            if m[i][j] > 0 {
                g.add_edge(nodes[j], nodes[i], ());
            }
        }
    }
    // tarjan emits sink components first, which is bottom-up
    let mut strata = Vec::new();
    let mut level = vec![0; n];
    for comp in tarjan_scc(&g) {
        let mut edges: Vec<usize> = comp.iter().map(|&x| g[x]).collect();
        edges.sort_unstable();
        let matrix: Vec<Vec<u64>> = edges.iter().map(|&i| edges.iter().map(|&j| m[i][j]).collect()).collect();
        let kind = if edges.len() == 1 && matrix[0][0] == 0 {
            StratumKind::Zero
        } else if is_expanding(&matrix) {
            StratumKind::Eg
        } else {
            StratumKind::Neg
        };
        for &e in &edges {
            level[e] = strata.len();
        }
        strata.push(Stratum { edges, kind, matrix });
    }
    Strata { strata, level }
}

/// Power iteration on `M + I` (primitive when `M` is irreducible);
/// descriptive only.
pub fn spectral_radius_estimate(matrix: &[Vec<u64>]) -> f64 {
    let n = matrix.len();
    let mut v = vec![1.0f64; n];
    let mut lambda = 1.0;
    for _ in 0..500 {
        let w: Vec<f64> = (0..n).map(|i| v[i] + (0..n).map(|j| matrix[i][j] as f64 * v[j]).sum::<f64>()).collect();
        let norm = w.iter().cloned().fold(0.0, f64::max);
        lambda = norm / v.iter().cloned().fold(0.0, f64::max);
        v = w.iter().map(|x| x / norm).collect();
    }
    lambda - 1.0
}

/// `f(E) = u E v` with `u`, `v` in lower strata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegForm {
    pub edge: usize,
    pub prefix: Word,
    pub suffix: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RttReport {
    pub strata: Strata,
    pub eg_directions_preserved: bool,
    /// `(edge, d1, d2)`: an illegal turn of the stratum inside `f(edge)`.
    pub illegal_turns: Vec<(usize, i32, i32)>,
    pub neg_forms: Vec<NegForm>,
    /// NEG strata not of single-edge form.
    pub irregular_neg: Vec<usize>,
    pub valid: bool,
}

fn image_of_letter(f: &GraphMap, l: Letter) -> Word {
    let w = &f.edge_images[l.index()];
    if l.is_inverse() { w.inverse() } else { w.clone() }
}

fn df(f: &GraphMap, d: Letter) -> Letter {
    image_of_letter(f, d).first().expect("edge images are nontrivial")
}

fn is_illegal(f: &GraphMap, d1: Letter, d2: Letter) -> bool {
    let mut seen = HashSet::new();
    let (mut x, mut y) = (d1, d2);
    loop {
        if x == y {
            return true;
        }
        if !seen.insert((x, y)) {
            return false;
        }
        x = df(f, x);
        y = df(f, y);
    }
}

pub fn validate_rtt(f: &GraphMap) -> Result<RttReport> {
    f.validate()?;
    let strata = analyze_strata(f);
    let mut preserved = true;
    let mut illegal = Vec::new();
    let mut neg_forms = Vec::new();
    let mut irregular = Vec::new();
    for (r, s) in strata.strata.iter().enumerate() {
        match s.kind {
            StratumKind::Eg => {
                let inside = |l: Letter| strata.level[l.index()] == r;
                for &e in &s.edges {
                    for d in [Letter::gen(e), Letter::gen(e).inverse()] {
                        if !inside(df(f, d)) {
                            preserved = false;
                        }
                    }
                    let img = f.edge_images[e].letters();
                    for w in img.windows(2) {
                        if inside(w[0]) && inside(w[1]) && is_illegal(f, w[0].inverse(), w[1]) {
                            illegal.push((e, w[0].inverse().signed(), w[1].signed()));
                        }
                    }
                }
            }
            StratumKind::Neg => {
                let e = s.edges[0];
                let img = f.edge_images[e].letters();
                let hits: Vec<usize> = (0..img.len()).filter(|&k| strata.level[img[k].index()] == r).collect();
                if s.edges.len() == 1 && hits.len() == 1 && img[hits[0]] == Letter::gen(e) {
                    let k = hits[0];
                    neg_forms.push(NegForm {
                        edge: e,
                        prefix: Word::reduce(img[..k].iter().copied()),
                        suffix: Word::reduce(img[k + 1..].iter().copied()),
                    });
                } else {
                    irregular.push(r);
                }
            }
            StratumKind::Zero => {}
        }
    }
    let valid = preserved && illegal.is_empty() && irregular.is_empty();
    Ok(RttReport { strata, eg_directions_preserved: preserved, illegal_turns: illegal, neg_forms, irregular_neg: irregular, valid })
}

pub fn check_one_eg(f: &GraphMap) -> bool {
    analyze_strata(f).eg_strata().len() <= 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthType {
    Polynomial,
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub growth: GrowthType,
    pub degree: Option<u32>,
    /// `None` for edges that grow exponentially.
    pub edge_degrees: Vec<Option<u32>>,
    pub witness_stratum: Option<usize>,
}

/// Per-edge degrees from `deg(E) = 1 + deg(u v)` for `f(E) = u E v` with
/// `uv` nontrivial. A map inducing the trivial outer class reports degree 0.
pub fn growth_degrees(f: &GraphMap, report: &RttReport) -> Result<GrowthReport> {
    if !report.valid {
        return Err(CoreError::UnvalidatedInput("relative train track checks failed".into()));
    }
    let strata = &report.strata;
    let mut deg: Vec<Option<u32>> = vec![Some(0); f.edge_count()];
    let path_deg = |deg: &[Option<u32>], w: &Word| -> Option<u32> {
        w.letters().iter().try_fold(0u32, |acc, l| deg[l.index()].map(|d| acc.max(d)))
    };
    let mut witness = None;
    for (r, s) in strata.strata.iter().enumerate() {
        match s.kind {
            StratumKind::Eg => {
                witness.get_or_insert(r);
                for &e in &s.edges {
                    deg[e] = None;
                }
            }
            StratumKind::Zero => {
                let e = s.edges[0];
                deg[e] = path_deg(&deg, &f.edge_images[e]);
            }
            StratumKind::Neg => {
                let form = report.neg_forms.iter().find(|nf| nf.edge == s.edges[0]).expect("validated");
                deg[form.edge] = if form.prefix.is_identity() && form.suffix.is_identity() {
                    Some(0)
                } else {
                    let du = path_deg(&deg, &form.prefix);
                    let dv = path_deg(&deg, &form.suffix);
                    du.zip(dv).map(|(a, b)| 1 + a.max(b))
                };
            }
        }
    }
    if witness.is_some() {
        return Ok(GrowthReport { growth: GrowthType::Exponential, degree: None, edge_degrees: deg, witness_stratum: witness });
    }
    let trivial = f.induced_outer()?.is_inner();
    let degree = if trivial { 0 } else { deg.iter().map(|d| d.unwrap_or(0)).max().unwrap_or(0) };
    Ok(GrowthReport { growth: GrowthType::Polynomial, degree: Some(degree), edge_degrees: deg, witness_stratum: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{elementary, Automorphism};
    use crate::traintrack::graph::MarkedGraph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rose(images: &[&[i32]]) -> GraphMap {
        GraphMap::rose(&Automorphism::from_ints(images))
    }

    fn e1() -> GraphMap {
        rose(&[&[1], &[2, 1], &[3, 2]])
    }

    #[test]
    fn first_example_strata() {
        let s = analyze_strata(&e1());
        assert_eq!(s.labels(), vec![StratumKind::Neg; 3]);
        assert_eq!(s.strata.iter().map(|x| x.edges.clone()).collect::<Vec<_>>(), vec![vec![0], vec![1], vec![2]]);
        assert!(check_one_eg(&e1()));
    }

    #[test]
    fn golden_rose_is_eg() {
        let s = analyze_strata(&rose(&[&[1, 2], &[1]]));
        assert_eq!(s.labels(), vec![StratumKind::Eg]);
        assert_eq!(s.strata[0].matrix, vec![vec![1, 1], vec![1, 0]]);
        let lambda = spectral_radius_estimate(&s.strata[0].matrix);
        assert!((lambda - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn identity_is_all_neg() {
        let f = GraphMap::rose(&Automorphism::identity(3));
        assert_eq!(analyze_strata(&f).labels(), vec![StratumKind::Neg; 3]);
        let r = validate_rtt(&f).unwrap();
        let g = growth_degrees(&f, &r).unwrap();
        assert_eq!(g.degree, Some(0));
    }

    #[test]
    fn permutation_stratum_is_neg() {
        let s = analyze_strata(&rose(&[&[2], &[1], &[3]]));
        assert_eq!(s.labels(), vec![StratumKind::Neg; 2]);
    }

    #[test]
    fn one_eg_with_a_neg_edge_above() {
        let f = rose(&[&[1, 2], &[1], &[3, 1]]);
        let s = analyze_strata(&f);
        assert_eq!(s.eg_strata().len(), 1);
        assert_eq!(s.labels(), vec![StratumKind::Eg, StratumKind::Neg]);
        let r = validate_rtt(&f).unwrap();
        assert!(r.valid, "{r:?}");
        let g = growth_degrees(&f, &r).unwrap();
        assert_eq!(g.growth, GrowthType::Exponential);
        assert_eq!(g.witness_stratum, Some(0));
    }

    #[test]
    fn first_example_degrees() {
        let f = e1();
        let r = validate_rtt(&f).unwrap();
        assert!(r.valid);
        let g = growth_degrees(&f, &r).unwrap();
        assert_eq!(g.edge_degrees, vec![Some(0), Some(1), Some(2)]);
        assert_eq!(g.degree, Some(2));
    }

    #[test]
    fn linear_example_degrees() {
        let f = rose(&[&[1], &[2, 1], &[3]]);
        let g = growth_degrees(&f, &validate_rtt(&f).unwrap()).unwrap();
        assert_eq!(g.edge_degrees, vec![Some(0), Some(1), Some(0)]);
        assert_eq!(g.degree, Some(1));
    }

    #[test]
    fn inner_map_has_degree_zero() {
        // conjugation by a: the edges b and c grow linearly as paths only
        let f = GraphMap::rose(&Automorphism::inner(&Word::gen(0), 3));
        let r = validate_rtt(&f).unwrap();
        let g = growth_degrees(&f, &r).unwrap();
        assert_eq!(g.edge_degrees[1], Some(1));
        assert_eq!(g.degree, Some(0));
    }

    #[test]
    fn illegal_turn_detected() {
        let f = rose(&[&[1, 2], &[1], &[3]]);
        assert!(validate_rtt(&f).unwrap().valid);
        // f(a) = B a C B and f(b) = B a C: the turn (b, a) goes to (B, B)
        let g = rose(&[&[-2, 1, -3, -2], &[-2, 1, -3], &[3]]);
        let r = validate_rtt(&g).unwrap();
        assert_eq!(r.strata.eg_strata().len(), 1);
        assert!(!r.valid);
        assert_eq!(r.illegal_turns, vec![(0, 2, 1), (1, 2, 1)]);
    }

    #[test]
    fn filtration_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let phi = elementary::random_word(3, 6, |n| rng.gen_range(0..n));
            let f = GraphMap::rose(&phi);
            let s = analyze_strata(&f);
            for (e, img) in f.edge_images.iter().enumerate() {
                assert!(img.letters().iter().all(|l| s.level[l.index()] <= s.level[e]));
            }
        }
    }

    #[test]
    fn labels_survive_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let perm = Automorphism::signed_permutation(&[2, 0, 1], &[false, true, false]);
        for _ in 0..100 {
            let phi = elementary::random_word(3, 5, |n| rng.gen_range(0..n));
            let psi = phi.conjugate_by(&perm);
            let mut a = analyze_strata(&GraphMap::rose(&phi)).labels();
            let mut b = analyze_strata(&GraphMap::rose(&psi)).labels();
            a.sort_by_key(|k| *k as u8);
            b.sort_by_key(|k| *k as u8);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn never_two_eg_strata_in_rank_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10_000 {
            let len = rng.gen_range(1..10);
            let phi = elementary::random_word(3, len, |n| rng.gen_range(0..n));
            assert!(check_one_eg(&GraphMap::rose(&phi)), "{phi:?}");
        }
    }

    #[test]
    fn non_rose_graph() {
        // theta graph with the edges e1, e2 swapped: all strata NEG, degree 0
        let g = MarkedGraph { vertex_count: 2, edges: vec![(0, 1); 3], tree: vec![0] };
        let f = GraphMap { graph: g, vertex_map: vec![0, 1], edge_images: vec![Word::gen(0), Word::gen(2), Word::gen(1)] };
        let s = analyze_strata(&f);
        assert!(s.eg_strata().is_empty());
    }
}
