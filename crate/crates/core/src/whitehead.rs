//! Whitehead moves, length minimization of tuples of conjugacy classes,
//! primitivity and free factor support.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::automorphism::Automorphism;
use crate::error::{CoreError, Result};
use crate::folding::FoldedGraph;
use crate::verdict::Verdict;
use crate::word::{CyclicWord, Letter, Word};

pub const DEFAULT_NODE_BUDGET: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveKind {
    /// Generator `i` goes to `gen(perm[i])`, inverted when `inverted[i]`.
    Permutation { perm: Vec<usize>, inverted: Vec<bool> },
    /// Fixes the multiplier `x`; every other generator `y` goes to one of
    /// `y`, `yx`, `x^-1 y`, `x^-1 y x` (choice 0..4).
    Multiplier { x: Letter, choices: Vec<u8> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhiteheadMove {
    pub kind: MoveKind,
    pub automorphism: Automorphism,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Signed permutations, then multiplier moves, without repeats.
pub fn enumerate_whitehead(rank: usize) -> Vec<WhiteheadMove> {
    let mut out: Vec<WhiteheadMove> = Vec::new();
    let mut seen: HashSet<Automorphism> = HashSet::new();
    for perm in permutations(rank) {
        for mask in 0..(1u32 << rank) {
            let inverted: Vec<bool> = (0..rank).map(|i| mask >> i & 1 == 1).collect();
            let a = Automorphism::signed_permutation(&perm, &inverted);
            if seen.insert(a.clone()) {
                out.push(WhiteheadMove { kind: MoveKind::Permutation { perm: perm.clone(), inverted }, automorphism: a });
            }
        }
    }
    let others = rank.saturating_sub(1) as u32;
    for xi in 0..rank {
        for x in [Letter::gen(xi), Letter::gen(xi).inverse()] {
            let xw = Word::letter(x);
            for code in 1..4usize.pow(others) {
                let mut c = code;
                let mut choices = vec![0u8; rank];
                let mut images = Vec::with_capacity(rank);
                for y in 0..rank {
                    if y == xi {
                        images.push(Word::gen(y));
                        continue;
                    }
                    let ch = (c % 4) as u8;
                    c /= 4;
                    choices[y] = ch;
                    let yw = Word::gen(y);
                    images.push(match ch {
                        0 => yw,
                        1 => yw.mul(&xw),
                        2 => xw.inverse().mul(&yw),
                        _ => yw.conjugate_by(&xw),
                    });
                }
                let a = Automorphism::new_unchecked(images);
                if seen.insert(a.clone()) {
                    out.push(WhiteheadMove { kind: MoveKind::Multiplier { x, choices }, automorphism: a });
                }
            }
        }
    }
    out
}

fn cached_moves(rank: usize) -> &'static [WhiteheadMove] {
    static CACHE: [OnceLock<Vec<WhiteheadMove>>; 5] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    assert!(rank < CACHE.len(), "whitehead moves cached only for rank < 5");
    CACHE[rank].get_or_init(|| enumerate_whitehead(rank))
}

fn multiplier_moves(rank: usize) -> impl Iterator<Item = &'static WhiteheadMove> {
    cached_moves(rank).iter().filter(|m| matches!(m.kind, MoveKind::Multiplier { .. }))
}

fn permutation_moves(rank: usize) -> impl Iterator<Item = &'static WhiteheadMove> {
    cached_moves(rank).iter().filter(|m| matches!(m.kind, MoveKind::Permutation { .. }))
}

fn image(tuple: &[CyclicWord], a: &Automorphism) -> Vec<CyclicWord> {
    tuple.iter().map(|c| CyclicWord::new(&a.apply(c.word()))).collect()
}

fn total(tuple: &[CyclicWord]) -> usize {
    tuple.iter().map(|c| c.len()).sum()
}

/// Greedy descent: applies the most reducing move until none reduces the
/// total cyclic length. Returns the minimal tuple and `α` with `CyclicWord(wα)`
/// equal to the output entry for each input `w`.
pub fn minimize(words: &[Word], rank: usize) -> (Vec<CyclicWord>, Automorphism) {
    let mut cur: Vec<CyclicWord> = words.iter().map(CyclicWord::new).collect();
    let mut alpha = Automorphism::identity(rank);
    loop {
        let len = total(&cur);
        let mut best: Option<(usize, Vec<CyclicWord>, &Automorphism)> = None;
        for m in multiplier_moves(rank) {
            let img = image(&cur, &m.automorphism);
            let l = total(&img);
            if l < len && best.as_ref().map_or(true, |b| l < b.0) {
                best = Some((l, img, &m.automorphism));
            }
        }
        match best {
            Some((_, img, a)) => {
                cur = img;
                alpha = alpha.then(a);
            }
            None => return (cur, alpha),
        }
    }
}

fn canonical_key(tuple: &[CyclicWord], rank: usize) -> Vec<CyclicWord> {
    permutation_moves(rank).map(|m| image(tuple, &m.automorphism)).min().unwrap()
}

/// States of the orbit at the minimal length level.
pub struct LevelOrbit {
    pub states: Vec<(Vec<CyclicWord>, Automorphism)>,
    pub complete: bool,
}

/// Breadth-first search through length-preserving moves, up to signed permutations.
pub fn level_orbit(start: &[CyclicWord], start_auto: &Automorphism, rank: usize, budget: usize) -> LevelOrbit {
    let len = total(start);
    let mut seen: HashSet<Vec<CyclicWord>> = HashSet::new();
    seen.insert(canonical_key(start, rank));
    let mut states = vec![(start.to_vec(), start_auto.clone())];
    let mut q = VecDeque::from([0usize]);
    while let Some(i) = q.pop_front() {
        let (tuple, auto) = states[i].clone();
        for m in multiplier_moves(rank) {
            let img = image(&tuple, &m.automorphism);
            if total(&img) != len {
                continue;
            }
            if seen.insert(canonical_key(&img, rank)) {
                if states.len() >= budget {
                    return LevelOrbit { states, complete: false };
                }
                states.push((img, auto.then(&m.automorphism)));
                q.push_back(states.len() - 1);
            }
        }
    }
    LevelOrbit { states, complete: true }
}

/// Primitivity: `Yes(α)` with `wα` a generator up to conjugacy; `No` carries
/// the Whitehead-minimal representative of length other than one.
pub fn is_primitive(w: &Word, rank: usize) -> Verdict<Automorphism, CyclicWord> {
    let (m, a) = minimize(std::slice::from_ref(w), rank);
    if m[0].len() == 1 {
        Verdict::Yes(a)
    } else {
        Verdict::No(m[0].clone())
    }
}

/// A free factor system with an adapted basis: factor `k` is generated by
/// `gen(i)β` for `i` in `components[k]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeFactorSystem {
    rank: usize,
    components: Vec<Vec<usize>>,
    adapted: Automorphism,
}

impl FreeFactorSystem {
    pub fn new(rank: usize, components: Vec<Vec<usize>>, adapted: Automorphism) -> FreeFactorSystem {
        FreeFactorSystem { rank, components, adapted }
    }

    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Automorphism whose generator images form the adapted basis.
    pub fn adapted_basis(&self) -> &Automorphism {
        &self.adapted
    }

    pub fn factors(&self) -> Vec<Vec<Word>> {
        self.components.iter().map(|c| c.iter().map(|&i| self.adapted.image(i).clone()).collect()).collect()
    }

    pub fn factor_ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.components.iter().map(|c| c.len()).collect();
        r.sort_unstable();
        r
    }

    pub fn total_rank(&self) -> usize {
        self.components.iter().map(|c| c.len()).sum()
    }

    pub fn is_whole_group(&self) -> bool {
        self.components.len() == 1 && self.components[0].len() == self.rank
    }

    /// Sorted conjugacy-class keys of the factors.
    pub fn canonical(&self) -> Vec<Vec<u32>> {
        let mut keys: Vec<Vec<u32>> = self
            .factors()
            .iter()
            .map(|b| FoldedGraph::from_generators(b, self.rank).core().0.canonical_key())
            .collect();
        keys.sort();
        keys
    }

    pub fn equivalent(&self, other: &FreeFactorSystem) -> bool {
        self.rank == other.rank && self.canonical() == other.canonical()
    }

    /// Some factor contains a conjugate of `w`.
    pub fn carries(&self, w: &Word) -> bool {
        w.is_identity()
            || self
                .factors()
                .iter()
                .any(|b| FoldedGraph::from_generators(b, self.rank).conjugate_into(w).is_some())
    }

    /// Transports the system by an automorphism.
    pub fn transport(&self, a: &Automorphism) -> FreeFactorSystem {
        FreeFactorSystem { rank: self.rank, components: self.components.clone(), adapted: self.adapted.then(a) }
    }
}

fn letter_partition(tuple: &[CyclicWord], rank: usize) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..rank).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut used = vec![false; rank];
    for c in tuple {
        let ls = c.word().letters();
        for l in ls {
            used[l.index()] = true;
        }
        for pair in ls.windows(2) {
            let (a, b) = (find(&mut parent, pair[0].index()), find(&mut parent, pair[1].index()));
            parent[a] = b;
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..rank {
        if used[i] {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// Smallest free factor system carrying every conjugacy class in `words`.
/// Fails with a budget error when the minimal-level orbit is too large.
pub fn free_factor_support(words: &[Word], rank: usize, budget: usize) -> Result<FreeFactorSystem> {
    let words: Vec<Word> = words.iter().filter(|w| !w.is_identity()).cloned().collect();
    if words.is_empty() {
        return Ok(FreeFactorSystem::new(rank, Vec::new(), Automorphism::identity(rank)));
    }
    let (start, alpha) = minimize(&words, rank);
    let orbit = level_orbit(&start, &alpha, rank, budget);
    if !orbit.complete {
        return Err(CoreError::Budget(format!("minimal-level orbit exceeds {budget} states")));
    }
    let mut best: Option<(usize, usize, Vec<Vec<usize>>, &Automorphism)> = None;
    for (tuple, a) in &orbit.states {
        let parts = letter_partition(tuple, rank);
        let tr: usize = parts.iter().map(|p| p.len()).sum();
        let better = match &best {
            None => true,
            Some((btr, bn, _, _)) => tr < *btr || (tr == *btr && parts.len() > *bn),
        };
        if better {
            best = Some((tr, parts.len(), parts, a));
        }
    }
    let (_, _, parts, a) = best.unwrap();
    let system = FreeFactorSystem::new(rank, parts, a.inverse());
    debug_assert!(words.iter().all(|w| system.carries(w)));
    Ok(system)
}
