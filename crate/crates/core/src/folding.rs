//! Stallings folding of finitely generated subgroups.
//!
//! Every edge carries a word `omega` over the input generators, maintained so
//! that a closed path at the base vertex reads (in the labels) the value of
//! the product of its omegas. This makes membership constructive and gives
//! inverses of automorphisms for free.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::word::{Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub tgt: usize,
    /// Zero-based generator index; the edge reads that generator from `src` to `tgt`.
    pub label: usize,
    /// Expression over the input generators.
    pub omega: Word,
}

/// A folded (deterministic) labelled graph with a base vertex `0`.
#[derive(Clone, Debug)]
pub struct FoldedGraph {
    rank: usize,
    vertex_count: usize,
    edges: Vec<Edge>,
    // (vertex, signed label) -> (target, edge index, forward)
    out: HashMap<(usize, i32), (usize, usize, bool)>,
}

struct HalfEdge {
    edge: usize,
    forward: bool,
}

struct Folder {
    base: usize,
    edges: Vec<Edge>,
    alive: Vec<bool>,
    adj: Vec<Vec<usize>>,
}

impl Folder {
    fn half(&self, h: &HalfEdge) -> (i32, usize, Word) {
        let e = &self.edges[h.edge];
        if h.forward {
            (e.label as i32 + 1, e.tgt, e.omega.clone())
        } else {
            (-(e.label as i32 + 1), e.src, e.omega.inverse())
        }
    }

    fn find_conflict(&mut self, u: usize) -> Option<(HalfEdge, HalfEdge)> {
        let mut seen_edges = HashSet::new();
        let adj: Vec<usize> = self.adj[u].iter().copied().filter(|&e| self.alive[e]).collect();
        self.adj[u] = adj.clone();
        let mut by_label: HashMap<i32, HalfEdge> = HashMap::new();
        for e in adj {
            if !seen_edges.insert(e) {
                continue;
            }
            let ed = &self.edges[e];
            let mut halves = Vec::new();
            if ed.src == u {
                halves.push(HalfEdge { edge: e, forward: true });
            }
            if ed.tgt == u {
                halves.push(HalfEdge { edge: e, forward: false });
            }
            for h in halves {
                let (lab, _, _) = self.half(&h);
                if let Some(prev) = by_label.remove(&lab) {
                    return Some((prev, h));
                }
                by_label.insert(lab, h);
            }
        }
        None
    }

    fn gauge(&mut self, v: usize, g: &Word) {
        let ginv = g.inverse();
        let ids: HashSet<usize> = self.adj[v].iter().copied().filter(|&e| self.alive[e]).collect();
        for e in ids {
            let ed = &mut self.edges[e];
            let mut om = ed.omega.clone();
            if ed.src == v {
                om = ginv.mul(&om);
            }
            if ed.tgt == v {
                om = om.mul(g);
            }
            ed.omega = om;
        }
    }

    fn run(&mut self) {
        let mut work: VecDeque<usize> = (0..self.adj.len()).collect();
        while let Some(u) = work.pop_front() {
            let Some((h1, h2)) = self.find_conflict(u) else { continue };
            let (_, t1, w1) = self.half(&h1);
            let (_, t2, w2) = self.half(&h2);
            if t1 == t2 {
                self.alive[h2.edge] = false;
                work.push_back(u);
                work.push_back(t1);
                continue;
            }
            let (keep, gone, g, dead) = if t2 != self.base {
                (t1, t2, w2.inverse().mul(&w1), h2.edge)
            } else {
                (t2, t1, w1.inverse().mul(&w2), h1.edge)
            };
            self.gauge(gone, &g);
            self.alive[dead] = false;
            let moved = std::mem::take(&mut self.adj[gone]);
            for &e in &moved {
                let ed = &mut self.edges[e];
                if ed.src == gone {
                    ed.src = keep;
                }
                if ed.tgt == gone {
                    ed.tgt = keep;
                }
            }
            self.adj[keep].extend(moved);
            work.push_back(keep);
            if u != gone {
                work.push_back(u);
            }
        }
    }
}

impl FoldedGraph {
    /// Folds the wedge of petals reading `gens`. Omega letter `i` stands for `gens[i]`.
    pub fn from_generators(gens: &[Word], rank: usize) -> FoldedGraph {
        let mut f = Folder { base: 0, edges: Vec::new(), alive: Vec::new(), adj: vec![Vec::new()] };
        for (i, g) in gens.iter().enumerate() {
            let n = g.len();
            if n == 0 {
                continue;
            }
            let mut prev = 0usize;
            for (k, &l) in g.letters().iter().enumerate() {
                let next = if k + 1 == n {
                    0
                } else {
                    f.adj.push(Vec::new());
                    f.adj.len() - 1
                };
                let omega = if k == 0 { Word::gen(i) } else { Word::identity() };
                let (src, tgt) = if l.is_inverse() { (next, prev) } else { (prev, next) };
                let omega = if l.is_inverse() { omega.inverse() } else { omega };
                f.edges.push(Edge { src, tgt, label: l.index(), omega });
                f.alive.push(true);
                let id = f.edges.len() - 1;
                f.adj[src].push(id);
                if tgt != src {
                    f.adj[tgt].push(id);
                }
                prev = next;
            }
        }
        f.run();
        FoldedGraph::compact(rank, &f.edges, &f.alive, f.adj.len(), f.base)
    }

    fn compact(rank: usize, edges: &[Edge], alive: &[bool], nv: usize, base: usize) -> FoldedGraph {
        let mut used = vec![false; nv];
        used[base] = true;
        for (e, &a) in edges.iter().zip(alive) {
            if a {
                used[e.src] = true;
                used[e.tgt] = true;
            }
        }
        let mut map = vec![usize::MAX; nv];
        map[base] = 0;
        let mut next = 1;
        for v in 0..nv {
            if used[v] && v != base {
                map[v] = next;
                next += 1;
            }
        }
        let edges: Vec<Edge> = edges
            .iter()
            .zip(alive)
            .filter(|(_, &a)| a)
            .map(|(e, _)| Edge { src: map[e.src], tgt: map[e.tgt], label: e.label, omega: e.omega.clone() })
            .collect();
        FoldedGraph::build(rank, next, edges)
    }

    fn build(rank: usize, vertex_count: usize, edges: Vec<Edge>) -> FoldedGraph {
        let mut out = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            let l = e.label as i32 + 1;
            let a = out.insert((e.src, l), (e.tgt, i, true));
            let b = out.insert((e.tgt, -l), (e.src, i, false));
            debug_assert!(a.is_none() && b.is_none(), "graph not folded");
        }
        FoldedGraph { rank, vertex_count, edges, out }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Rank of the subgroup: `E - V + 1`.
    pub fn subgroup_rank(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    /// The subgroup is the whole free group.
    pub fn is_whole_group(&self) -> bool {
        self.vertex_count == 1 && self.edges.len() == self.rank
    }

    fn step(&self, v: usize, l: Letter) -> Option<(usize, usize, bool)> {
        self.out.get(&(v, l.signed())).copied()
    }

    /// Follows `w` from `v`; returns the end vertex and accumulated omega.
    pub fn read(&self, v: usize, w: &Word) -> Option<(usize, Word)> {
        let mut cur = v;
        let mut om = Word::identity();
        for &l in w.letters() {
            let (t, e, fwd) = self.step(cur, l)?;
            let o = &self.edges[e].omega;
            om = if fwd { om.mul(o) } else { om.mul(&o.inverse()) };
            cur = t;
        }
        Some((cur, om))
    }

    pub fn contains(&self, w: &Word) -> bool {
        matches!(self.read(0, w), Some((0, _)))
    }

    /// Expresses `w` as a word in the input generators, if it lies in the subgroup.
    pub fn express(&self, w: &Word) -> Option<Word> {
        match self.read(0, w) {
            Some((0, om)) => Some(om),
            _ => None,
        }
    }

    /// Label of a BFS-tree path from the base to each vertex.
    pub fn tree_paths(&self) -> Vec<Word> {
        let mut paths: Vec<Option<Word>> = vec![None; self.vertex_count];
        paths[0] = Some(Word::identity());
        let mut q = VecDeque::from([0usize]);
        while let Some(v) = q.pop_front() {
            for s in signed_labels(self.rank) {
                if let Some((t, _, _)) = self.step(v, s) {
                    if paths[t].is_none() {
                        paths[t] = Some(paths[v].as_ref().unwrap().mul_letter(s));
                        q.push_back(t);
                    }
                }
            }
        }
        paths.into_iter().map(|p| p.expect("graph is connected")).collect()
    }

    /// A free basis of the subgroup read off a spanning tree.
    pub fn basis(&self) -> Vec<Word> {
        let paths = self.tree_paths();
        let mut tree_edges = HashSet::new();
        for v in 1..self.vertex_count {
            // the edge used to reach v is the last letter of its path
            let l = paths[v].last().unwrap();
            let prev = paths[v].prefix(paths[v].len() - 1);
            let (u, _) = self.read(0, &prev).unwrap();
            let (_, e, _) = self.step(u, l).unwrap();
            tree_edges.insert(e);
        }
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !tree_edges.contains(&i) {
                let w = paths[e.src].mul(&Word::gen(e.label)).mul(&paths[e.tgt].inverse());
                out.push(w);
            }
        }
        out
    }

    /// For a whole-group graph, the omega of the loop reading generator `j`.
    pub fn loop_omegas(&self) -> Option<Vec<Word>> {
        if !self.is_whole_group() {
            return None;
        }
        let mut v = vec![Word::identity(); self.rank];
        for e in &self.edges {
            v[e.label] = e.omega.clone();
        }
        Some(v)
    }

    /// Returns `h` with `h^-1 w h` in the subgroup, if `w` is conjugate into it.
    pub fn conjugate_into(&self, w: &Word) -> Option<Word> {
        let (core, c) = w.cyclic_core();
        if core.is_identity() {
            return Some(Word::identity());
        }
        let paths = self.tree_paths();
        for v in 0..self.vertex_count {
            if let Some((end, _)) = self.read(v, &core) {
                if end == v {
                    // p core p^-1 lies in H, and core = c^-1 w c.
                    let h = c.mul(&paths[v].inverse());
                    debug_assert!(self.contains(&w.conjugate_by(&h)));
                    return Some(h);
                }
            }
        }
        None
    }

    /// The core graph (hair pruned) and the label of the hair from the base
    /// to the core. The subgroup is `p * pi1(core, v) * p^-1`.
    pub fn core(&self) -> (CoreGraph, Word) {
        let n = self.vertex_count;
        let mut deg = vec![0usize; n];
        for e in &self.edges {
            deg[e.src] += 1;
            deg[e.tgt] += 1;
        }
        let mut alive_e = vec![true; self.edges.len()];
        let mut alive_v = vec![true; n];
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                if alive_v[v] && deg[v] <= 1 {
                    alive_v[v] = false;
                    changed = true;
                    for (i, e) in self.edges.iter().enumerate() {
                        if alive_e[i] && (e.src == v || e.tgt == v) {
                            alive_e[i] = false;
                            deg[e.src] -= 1;
                            deg[e.tgt] -= 1;
                        }
                    }
                }
            }
        }
        if !alive_v.iter().any(|&a| a) {
            return (CoreGraph { rank: self.rank, vertex_count: 0, edges: Vec::new(), base: 0 }, Word::identity());
        }
        // Hair: BFS from base to the nearest core vertex.
        let mut prev: Vec<Option<(usize, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut q = VecDeque::from([0usize]);
        let mut hit = None;
        while let Some(v) = q.pop_front() {
            if alive_v[v] {
                hit = Some(v);
                break;
            }
            for s in signed_labels(self.rank) {
                if let Some((t, _, _)) = self.step(v, s) {
                    if !seen[t] {
                        seen[t] = true;
                        prev[t] = Some((v, s));
                        q.push_back(t);
                    }
                }
            }
        }
        let hit = hit.unwrap();
        let mut letters = Vec::new();
        let mut cur = hit;
        while let Some((p, s)) = prev[cur] {
            letters.push(s);
            cur = p;
        }
        letters.reverse();
        let hair = Word::reduce(letters);
        let mut map = vec![usize::MAX; n];
        let mut k = 0;
        for v in 0..n {
            if alive_v[v] {
                map[v] = k;
                k += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .zip(&alive_e)
            .filter(|(_, &a)| a)
            .map(|(e, _)| (map[e.src], map[e.tgt], e.label))
            .collect();
        (CoreGraph { rank: self.rank, vertex_count: k, edges, base: map[hit] }, hair)
    }
}

fn signed_labels(rank: usize) -> impl Iterator<Item = Letter> {
    (0..rank).flat_map(|i| [Letter::gen(i), Letter::gen(i).inverse()])
}

/// A core graph: no vertices of valence one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreGraph {
    pub rank: usize,
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize, usize)>,
    /// The vertex where the hair attached.
    pub base: usize,
}

impl CoreGraph {
    fn table(&self) -> HashMap<(usize, i32), usize> {
        let mut t = HashMap::new();
        for &(s, d, l) in &self.edges {
            t.insert((s, l as i32 + 1), d);
            t.insert((d, -(l as i32 + 1)), s);
        }
        t
    }

    fn encode_from(&self, start: usize, t: &HashMap<(usize, i32), usize>) -> Vec<u32> {
        let mut num = vec![u32::MAX; self.vertex_count];
        num[start] = 0;
        let mut order = vec![start];
        let mut enc = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for s in signed_labels(self.rank) {
                match t.get(&(v, s.signed())) {
                    Some(&w) => {
                        if num[w] == u32::MAX {
                            num[w] = order.len() as u32;
                            order.push(w);
                        }
                        enc.push(num[w] + 1);
                    }
                    None => enc.push(0),
                }
            }
            i += 1;
        }
        enc
    }

    /// Invariant of the conjugacy class of the subgroup.
    pub fn canonical_key(&self) -> Vec<u32> {
        let t = self.table();
        (0..self.vertex_count).map(|s| self.encode_from(s, &t)).min().unwrap_or_default()
    }
}

/// Subgroups generated by `a` and `b` are conjugate.
pub fn subgroups_conjugate(a: &[Word], b: &[Word], rank: usize) -> bool {
    let ka = FoldedGraph::from_generators(a, rank).core().0.canonical_key();
    let kb = FoldedGraph::from_generators(b, rank).core().0.canonical_key();
    ka == kb
}

/// Evaluates a word over symbols `y_i` by substituting `values[i]`.
pub fn evaluate(w: &Word, values: &[Word]) -> Word {
    let mut raw: Vec<Letter> = Vec::with_capacity(w.len() * 2);
    for &l in w.letters() {
        let v = values[l.index()].letters();
        if l.is_inverse() {
            raw.extend(v.iter().rev().map(|x| x.inverse()));
        } else {
            raw.extend_from_slice(v);
        }
    }
    Word::reduce(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &[i32]) -> Word {
        Word::from_ints(s)
    }

    #[test]
    fn whole_group_detection() {
        let g = FoldedGraph::from_generators(&[w(&[1, 2]), w(&[2])], 2);
        assert!(g.is_whole_group());
        let g = FoldedGraph::from_generators(&[w(&[1, 1]), w(&[2])], 2);
        assert!(!g.is_whole_group());
        assert_eq!(g.subgroup_rank(), 2);
    }

    #[test]
    fn loop_omegas_invert() {
        // a -> ab, b -> b: inverse sends a -> aB
        let imgs = [w(&[1, 2]), w(&[2])];
        let g = FoldedGraph::from_generators(&imgs, 2);
        let om = g.loop_omegas().unwrap();
        assert_eq!(om[0], w(&[1, -2]));
        assert_eq!(om[1], w(&[2]));
        for (j, o) in om.iter().enumerate() {
            assert_eq!(evaluate(o, &imgs), Word::gen(j));
        }
    }

    #[test]
    fn membership_and_expression() {
        let gens = [w(&[1, 1]), w(&[2, 1, -2])];
        let g = FoldedGraph::from_generators(&gens, 2);
        let x = w(&[2, 1, 1, 1, -2, 1, 1]);
        let e = g.express(&x).unwrap();
        assert_eq!(evaluate(&e, &gens), x);
        assert!(!g.contains(&w(&[1])));
        assert!(!g.contains(&w(&[2])));
    }

    #[test]
    fn basis_generates() {
        let gens = [w(&[1, 2, -1]), w(&[1, 2, 2, -1]), w(&[3, 3])];
        let g = FoldedGraph::from_generators(&gens, 3);
        let b = g.basis();
        assert_eq!(b.len(), g.subgroup_rank());
        let g2 = FoldedGraph::from_generators(&b, 3);
        for x in &gens {
            assert!(g2.contains(x));
        }
    }

    #[test]
    fn conjugate_into_example() {
        let g = FoldedGraph::from_generators(&[w(&[1]), w(&[2])], 3);
        let x = w(&[3, 1, 2, -3]);
        let h = g.conjugate_into(&x).unwrap();
        assert!(g.contains(&x.conjugate_by(&h)));
        assert!(g.conjugate_into(&w(&[3])).is_none());
    }

    #[test]
    fn core_and_hair() {
        let gens = [w(&[3, 1, -3]), w(&[3, 2, -3])];
        let g = FoldedGraph::from_generators(&gens, 3);
        let (core, hair) = g.core();
        assert_eq!(hair, w(&[3]));
        assert_eq!(core.vertex_count, 1);
        assert!(subgroups_conjugate(&gens, &[w(&[1]), w(&[2])], 3));
        assert!(!subgroups_conjugate(&[w(&[1])], &[w(&[2])], 3));
    }

    fn rand_word(rank: i32, max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((1..=rank).prop_flat_map(|g| prop_oneof![Just(g), Just(-g)]), 0..max)
            .prop_map(|v| Word::from_ints(&v))
    }

    proptest! {
        #[test]
        fn express_roundtrip(gens in prop::collection::vec(rand_word(3, 7), 1..4),
                             idx in prop::collection::vec((0usize..4, any::<bool>()), 0..6)) {
            let g = FoldedGraph::from_generators(&gens, 3);
            let mut x = Word::identity();
            for (i, inv) in idx {
                let y = &gens[i % gens.len()];
                x = x.mul(&if inv { y.inverse() } else { y.clone() });
            }
            let e = g.express(&x).expect("product of generators is a member");
            prop_assert_eq!(evaluate(&e, &gens), x);
        }

        #[test]
        fn conjugates_have_same_key(gens in prop::collection::vec(rand_word(3, 6), 1..3), h in rand_word(3, 5)) {
            let conj: Vec<Word> = gens.iter().map(|x| x.conjugate_by(&h)).collect();
            prop_assert!(subgroups_conjugate(&gens, &conj, 3));
        }
    }
}
