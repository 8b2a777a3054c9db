//! Marked graphs and graph self-maps. Edge paths are words over the edge
//! alphabet: letter `i` crosses edge `i` forwards, its inverse backwards.

use serde::{Deserialize, Serialize};

use crate::automorphism::Automorphism;
use crate::error::{CoreError, Result};
use crate::word::{Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedGraph {
    pub vertex_count: usize,
    /// `(source, target)` of each oriented edge.
    pub edges: Vec<(usize, usize)>,
    /// Spanning tree edges. The remaining edges, in increasing order, are
    /// identified with the basis of the free group.
    pub tree: Vec<usize>,
}

impl MarkedGraph {
    /// One vertex, one loop per generator.
    pub fn rose(rank: usize) -> MarkedGraph {
        MarkedGraph { vertex_count: 1, edges: vec![(0, 0); rank], tree: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.edges.iter().any(|&(s, t)| s >= self.vertex_count || t >= self.vertex_count) {
            return Err(CoreError::InvalidGraphMap("edge endpoint out of range".into()));
        }
        // tree edges must form a spanning tree
        if self.tree.len() + 1 != self.vertex_count.max(1) {
            return Err(CoreError::InvalidGraphMap("tree has the wrong number of edges".into()));
        }
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &e in &self.tree {
            let (s, t) = *self.edges.get(e).ok_or_else(|| CoreError::InvalidGraphMap("tree edge out of range".into()))?;
            let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
            if rs == rt {
                return Err(CoreError::InvalidGraphMap("tree contains a cycle".into()));
            }
            parent[rs] = rt;
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.edges.len() - self.tree.len()
    }

    /// Basis index of each edge, `None` for tree edges.
    pub fn basis_index(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.edges.len()];
        let mut k = 0;
        for (e, slot) in out.iter_mut().enumerate() {
            if !self.tree.contains(&e) {
                *slot = Some(k);
                k += 1;
            }
        }
        out
    }

    fn start(&self, l: Letter) -> usize {
        let (s, t) = self.edges[l.index()];
        if l.is_inverse() { t } else { s }
    }

    fn end(&self, l: Letter) -> usize {
        self.start(l.inverse())
    }

    /// Endpoints of a nonempty edge path, or `None` if it is not a path.
    pub fn path_ends(&self, p: &Word) -> Option<(usize, usize)> {
        let ls = p.letters();
        for w in ls.windows(2) {
            if self.end(w[0]) != self.start(w[1]) {
                return None;
            }
        }
        Some((self.start(*ls.first()?), self.end(*ls.last()?)))
    }

    /// The element of `F_n` read off a path by collapsing the tree.
    pub fn read(&self, p: &Word) -> Word {
        let idx = self.basis_index();
        Word::reduce(p.letters().iter().filter_map(|l| {
            idx[l.index()].map(|k| if l.is_inverse() { Letter::gen(k).inverse() } else { Letter::gen(k) })
        }))
    }

    /// Tree path between two vertices.
    pub fn tree_path(&self, from: usize, to: usize) -> Word {
        let mut prev: Vec<Option<Letter>> = vec![None; self.vertex_count];
        let mut seen = vec![false; self.vertex_count];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for &e in &self.tree {
                for l in [Letter::gen(e), Letter::gen(e).inverse()] {
                    if self.start(l) == v && !seen[self.end(l)] {
                        seen[self.end(l)] = true;
                        prev[self.end(l)] = Some(l);
                        stack.push(self.end(l));
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut v = to;
        while v != from {
            let l = prev[v].expect("tree spans");
            out.push(l);
            v = self.start(l);
        }
        out.reverse();
        Word::reduce(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMap {
    pub graph: MarkedGraph,
    pub vertex_map: Vec<usize>,
    /// Image of each edge, an edge path.
    pub edge_images: Vec<Word>,
}

impl GraphMap {
    pub fn rose(phi: &Automorphism) -> GraphMap {
        GraphMap { graph: MarkedGraph::rose(phi.rank()), vertex_map: vec![0], edge_images: phi.images().to_vec() }
    }

    pub fn validate(&self) -> Result<()> {
        self.graph.validate()?;
        if self.vertex_map.len() != self.graph.vertex_count || self.edge_images.len() != self.graph.edges.len() {
            return Err(CoreError::InvalidGraphMap("map sizes do not match the graph".into()));
        }
        for (e, img) in self.edge_images.iter().enumerate() {
            let (s, t) = self.graph.edges[e];
            let ok = img.max_index().is_some_and(|m| m < self.graph.edges.len()) && match self.graph.path_ends(img) {
                Some(ends) => ends == (self.vertex_map[s], self.vertex_map[t]),
                None => false,
            };
            if !ok {
                return Err(CoreError::InvalidGraphMap(format!("image of edge {e} is not a nontrivial path with matching ends")));
            }
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.edge_images.len()
    }

    /// Image of an edge path, tightened.
    pub fn apply(&self, p: &Word) -> Word {
        Word::reduce(p.letters().iter().flat_map(|l| {
            let img = &self.edge_images[l.index()];
            if l.is_inverse() { img.inverse().letters().to_vec() } else { img.letters().to_vec() }
        }))
    }

    pub fn iterate(&self, p: &Word, k: usize) -> Word {
        (0..k).fold(p.clone(), |acc, _| self.apply(&acc))
    }

    /// The automorphism on `π_1` at the base vertex 0, via the marking. The
    /// choice of path back to the base only changes it by an inner automorphism.
    pub fn induced_outer(&self) -> Result<Automorphism> {
        self.validate()?;
        let g = &self.graph;
        let idx = g.basis_index();
        let mut images = vec![Word::identity(); g.rank()];
        for (e, k) in idx.iter().enumerate() {
            let Some(k) = k else { continue };
            let (s, t) = g.edges[e];
            let loop_path = g.tree_path(0, s).mul_letter(Letter::gen(e)).mul(&g.tree_path(t, 0));
            images[*k] = g.read(&self.apply(&loop_path));
        }
        Automorphism::new(images).map_err(|_| CoreError::InvalidGraphMap("not a homotopy equivalence".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rose_reads_back_the_automorphism() {
        let phi = Automorphism::from_ints(&[&[1], &[2, 1], &[3, 2]]);
        assert_eq!(GraphMap::rose(&phi).induced_outer().unwrap(), phi);
        let id = Automorphism::identity(3);
        assert_eq!(GraphMap::rose(&id).induced_outer().unwrap(), id);
    }

    #[test]
    fn theta_graph_map() {
        // theta graph: vertices 0, 1; edges e0, e1, e2 from 0 to 1; tree {e0}.
        // basis: x = e1 e0^-1 (edge 1), y = e2 e0^-1 (edge 2)
        let g = MarkedGraph { vertex_count: 2, edges: vec![(0, 1); 3], tree: vec![0] };
        // swap e1 and e2
        let f = GraphMap { graph: g.clone(), vertex_map: vec![0, 1], edge_images: vec![Word::gen(0), Word::gen(2), Word::gen(1)] };
        assert_eq!(f.induced_outer().unwrap(), Automorphism::from_ints(&[&[2], &[1]]));
        // reversing every edge swaps the vertices and inverts x and y
        let h = GraphMap { graph: g, vertex_map: vec![1, 0], edge_images: vec![Word::from_ints(&[-1]), Word::from_ints(&[-2]), Word::from_ints(&[-3])] };
        assert_eq!(h.induced_outer().unwrap(), Automorphism::from_ints(&[&[-1], &[-2]]));
    }

    #[test]
    fn rejects_non_paths() {
        let g = MarkedGraph { vertex_count: 2, edges: vec![(0, 1); 3], tree: vec![0] };
        let f = GraphMap { graph: g, vertex_map: vec![0, 1], edge_images: vec![Word::gen(0), Word::from_ints(&[2, 3]), Word::gen(2)] };
        assert!(f.validate().is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f = GraphMap::rose(&Automorphism::from_ints(&[&[1, 2], &[1]]));
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<GraphMap>(&s).unwrap(), f);
    }
}
