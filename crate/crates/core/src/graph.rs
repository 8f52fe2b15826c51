//! Undirected graphs over dense vertex ids, and unordered vertex pairs.

use crate::error::{Error, Result};
use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use std::fmt;

/// An unordered pair of distinct vertices, stored as `(lo, hi)` with
/// `lo < hi` so that pairs compare and hash canonically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", try_from = "[usize; 2]")]
pub struct Pair {
    lo: usize,
    hi: usize,
}

impl Pair {
    /// Panics if `a == b`; use [`Pair::try_new`] for untrusted input.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "pair vertices must be distinct");
        Pair {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn try_new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(Error::DegeneratePair(a));
        }
        Ok(Pair::new(a, b))
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn contains(&self, v: usize) -> bool {
        self.lo == v || self.hi == v
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        [self.lo, self.hi].into_iter()
    }

    /// Renumber both endpoints through `map`; `None` if either is dropped.
    pub fn map(&self, map: impl Fn(usize) -> Option<usize>) -> Option<Pair> {
        Some(Pair::new(map(self.lo)?, map(self.hi)?))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

impl From<Pair> for [usize; 2] {
    fn from(p: Pair) -> Self {
        [p.lo, p.hi]
    }
}

impl TryFrom<[usize; 2]> for Pair {
    type Error = Error;

    fn try_from(a: [usize; 2]) -> Result<Self> {
        Pair::try_new(a[0], a[1])
    }
}

/// A simple undirected graph on vertices `0..n`: symmetric adjacency,
/// no self-loops. Rows are bit sets for O(1) membership and fast
/// neighborhood containment tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<FixedBitSet>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                vertices: self.n,
            });
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn add_pair_edge(&mut self, p: Pair) -> Result<()> {
        self.add_edge(p.lo(), p.hi())
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        if u < self.n && v < self.n {
            self.adj[u].remove(v);
            self.adj[v].remove(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].contains(v)
    }

    pub fn has_pair_edge(&self, p: Pair) -> bool {
        self.has_edge(p.lo(), p.hi())
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Neighbors of `v` together with `v` itself.
    pub fn closed_neighborhood(&self, v: usize) -> FixedBitSet {
        let mut set = self.adj[v].clone();
        set.insert(v);
        set
    }

    /// Edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.adj[u].ones().filter(move |&v| u < v).map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Complement graph (self-loops stay absent).
    pub fn complement(&self) -> Graph {
        let mut g = Graph::new(self.n);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.adj[u].contains(v) {
                    g.adj[u].insert(v);
                    g.adj[v].insert(u);
                }
            }
        }
        g
    }

    pub fn is_clique(&self, verts: &[usize]) -> bool {
        for (i, &u) in verts.iter().enumerate() {
            for &v in &verts[i + 1..] {
                if u != v && !self.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }

    /// FNV-1a over the vertex count and adjacency rows; identifies the
    /// graph a cover belongs to.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_usize(self.n);
        for (u, v) in self.edges() {
            h.write_usize(u);
            h.write_usize(v);
        }
        h.finish()
    }
}

/// FNV-1a, 64-bit. Fully deterministic across processes and platforms,
/// unlike the std hasher.
pub(crate) struct Fnv1a(u64);

impl Fnv1a {
    pub(crate) fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn write_usize(&mut self, x: usize) {
        for byte in (x as u64).to_le_bytes() {
            self.0 ^= u64::from(byte);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_normalizes_order() {
        assert_eq!(Pair::new(3, 1), Pair::new(1, 3));
        assert_eq!(Pair::new(3, 1).lo(), 1);
        assert_eq!(Pair::new(3, 1).to_string(), "{1,3}");
    }

    #[test]
    fn pair_rejects_equal_vertices() {
        assert!(matches!(Pair::try_new(2, 2), Err(Error::DegeneratePair(2))));
    }

    #[test]
    fn edges_are_symmetric_and_irreflexive() {
        let mut g = Graph::new(3);
        g.add_edge(0, 2).unwrap();
        assert!(g.has_edge(2, 0));
        assert!(!g.has_edge(0, 0));
        assert!(matches!(g.add_edge(1, 1), Err(Error::SelfLoop(1))));
        assert!(matches!(
            g.add_edge(0, 3),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn closed_neighborhood_includes_self() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1).unwrap();
        let n0 = g.closed_neighborhood(0);
        assert!(n0.contains(0) && n0.contains(1) && !n0.contains(2));
        let n2 = g.closed_neighborhood(2);
        assert_eq!(n2.count_ones(..), 1);
    }

    #[test]
    fn complement_flips_edges() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1).unwrap();
        let c = g.complement();
        assert!(!c.has_edge(0, 1));
        assert!(c.has_edge(0, 2) && c.has_edge(1, 2));
    }

    #[test]
    fn fingerprint_distinguishes_graphs() {
        let mut g = Graph::new(4);
        g.add_edge(0, 1).unwrap();
        let mut h = Graph::new(4);
        h.add_edge(0, 2).unwrap();
        assert_ne!(g.fingerprint(), h.fingerprint());
        assert_eq!(g.fingerprint(), g.clone().fingerprint());
    }
}
