//! Clique covers and an exact minimum clique cover solver.
//!
//! A clique cover of G is a proper coloring of its complement, so the
//! solver runs an exact branch-and-bound coloring: saturation-degree
//! branching, a greedy clique seed for the lower bound, and a greedy
//! cover as the incumbent.

use crate::error::Result;
use crate::graph::Graph;
use std::fmt;

/// A collection of cliques covering all vertices of one specific graph
/// (recorded by fingerprint). Held in canonical order: each clique
/// sorted, cliques sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCover {
    graph_fingerprint: u64,
    cliques: Vec<Vec<usize>>,
}

impl CliqueCover {
    /// Wrap raw cliques for `g`. The content is canonicalized but *not*
    /// validated; run [`verify_cover`] to audit it.
    pub fn new(g: &Graph, cliques: Vec<Vec<usize>>) -> Self {
        CliqueCover::from_parts(g.fingerprint(), cliques)
    }

    pub(crate) fn from_parts(graph_fingerprint: u64, mut cliques: Vec<Vec<usize>>) -> Self {
        for c in &mut cliques {
            c.sort_unstable();
            c.dedup();
        }
        cliques.sort();
        CliqueCover {
            graph_fingerprint,
            cliques,
        }
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn graph_fingerprint(&self) -> u64 {
        self.graph_fingerprint
    }

    /// Cliques containing both endpoints of a vertex pair.
    pub fn merges(&self, lo: usize, hi: usize) -> bool {
        self.cliques
            .iter()
            .any(|c| c.contains(&lo) && c.contains(&hi))
    }
}

/// A defect found when auditing a cover against a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverViolation {
    /// The cover was built for a different graph.
    GraphMismatch,
    OutOfRange { index: usize, vertex: usize },
    EmptyClique { index: usize },
    DuplicateClique { index: usize },
    NotAClique { index: usize },
    Uncovered { vertex: usize },
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverViolation::GraphMismatch => write!(f, "cover belongs to a different graph"),
            CoverViolation::OutOfRange { index, vertex } => {
                write!(f, "clique {index} mentions out-of-range vertex {vertex}")
            }
            CoverViolation::EmptyClique { index } => write!(f, "clique {index} is empty"),
            CoverViolation::DuplicateClique { index } => {
                write!(f, "clique {index} duplicates an earlier one")
            }
            CoverViolation::NotAClique { index } => {
                write!(f, "set {index} contains a non-edge")
            }
            CoverViolation::Uncovered { vertex } => write!(f, "vertex {vertex} is uncovered"),
        }
    }
}

/// Audit `k` against `g`; empty iff `k` is a well-formed clique cover.
pub fn verify_cover(g: &Graph, k: &CliqueCover) -> Vec<CoverViolation> {
    let mut violations = Vec::new();
    if k.graph_fingerprint != g.fingerprint() {
        violations.push(CoverViolation::GraphMismatch);
    }
    let n = g.vertex_count();
    let mut covered = vec![false; n];
    for (index, clique) in k.cliques.iter().enumerate() {
        if clique.is_empty() {
            violations.push(CoverViolation::EmptyClique { index });
            continue;
        }
        if k.cliques[..index].contains(clique) {
            violations.push(CoverViolation::DuplicateClique { index });
        }
        let mut in_range = true;
        for &v in clique {
            if v >= n {
                violations.push(CoverViolation::OutOfRange { index, vertex: v });
                in_range = false;
            } else {
                covered[v] = true;
            }
        }
        if in_range && !g.is_clique(clique) {
            violations.push(CoverViolation::NotAClique { index });
        }
    }
    for (vertex, &c) in covered.iter().enumerate() {
        if !c {
            violations.push(CoverViolation::Uncovered { vertex });
        }
    }
    violations
}

/// Deterministic greedy cover: walk vertices in id order, grow a clique
/// over the still-uncovered vertices. Valid, at least as large as the
/// optimum; used to seed the exact search.
// The range loop writes `covered` while scanning it, which rules out the
// iterator form clippy suggests.
#[allow(clippy::needless_range_loop)]
pub fn greedy_cover(g: &Graph) -> CliqueCover {
    let n = g.vertex_count();
    let mut covered = vec![false; n];
    let mut cliques = Vec::new();
    for v in 0..n {
        if covered[v] {
            continue;
        }
        let mut clique = vec![v];
        covered[v] = true;
        for w in (v + 1)..n {
            if !covered[w] && clique.iter().all(|&u| g.has_edge(u, w)) {
                clique.push(w);
                covered[w] = true;
            }
        }
        cliques.push(clique);
    }
    CliqueCover::new(g, cliques)
}

/// Exact minimum clique cover. Deterministic: fixed branching and
/// tie-breaking make repeated runs return the identical cover.
pub fn min_clique_cover(g: &Graph) -> CliqueCover {
    search_min_cover(g, usize::MAX).expect("unbounded search always produces a cover")
}

/// Exact minimum clique cover when it has at most `max_size` cliques,
/// `None` otherwise. The bound prunes the search.
pub fn min_clique_cover_bounded(g: &Graph, max_size: usize) -> Option<CliqueCover> {
    search_min_cover(g, max_size)
}

fn search_min_cover(g: &Graph, max_size: usize) -> Option<CliqueCover> {
    let n = g.vertex_count();
    if n == 0 {
        return Some(CliqueCover::new(g, Vec::new()));
    }
    let comp = g.complement();

    // Incumbent: the greedy cover read as a coloring of the complement.
    let greedy = greedy_cover(g);
    let mut best_assign = vec![0usize; n];
    for (color, clique) in greedy.cliques().iter().enumerate() {
        for &v in clique {
            best_assign[v] = color;
        }
    }
    let mut best_count = greedy.len();

    // Seed: a greedy clique of the complement, pinned to distinct colors.
    // Any proper coloring can be renamed to agree with it.
    let seed = greedy_clique(&comp);
    let mut colors: Vec<Option<usize>> = vec![None; n];
    for (c, &v) in seed.iter().enumerate() {
        colors[v] = Some(c);
    }

    if seed.len() < best_count.min(max_size.saturating_add(1)) {
        let degrees: Vec<usize> = (0..n).map(|v| comp.degree(v)).collect();
        let mut ctx = SearchCtx {
            comp: &comp,
            degrees,
            colors,
            best_assign: &mut best_assign,
            best_count: &mut best_count,
            limit: max_size.saturating_add(1),
        };
        ctx.branch(seed.len());
    }

    if best_count <= max_size {
        let mut cliques = vec![Vec::new(); best_count];
        for (v, &c) in best_assign.iter().enumerate() {
            cliques[c].push(v);
        }
        Some(CliqueCover::new(g, cliques))
    } else {
        None
    }
}

struct SearchCtx<'a> {
    comp: &'a Graph,
    degrees: Vec<usize>,
    colors: Vec<Option<usize>>,
    best_assign: &'a mut Vec<usize>,
    best_count: &'a mut usize,
    /// Only covers strictly smaller than this are of interest.
    limit: usize,
}

impl SearchCtx<'_> {
    fn bound(&self) -> usize {
        (*self.best_count).min(self.limit)
    }

    fn branch(&mut self, used: usize) {
        if used >= self.bound() {
            return;
        }
        // Saturation-degree pivot: most distinct neighbor colors, then
        // highest complement degree, then lowest index.
        let n = self.comp.vertex_count();
        let mut pivot = None;
        let mut pivot_key = (0usize, 0usize);
        for v in 0..n {
            if self.colors[v].is_some() {
                continue;
            }
            let mut seen = vec![false; used];
            let mut sat = 0;
            for w in self.comp.neighbors(v) {
                if let Some(c) = self.colors[w] {
                    if !seen[c] {
                        seen[c] = true;
                        sat += 1;
                    }
                }
            }
            let key = (sat, self.degrees[v]);
            match pivot {
                None => {
                    pivot = Some(v);
                    pivot_key = key;
                }
                Some(_) if key > pivot_key => {
                    pivot = Some(v);
                    pivot_key = key;
                }
                _ => {}
            }
        }
        let Some(v) = pivot else {
            // Complete coloring strictly better than the incumbent.
            *self.best_count = used;
            for (i, c) in self.colors.iter().enumerate() {
                self.best_assign[i] = c.expect("coloring is complete");
            }
            return;
        };

        for c in 0..used {
            let clash = self.comp.neighbors(v).any(|w| self.colors[w] == Some(c));
            if !clash {
                self.colors[v] = Some(c);
                self.branch(used);
                self.colors[v] = None;
            }
        }
        if used + 1 < self.bound() {
            self.colors[v] = Some(used);
            self.branch(used + 1);
            self.colors[v] = None;
        }
    }
}

/// Greedy clique, largest-degree-first; deterministic.
fn greedy_clique(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    if n == 0 {
        return Vec::new();
    }
    let mut candidates: Vec<usize> = (0..n).collect();
    let mut clique = Vec::new();
    while !candidates.is_empty() {
        let &v = candidates
            .iter()
            .max_by_key(|&&v| {
                let within = candidates.iter().filter(|&&w| g.has_edge(v, w)).count();
                (within, std::cmp::Reverse(v))
            })
            .expect("candidates non-empty");
        clique.push(v);
        candidates.retain(|&w| g.has_edge(v, w));
    }
    clique.sort_unstable();
    clique
}

/// Always-valid result contract for the solver and tests.
pub fn assert_valid_cover(g: &Graph, k: &CliqueCover) -> Result<()> {
    let violations = verify_cover(g, k);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(crate::error::Error::BadCover(
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        ))
    }
}
