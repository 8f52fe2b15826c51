//! Zipper constraints and the structure they induce on state pairs.
//!
//! Merging two compatible states that step, on the same observation, to two
//! distinct states forces those children to be merged as well, or the
//! result would be nondeterministic. Each such obligation is a zipper
//! constraint `<U, W>_y`. The one-step relation between constrained pairs,
//! its transitive closure ("downstream"), and the poset of its cycle
//! classes drive the prescription enumeration.

use crate::error::{Error, Result};
use crate::filter::{Filter, ObsId};
use crate::graph::{Graph, Pair};
use fixedbitset::FixedBitSet;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// `<U, W>_y`: if the pair `U` shares a clique, the pair `W` of their
/// distinct y-children must share one too.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZipperConstraint {
    pub source: Pair,
    pub target: Pair,
    pub obs: ObsId,
}

impl fmt::Display for ZipperConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>_{}", self.source, self.target, self.obs)
    }
}

/// Every zipper constraint of `filter`: for each compatible pair and each
/// observation under which both members step to distinct states, one
/// constraint. Deduplicated, sorted by `(source, obs)`.
pub fn build_zipper_constraints(filter: &Filter, g: &Graph) -> Vec<ZipperConstraint> {
    let mut out = BTreeSet::new();
    for (u, v) in g.edges() {
        for y in 0..filter.alphabet_size() {
            if let (Some(cu), Some(cv)) = (filter.step(u, y), filter.step(v, y)) {
                if cu != cv {
                    out.insert(ZipperConstraint {
                        source: Pair::new(u, v),
                        target: Pair::new(cu, cv),
                        obs: y,
                    });
                }
            }
        }
    }
    let constraints: Vec<_> = out.into_iter().collect();
    // Targets are edges of g: were the children incompatible, the marking
    // fixpoint would have removed the parents' edge.
    debug_assert!(constraints.iter().all(|c| g.has_pair_edge(c.target)));
    constraints
}

/// The pairs appearing in a constraint collection, split by role.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairSets {
    /// Z²: every pair appearing anywhere.
    pub all: BTreeSet<Pair>,
    /// Z²_src: pairs appearing as a source.
    pub sources: BTreeSet<Pair>,
    /// Z²_tgt: pairs appearing as a target.
    pub targets: BTreeSet<Pair>,
}

pub fn pair_sets(constraints: &[ZipperConstraint]) -> PairSets {
    let mut sets = PairSets::default();
    for c in constraints {
        sets.all.insert(c.source);
        sets.all.insert(c.target);
        sets.sources.insert(c.source);
        sets.targets.insert(c.target);
    }
    sets
}

/// A directed graph on a set of pairs. Vertices are kept sorted so vertex
/// index order is the canonical pair order.
#[derive(Clone, Debug)]
pub struct PairGraph {
    verts: Vec<Pair>,
    index: BTreeMap<Pair, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl PairGraph {
    /// Build from explicit vertices and edges; endpoints outside the
    /// vertex set are rejected.
    pub fn new(vertices: BTreeSet<Pair>, edges: &[(Pair, Pair)]) -> Result<Self> {
        let verts: Vec<Pair> = vertices.into_iter().collect();
        let index: BTreeMap<Pair, usize> = verts.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut succ = vec![Vec::new(); verts.len()];
        let mut pred = vec![Vec::new(); verts.len()];
        let mut seen = BTreeSet::new();
        for &(s, d) in edges {
            let (si, di) = match (index.get(&s), index.get(&d)) {
                (Some(&si), Some(&di)) => (si, di),
                _ => return Err(Error::BadInstance(format!("edge {s}->{d} leaves the vertex set"))),
            };
            if seen.insert((si, di)) {
                succ[si].push(di);
                pred[di].push(si);
            }
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
        }
        Ok(PairGraph {
            verts,
            index,
            succ,
            pred,
        })
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn vertices(&self) -> &[Pair] {
        &self.verts
    }

    pub fn pair(&self, i: usize) -> Pair {
        self.verts[i]
    }

    pub fn index_of(&self, p: Pair) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.pred[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (Pair, Pair)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(move |(s, ds)| ds.iter().map(move |&d| (self.verts[s], self.verts[d])))
    }

    /// Vertices reachable from `start` through at least one edge, visiting
    /// only vertices with `live` set. `start` itself appears exactly when
    /// it lies on a live cycle.
    pub(crate) fn reach_from(&self, start: usize, live: &FixedBitSet) -> FixedBitSet {
        self.reach(start, live, &self.succ)
    }

    /// Like [`PairGraph::reach_from`] but against edge direction.
    pub(crate) fn reach_to(&self, start: usize, live: &FixedBitSet) -> FixedBitSet {
        self.reach(start, live, &self.pred)
    }

    fn reach(&self, start: usize, live: &FixedBitSet, next: &[Vec<usize>]) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.len());
        let mut stack: Vec<usize> = next[start]
            .iter()
            .copied()
            .filter(|&v| live.contains(v))
            .collect();
        while let Some(v) = stack.pop() {
            if seen.contains(v) {
                continue;
            }
            seen.insert(v);
            for &w in &next[v] {
                if live.contains(w) && !seen.contains(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub(crate) fn full_live(&self) -> FixedBitSet {
        let mut live = FixedBitSet::with_capacity(self.len());
        live.insert_range(..);
        live
    }
}

/// Pair graph of a constraint collection restricted to `domain`: an edge
/// per one-step zipper relation whose endpoints both lie in the domain.
pub fn build_pair_graph(constraints: &[ZipperConstraint], domain: &BTreeSet<Pair>) -> PairGraph {
    let edges: Vec<(Pair, Pair)> = constraints
        .iter()
        .filter(|c| domain.contains(&c.source) && domain.contains(&c.target))
        .map(|c| (c.source, c.target))
        .collect();
    PairGraph::new(domain.clone(), &edges).expect("edges filtered to the domain")
}

/// The strict downstream relation over all pairs of a constraint
/// collection: `is_downstream(a, b)` iff a chain of one or more
/// constraints leads from `a` to `b`. Cyclic pairs are downstream of
/// themselves.
#[derive(Clone, Debug)]
pub struct Downstream {
    graph: PairGraph,
    reach: Vec<FixedBitSet>,
}

pub fn downstream_relation(constraints: &[ZipperConstraint]) -> Downstream {
    let sets = pair_sets(constraints);
    let graph = build_pair_graph(constraints, &sets.all);
    let live = graph.full_live();
    let reach = (0..graph.len()).map(|i| graph.reach_from(i, &live)).collect();
    Downstream { graph, reach }
}

impl Downstream {
    pub fn pairs(&self) -> &[Pair] {
        self.graph.vertices()
    }

    pub fn is_downstream(&self, a: Pair, b: Pair) -> bool {
        match (self.graph.index_of(a), self.graph.index_of(b)) {
            (Some(ai), Some(bi)) => self.reach[ai].contains(bi),
            _ => false,
        }
    }

    /// Pairs strictly downstream of `p` (empty for pairs outside the
    /// relation).
    pub fn down_set(&self, p: Pair) -> BTreeSet<Pair> {
        match self.graph.index_of(p) {
            Some(pi) => self.reach[pi].ones().map(|i| self.graph.pair(i)).collect(),
            None => BTreeSet::new(),
        }
    }

    /// Restriction of the relation to `domain`, materialized as a pair
    /// graph with one edge per related pair. Reachability inside the
    /// result agrees with the full relation even when intermediate pairs
    /// fall outside the domain.
    pub fn restriction(&self, domain: &BTreeSet<Pair>) -> PairGraph {
        let mut edges = Vec::new();
        for &a in domain {
            if let Some(ai) = self.graph.index_of(a) {
                for bi in self.reach[ai].ones() {
                    let b = self.graph.pair(bi);
                    if domain.contains(&b) {
                        edges.push((a, b));
                    }
                }
            }
        }
        PairGraph::new(domain.clone(), &edges).expect("edges filtered to the domain")
    }
}

/// The poset of pair classes: strongly connected components of a pair
/// graph, ordered by lifted reachability. `height` is the longest chain
/// counted in edges (a single class has height 0); `width` the largest
/// antichain, computed exactly via a minimum chain cover (bipartite
/// matching on the closed relation).
#[derive(Clone, Debug)]
pub struct PairPoset {
    /// Each class lists its pairs in canonical order; classes are sorted
    /// by their smallest pair.
    pub classes: Vec<Vec<Pair>>,
    /// Lifted strict reachability between distinct classes (transitive).
    pub edges: Vec<(usize, usize)>,
    pub height: usize,
    pub width: usize,
}

impl PairPoset {
    /// `(2 + height) ^ width`, the cap on downstream-enabled
    /// prescriptions, saturating.
    pub fn prescription_bound(&self) -> u128 {
        let base = 2u128.saturating_add(self.height as u128);
        let mut out = 1u128;
        for _ in 0..self.width {
            out = out.saturating_mul(base);
        }
        out
    }
}

pub fn condensation_poset(pg: &PairGraph) -> PairPoset {
    let n = pg.len();
    let live = pg.full_live();
    // Mutual-reachability classes, folded over canonical vertex order so
    // class numbering is deterministic.
    let reach: Vec<FixedBitSet> = (0..n).map(|i| pg.reach_from(i, &live)).collect();
    let mut class_of = vec![usize::MAX; n];
    let mut class_members: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if class_of[v] != usize::MAX {
            continue;
        }
        let id = class_members.len();
        class_of[v] = id;
        let mut members = vec![v];
        for w in (v + 1)..n {
            if class_of[w] == usize::MAX && reach[v].contains(w) && reach[w].contains(v) {
                class_of[w] = id;
                members.push(w);
            }
        }
        class_members.push(members);
    }

    let k = class_members.len();
    let mut lifted = vec![FixedBitSet::with_capacity(k); k];
    for v in 0..n {
        for w in reach[v].ones() {
            let (cv, cw) = (class_of[v], class_of[w]);
            if cv != cw {
                lifted[cv].insert(cw);
            }
        }
    }

    let mut edges = Vec::new();
    for (c, row) in lifted.iter().enumerate() {
        for d in row.ones() {
            edges.push((c, d));
        }
    }

    // Height: longest chain in edges. The lifted relation is transitive,
    // so memoized depth over direct successors is exact.
    let mut depth = vec![usize::MAX; k];
    fn depth_of(c: usize, lifted: &[FixedBitSet], depth: &mut Vec<usize>) -> usize {
        if depth[c] != usize::MAX {
            return depth[c];
        }
        let mut best = 0;
        let succs: Vec<usize> = lifted[c].ones().collect();
        for d in succs {
            best = best.max(1 + depth_of(d, lifted, depth));
        }
        depth[c] = best;
        best
    }
    let height = (0..k)
        .map(|c| depth_of(c, &lifted, &mut depth))
        .max()
        .unwrap_or(0);

    // Width via Dilworth: max antichain = k - max matching on the
    // comparability bipartite graph.
    let matching = max_bipartite_matching(k, |c| lifted[c].ones().collect());
    let width = k - matching;

    let classes = class_members
        .into_iter()
        .map(|members| members.into_iter().map(|v| pg.pair(v)).collect())
        .collect();
    PairPoset {
        classes,
        edges,
        height,
        width,
    }
}

/// Kuhn's augmenting-path matching on a bipartite graph with `n` vertices
/// per side and adjacency given by `adj`.
fn max_bipartite_matching(n: usize, adj: impl Fn(usize) -> Vec<usize>) -> usize {
    let adj: Vec<Vec<usize>> = (0..n).map(&adj).collect();
    let mut matched_right: Vec<Option<usize>> = vec![None; n];
    fn try_augment(
        v: usize,
        adj: &[Vec<usize>],
        used: &mut [bool],
        matched_right: &mut [Option<usize>],
    ) -> bool {
        for &to in &adj[v] {
            if used[to] {
                continue;
            }
            used[to] = true;
            if matched_right[to].is_none()
                || try_augment(matched_right[to].unwrap(), adj, used, matched_right)
            {
                matched_right[to] = Some(v);
                return true;
            }
        }
        false
    }
    let mut size = 0;
    for v in 0..n {
        let mut used = vec![false; n];
        if try_augment(v, &adj, &mut used, &mut matched_right) {
            size += 1;
        }
    }
    size
}
