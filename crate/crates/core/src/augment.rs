//! Graph augmentation: bake a prescription into the graph so that an
//! unconstrained clique cover of the augmented graph respects it.
//!
//! OFF pairs lose their edge; every ON pair gains a fresh vertex whose
//! underlying set is the pair. Two augmented vertices are adjacent exactly
//! when the union of their underlying sets is a clique of the OFF-pruned
//! graph. Covers move between the two graphs by distillation (union the
//! underlying sets) and expansion (collect every augmented vertex whose
//! underlying set fits).

use crate::cover::{verify_cover, CliqueCover};
use crate::error::{Error, Result};
use crate::filter::StateId;
use crate::graph::{Graph, Pair};
use crate::prescription::Prescription;
use std::collections::BTreeSet;

/// A vertex of the augmented graph: a copy of an original vertex, or a
/// fresh vertex standing for an ON pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AugVertex {
    Prior(StateId),
    New(Pair),
}

impl AugVertex {
    pub fn underlying(&self) -> impl Iterator<Item = StateId> {
        match *self {
            AugVertex::Prior(v) => vec![v].into_iter(),
            AugVertex::New(p) => vec![p.lo(), p.hi()].into_iter(),
        }
    }
}

/// The augmentation of a base graph by a prescription. Vertex order is
/// all Prior copies by state id, then New vertices by canonical pair
/// order.
#[derive(Clone, Debug)]
pub struct AugmentedGraph {
    graph: Graph,
    verts: Vec<AugVertex>,
    base_vertices: usize,
    base_fingerprint: u64,
}

/// Build the augmented graph. Every pair in the prescription's domain
/// must be an edge of `g`.
pub fn augment(g: &Graph, p: &Prescription) -> Result<AugmentedGraph> {
    for &pair in p.domain() {
        if !g.has_pair_edge(pair) {
            return Err(Error::NotAnEdge(pair));
        }
    }
    let n = g.vertex_count();

    let mut pruned = g.clone();
    for pair in p.off_pairs() {
        pruned.remove_edge(pair.lo(), pair.hi());
    }

    let mut verts: Vec<AugVertex> = (0..n).map(AugVertex::Prior).collect();
    verts.extend(p.on_pairs().iter().map(|&pair| AugVertex::New(pair)));

    let mut graph = Graph::new(verts.len());
    for i in 0..verts.len() {
        for j in (i + 1)..verts.len() {
            let union: BTreeSet<StateId> = verts[i]
                .underlying()
                .chain(verts[j].underlying())
                .collect();
            let union: Vec<StateId> = union.into_iter().collect();
            if pruned.is_clique(&union) {
                graph.add_edge(i, j).expect("indices in range");
            }
        }
    }
    Ok(AugmentedGraph {
        graph,
        verts,
        base_vertices: n,
        base_fingerprint: g.fingerprint(),
    })
}

impl AugmentedGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertices(&self) -> &[AugVertex] {
        &self.verts
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn base_vertices(&self) -> usize {
        self.base_vertices
    }

    /// Map a cover of the augmented graph down to a cover of the base
    /// graph: each clique becomes the union of its underlying sets,
    /// duplicates merged. Rejects inputs that are not clique covers of
    /// the augmented graph.
    pub fn distill(&self, cover: &CliqueCover) -> Result<CliqueCover> {
        let violations = verify_cover(&self.graph, cover);
        if !violations.is_empty() {
            return Err(Error::BadCover(format!(
                "distillation input: {}",
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            )));
        }
        let mut sets: Vec<Vec<usize>> = Vec::new();
        for clique in cover.cliques() {
            let distilled: BTreeSet<usize> = clique
                .iter()
                .flat_map(|&i| self.verts[i].underlying())
                .collect();
            let distilled: Vec<usize> = distilled.into_iter().collect();
            if !sets.contains(&distilled) {
                sets.push(distilled);
            }
        }
        Ok(CliqueCover::from_parts(self.base_fingerprint, sets))
    }

    /// All augmented vertices whose underlying set is contained in `s`.
    pub fn expand(&self, s: &[StateId]) -> Vec<usize> {
        self.verts
            .iter()
            .enumerate()
            .filter(|(_, v)| v.underlying().all(|u| s.contains(&u)))
            .map(|(i, _)| i)
            .collect()
    }
}
