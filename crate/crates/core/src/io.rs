//! Versioned JSON documents for filters, raw solver instances, and covers.
//!
//! Serialization is canonical: fixed key order, states and transitions
//! sorted, two-space indentation. Parsing a canonical document and
//! serializing the result reproduces the document byte for byte.

use crate::error::{Error, Result};
use crate::filter::{Filter, FilterBuilder, Violation};
use crate::graph::{Graph, Pair};
use crate::solver::MzccInstance;
use crate::zipper::ZipperConstraint;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterDoc {
    version: u32,
    states: Vec<StateDoc>,
    initial: usize,
    observations: Vec<String>,
    transitions: Vec<TransitionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    output: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    from: usize,
    obs: String,
    to: usize,
}

/// Parse a filter document. Schema problems surface as JSON errors with
/// line/column positions; semantic problems as the full violation list.
pub fn parse_filter(text: &str) -> Result<Filter> {
    let doc: FilterDoc = serde_json::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(doc.version));
    }

    let mut violations = Vec::new();
    let n = doc.states.len();
    let mut by_id: Vec<Option<&StateDoc>> = vec![None; n];
    for state in &doc.states {
        if state.id >= n {
            violations.push(Violation::NonDenseStateIds {
                states: n,
                max_id: state.id,
            });
        } else if by_id[state.id].is_some() {
            violations.push(Violation::DuplicateStateId { id: state.id });
        } else {
            by_id[state.id] = Some(state);
        }
    }
    if !violations.is_empty() {
        return Err(Error::InvalidFilter(violations));
    }

    let mut b = FilterBuilder::new();
    b.alphabet(doc.observations.iter().cloned());
    for state in by_id.into_iter().flatten() {
        match &state.label {
            Some(l) => b.labeled_state(state.output, l.clone()),
            None => b.state(state.output),
        };
    }
    b.initial(doc.initial);
    for t in &doc.transitions {
        match doc.observations.iter().position(|l| l == &t.obs) {
            Some(obs) => {
                b.transition(t.from, obs, t.to);
            }
            None => violations.push(Violation::UnknownObservationLabel {
                label: t.obs.clone(),
            }),
        }
    }
    violations.extend(b.validate());
    if !violations.is_empty() {
        return Err(Error::InvalidFilter(violations));
    }
    b.build()
}

/// Canonical document for a filter: pretty-printed, trailing newline.
pub fn serialize_filter(f: &Filter) -> String {
    let states = f
        .states()
        .map(|v| StateDoc {
            id: v,
            label: f.state_label(v).map(str::to_string),
            output: f.output(v),
        })
        .collect();
    let mut transitions: Vec<TransitionDoc> = f
        .states()
        .flat_map(|v| {
            f.transitions_from(v).map(move |(y, t)| TransitionDoc {
                from: v,
                obs: f.obs_label(y).to_string(),
                to: t,
            })
        })
        .collect();
    transitions.sort_by(|a, b| (a.from, &a.obs).cmp(&(b.from, &b.obs)));
    let doc = FilterDoc {
        version: FORMAT_VERSION,
        states,
        initial: f.initial(),
        observations: f.obs_labels().to_vec(),
        transitions,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MzccDoc {
    version: u32,
    vertices: usize,
    edges: Vec<[usize; 2]>,
    constraints: Vec<ConstraintDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintDoc {
    #[serde(rename = "U")]
    source: [usize; 2],
    #[serde(rename = "W")]
    target: [usize; 2],
    y: String,
}

/// Parse a raw solver instance: a graph plus zipper constraints, no
/// filter semantics attached. Constraint symbols become the alphabet in
/// sorted order.
pub fn parse_mzcc(text: &str) -> Result<MzccInstance> {
    let doc: MzccDoc = serde_json::from_str(text)?;
    if doc.version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(doc.version));
    }
    let mut graph = Graph::new(doc.vertices);
    for [u, v] in doc.edges {
        graph.add_edge(u, v)?;
    }
    let mut labels: Vec<String> = doc.constraints.iter().map(|c| c.y.clone()).collect();
    labels.sort();
    labels.dedup();
    let constraints = doc
        .constraints
        .iter()
        .map(|c| {
            Ok(ZipperConstraint {
                source: Pair::try_new(c.source[0], c.source[1])?,
                target: Pair::try_new(c.target[0], c.target[1])?,
                obs: labels.binary_search(&c.y).expect("label collected above"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MzccInstance::new(graph, constraints, labels)
}

/// Canonical document for a raw solver instance.
pub fn serialize_mzcc(inst: &MzccInstance) -> String {
    let doc = MzccDoc {
        version: FORMAT_VERSION,
        vertices: inst.graph().vertex_count(),
        edges: inst.graph().edges().map(|(u, v)| [u, v]).collect(),
        constraints: inst
            .constraints()
            .iter()
            .map(|c| ConstraintDoc {
                source: c.source.into(),
                target: c.target.into(),
                y: inst.obs_labels()[c.obs].clone(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}

#[derive(Debug, Serialize)]
struct CoverDoc<'a> {
    version: u32,
    size: usize,
    cliques: &'a [Vec<usize>],
}

/// One-line JSON document for a cover (used by the `cover` subcommand).
pub fn serialize_cover(cliques: &[Vec<usize>]) -> String {
    let doc = CoverDoc {
        version: FORMAT_VERSION,
        size: cliques.len(),
        cliques,
    };
    let mut text = serde_json::to_string(&doc).expect("document serializes");
    text.push('\n');
    text
}
