//! Graphviz exports for filters, compatibility graphs with their zipper
//! constraints, and pair posets.

use crate::filter::Filter;
use crate::graph::{Graph, Pair};
use crate::zipper::{PairPoset, ZipperConstraint};
use std::collections::BTreeSet;
use std::fmt::Write;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A filter as a directed labeled graph.
pub fn filter_dot(f: &Filter) -> String {
    let mut out = String::new();
    writeln!(out, "digraph filter {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  start [shape=none, label=\"\", width=0, height=0];").unwrap();
    writeln!(out, "  start -> v{};", f.initial()).unwrap();
    for v in f.states() {
        let name = match f.state_label(v) {
            Some(l) => format!("{l} / {}", f.output(v)),
            None => format!("{v} / {}", f.output(v)),
        };
        writeln!(out, "  v{v} [shape=circle, label=\"{}\"];", escape(&name)).unwrap();
    }
    for v in f.states() {
        for (y, t) in f.transitions_from(v) {
            writeln!(
                out,
                "  v{v} -> v{t} [label=\"{}\"];",
                escape(f.obs_label(y))
            )
            .unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    out
}

/// A compatibility graph with zipper constraints overlaid. Compatibility
/// edges are undirected; edges that carry constraints are drawn through a
/// midpoint node so each constraint can appear as a dashed arrow between
/// the midpoints of its source and target edges.
pub fn compatibility_dot(
    g: &Graph,
    constraints: &[ZipperConstraint],
    obs_labels: &[String],
) -> String {
    let constrained: BTreeSet<Pair> = constraints
        .iter()
        .flat_map(|c| [c.source, c.target])
        .collect();
    let mid = |p: Pair| format!("e_{}_{}", p.lo(), p.hi());

    let mut out = String::new();
    writeln!(out, "digraph compatibility {{").unwrap();
    writeln!(out, "  layout=neato;").unwrap();
    for v in 0..g.vertex_count() {
        writeln!(out, "  v{v} [shape=circle];").unwrap();
    }
    for p in &constrained {
        writeln!(out, "  {} [shape=point, width=0.05];", mid(*p)).unwrap();
    }
    for (u, v) in g.edges() {
        let pair = Pair::new(u, v);
        if constrained.contains(&pair) {
            writeln!(out, "  v{u} -> {} -> v{v} [dir=none];", mid(pair)).unwrap();
        } else {
            writeln!(out, "  v{u} -> v{v} [dir=none];").unwrap();
        }
    }
    for c in constraints {
        writeln!(
            out,
            "  {} -> {} [style=dashed, label=\"{}\"];",
            mid(c.source),
            mid(c.target),
            escape(&obs_labels[c.obs])
        )
        .unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

/// The condensation poset as a DAG of classes, annotated with its height
/// and width.
pub fn poset_dot(poset: &PairPoset) -> String {
    let mut out = String::new();
    writeln!(out, "digraph poset {{").unwrap();
    writeln!(
        out,
        "  label=\"height {} width {}\";",
        poset.height, poset.width
    )
    .unwrap();
    for (i, class) in poset.classes.iter().enumerate() {
        let members = class
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(out, "  c{i} [shape=box, label=\"{}\"];", escape(&members)).unwrap();
    }
    for &(a, b) in &poset.edges {
        writeln!(out, "  c{a} -> c{b};").unwrap();
    }
    writeln!(out, "}}").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::compatibility_graph;
    use crate::testutil::{f_line, one_state_filter};
    use crate::zipper::{build_pair_graph, build_zipper_constraints, condensation_poset,
        pair_sets};

    #[test]
    fn one_state_filter_has_one_node_and_its_loop() {
        let dot = filter_dot(&one_state_filter(0, true));
        assert_eq!(dot.matches("shape=circle").count(), 1);
        assert_eq!(dot.matches("v0 -> v0").count(), 1);
    }

    #[test]
    fn line_compatibility_export_counts() {
        let f = f_line();
        let g = compatibility_graph(&f);
        let z = build_zipper_constraints(&f, &g);
        let dot = compatibility_dot(&g, &z, f.obs_labels());
        // Three undirected compatibility edges, one zipper meta-edge.
        assert_eq!(dot.matches("[dir=none]").count(), 3);
        assert_eq!(dot.matches("style=dashed").count(), 1);
    }

    #[test]
    fn empty_poset_is_header_only() {
        let pg = build_pair_graph(&[], &std::collections::BTreeSet::new());
        let poset = condensation_poset(&pg);
        let dot = poset_dot(&poset);
        assert!(dot.contains("height 0 width 0"));
        assert!(!dot.contains("c0"));
        let _ = pair_sets(&[]);
    }
}
