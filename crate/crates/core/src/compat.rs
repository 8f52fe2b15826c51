//! Compatibility graphs: which states of a filter may share a clique.
//!
//! Two states are compatible when their outputs agree on every common
//! extension. The graph is computed by the standard marking fixpoint: a
//! pair is incompatible iff its outputs differ or some shared observation
//! leads to an incompatible pair, propagated backwards to a fixed point.

use crate::error::{Error, Result};
use crate::filter::Filter;
use crate::graph::{Graph, Pair};
use std::collections::BTreeSet;
use std::collections::VecDeque;

/// Build the compatibility graph of `filter`: one vertex per state, an
/// edge exactly between compatible pairs. Self-compatibility is implicit
/// and not stored.
pub fn compatibility_graph(filter: &Filter) -> Graph {
    let n = filter.state_count();
    let k = filter.alphabet_size();
    let mut incompatible = vec![false; n * n];
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();

    let mark = |inc: &mut Vec<bool>, queue: &mut VecDeque<(usize, usize)>, u: usize, w: usize| {
        if !inc[u * n + w] {
            inc[u * n + w] = true;
            inc[w * n + u] = true;
            queue.push_back((u, w));
        }
    };

    for u in 0..n {
        for w in (u + 1)..n {
            if filter.output(u) != filter.output(w) {
                mark(&mut incompatible, &mut queue, u, w);
            }
        }
    }

    // rev[y][t] = states stepping to t on y
    let mut rev = vec![vec![Vec::new(); n]; k];
    for v in 0..n {
        for (y, t) in filter.transitions_from(v) {
            rev[y][t].push(v);
        }
    }

    while let Some((a, b)) = queue.pop_front() {
        for per_symbol in &rev {
            for &u in &per_symbol[a] {
                for &w in &per_symbol[b] {
                    if u != w {
                        mark(&mut incompatible, &mut queue, u.min(w), u.max(w));
                    }
                }
            }
        }
    }

    let mut g = Graph::new(n);
    for u in 0..n {
        for w in (u + 1)..n {
            if !incompatible[u * n + w] {
                g.add_edge(u, w).expect("indices in range");
            }
        }
    }
    g
}

/// Closed neighborhood of `v`: its adjacent vertices plus `v` itself.
pub fn neighborhood(g: &Graph, v: usize) -> Result<BTreeSet<usize>> {
    g.check_vertex(v)?;
    let mut set: BTreeSet<usize> = g.neighbors(v).collect();
    set.insert(v);
    Ok(set)
}

/// Whether one closed neighborhood contains the other.
pub fn comparable_neighborhoods(g: &Graph, v: usize, w: usize) -> Result<bool> {
    g.check_vertex(v)?;
    g.check_vertex(w)?;
    if v == w {
        return Err(Error::DegeneratePair(v));
    }
    let nv = g.closed_neighborhood(v);
    let nw = g.closed_neighborhood(w);
    Ok(nv.is_subset(&nw) || nw.is_subset(&nv))
}

/// The subset of `pairs` whose endpoints have comparable neighborhoods.
/// Every pair must be an edge of `g` (zipper pairs always are).
pub fn repairable_pairs(g: &Graph, pairs: &BTreeSet<Pair>) -> Result<BTreeSet<Pair>> {
    let mut out = BTreeSet::new();
    for &p in pairs {
        if !g.has_pair_edge(p) {
            return Err(Error::NotAnEdge(p));
        }
        if comparable_neighborhoods(g, p.lo(), p.hi())? {
            out.insert(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{compatible_bruteforce, f_fork, f_line};
    use crate::FilterBuilder;

    #[test]
    fn line_is_fully_compatible() {
        let g = compatibility_graph(&f_line());
        assert_eq!(g.vertex_count(), 3);
        for u in 0..3 {
            for w in (u + 1)..3 {
                assert!(g.has_edge(u, w));
            }
        }
    }

    #[test]
    fn fork_distinguishes_the_a_parents() {
        let g = compatibility_graph(&f_fork());
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn equal_outputs_without_transitions_are_compatible() {
        let mut b = FilterBuilder::new();
        b.state(0);
        b.state(0);
        let g = compatibility_graph(&b.build().unwrap());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn marking_fixpoint_matches_extension_enumeration_on_fixtures() {
        for f in [f_line(), f_fork(), crate::testutil::f_cycle()] {
            let g = compatibility_graph(&f);
            let n = f.state_count();
            let depth = n * n;
            for u in 0..n {
                for w in (u + 1)..n {
                    assert_eq!(
                        g.has_edge(u, w),
                        compatible_bruteforce(&f, u, w, depth),
                        "pair ({u},{w})"
                    );
                }
            }
        }
    }

    #[test]
    fn neighborhood_includes_self() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1).unwrap();
        assert_eq!(neighborhood(&g, 2).unwrap(), BTreeSet::from([2]));
        let g_line = compatibility_graph(&f_line());
        assert_eq!(
            neighborhood(&g_line, 0).unwrap(),
            BTreeSet::from([0, 1, 2])
        );
        let g_fork = compatibility_graph(&f_fork());
        assert_eq!(
            neighborhood(&g_fork, 2).unwrap(),
            BTreeSet::from([0, 1, 2])
        );
    }

    #[test]
    fn comparable_neighborhoods_examples() {
        let g_line = compatibility_graph(&f_line());
        assert!(comparable_neighborhoods(&g_line, 0, 2).unwrap());

        // N(0) = {0,2} and N(1) = {1,2}: neither contains the other.
        let g_fork = compatibility_graph(&f_fork());
        assert!(!comparable_neighborhoods(&g_fork, 0, 1).unwrap());

        // Path 0-1-2: N(0) = {0,1} is contained in N(1) = {0,1,2}.
        let mut path = Graph::new(3);
        path.add_edge(0, 1).unwrap();
        path.add_edge(1, 2).unwrap();
        assert!(comparable_neighborhoods(&path, 0, 1).unwrap());

        assert!(matches!(
            comparable_neighborhoods(&path, 1, 1),
            Err(Error::DegeneratePair(1))
        ));
    }

    #[test]
    fn repairable_pairs_examples() {
        let g_line = compatibility_graph(&f_line());
        let z2 = BTreeSet::from([Pair::new(0, 1), Pair::new(1, 2)]);
        assert_eq!(repairable_pairs(&g_line, &z2).unwrap(), z2);

        assert_eq!(
            repairable_pairs(&g_line, &BTreeSet::new()).unwrap(),
            BTreeSet::new()
        );

        let g_cycle = compatibility_graph(&crate::testutil::f_cycle());
        let z2 = BTreeSet::from([Pair::new(0, 1), Pair::new(2, 3)]);
        assert_eq!(repairable_pairs(&g_cycle, &z2).unwrap(), z2);

        let non_edge = BTreeSet::from([Pair::new(0, 1)]);
        let g_fork = compatibility_graph(&f_fork());
        assert!(matches!(
            repairable_pairs(&g_fork, &non_edge),
            Err(Error::NotAnEdge(_))
        ));
    }

    #[test]
    fn compatibility_is_symmetric() {
        for f in [f_line(), f_fork(), crate::testutil::f_cycle()] {
            let g = compatibility_graph(&f);
            for u in 0..g.vertex_count() {
                for w in 0..g.vertex_count() {
                    assert_eq!(g.has_edge(u, w), g.has_edge(w, u));
                }
            }
        }
    }
}
