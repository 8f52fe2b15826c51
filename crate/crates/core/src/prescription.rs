//! Prescriptions: fixed merge/split choices over a domain of constraint
//! pairs, and the enumeration of every downstream-enabled one.

use crate::error::{Error, Result};
use crate::graph::Pair;
use crate::zipper::{Downstream, PairGraph};
use fixedbitset::FixedBitSet;
use std::collections::BTreeSet;

/// A choice, for every pair in `domain`, of ON (must share a clique) or
/// OFF (must not). The OFF set is `domain` minus the ON set and is never
/// stored separately.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Prescription {
    domain: BTreeSet<Pair>,
    on: BTreeSet<Pair>,
}

impl Prescription {
    pub fn new(domain: BTreeSet<Pair>, on: BTreeSet<Pair>) -> Result<Self> {
        if let Some(stray) = on.iter().find(|p| !domain.contains(p)) {
            return Err(Error::BadPrescription(format!(
                "ON pair {stray} is outside the domain"
            )));
        }
        Ok(Prescription { domain, on })
    }

    pub fn domain(&self) -> &BTreeSet<Pair> {
        &self.domain
    }

    pub fn on_pairs(&self) -> &BTreeSet<Pair> {
        &self.on
    }

    pub fn off_pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.domain.iter().copied().filter(|p| !self.on.contains(p))
    }

    pub fn is_on(&self, p: Pair) -> bool {
        self.on.contains(&p)
    }

    pub fn is_off(&self, p: Pair) -> bool {
        self.domain.contains(&p) && !self.on.contains(&p)
    }

    /// Downstream-enabled: every pair strictly downstream (over the full
    /// relation, not just the domain) of an ON pair is ON or outside the
    /// domain.
    pub fn is_downstream_enabled(&self, downstream: &Downstream) -> bool {
        self.on.iter().all(|&a| {
            downstream
                .down_set(a)
                .into_iter()
                .all(|b| self.on.contains(&b) || !self.domain.contains(&b))
        })
    }
}

/// Whether a cover (any list of vertex sets) merges every ON pair into
/// some set and never co-locates an OFF pair.
pub fn is_faithful<S: AsRef<[usize]>>(cover: &[S], p: &Prescription) -> bool {
    let contains_pair = |s: &S, pair: Pair| {
        let s = s.as_ref();
        s.contains(&pair.lo()) && s.contains(&pair.hi())
    };
    p.on_pairs()
        .iter()
        .all(|&pair| cover.iter().any(|s| contains_pair(s, pair)))
        && p.off_pairs()
            .all(|pair| cover.iter().all(|s| !contains_pair(s, pair)))
}

/// Stream of every downstream-enabled prescription on the vertex set of
/// `pg`, each exactly once.
///
/// Recursive scheme, with the pivot's own vertex removed in both
/// branches: pick the live vertex `P` with the largest strict down-set
/// (ties to the smallest pair); the OFF branch removes `P` and everything
/// strictly upstream of it, the ON branch turns `P` and its strict
/// down-set ON and removes them. Up- and down-sets are computed within
/// the live subgraph, so a vertex on a cycle belongs to both of its own
/// sets and whole cycles switch together.
pub fn enum_ds(pg: &PairGraph) -> EnumDs<'_> {
    let live = pg.full_live();
    EnumDs {
        pg,
        stack: vec![Frame {
            live,
            on: FixedBitSet::with_capacity(pg.len()),
        }],
    }
}

struct Frame {
    live: FixedBitSet,
    on: FixedBitSet,
}

/// Iterator produced by [`enum_ds`].
pub struct EnumDs<'a> {
    pg: &'a PairGraph,
    stack: Vec<Frame>,
}

impl Iterator for EnumDs<'_> {
    type Item = Prescription;

    fn next(&mut self) -> Option<Prescription> {
        while let Some(frame) = self.stack.pop() {
            if frame.live.count_ones(..) == 0 {
                let domain = self.pg.vertices().iter().copied().collect();
                let on = frame.on.ones().map(|i| self.pg.pair(i)).collect();
                return Some(Prescription::new(domain, on).expect("ON indices are vertices"));
            }

            let pivot = frame
                .live
                .ones()
                .map(|v| (self.pg.reach_from(v, &frame.live).count_ones(..), v))
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)))
                .map(|(_, v)| v)
                .expect("live set is non-empty");
            let down = self.pg.reach_from(pivot, &frame.live);
            let up = self.pg.reach_to(pivot, &frame.live);

            // ON branch pushed first so the OFF branch is explored first.
            let mut on_live = frame.live.clone();
            on_live.difference_with(&down);
            on_live.remove(pivot);
            let mut on_on = frame.on.clone();
            on_on.union_with(&down);
            on_on.insert(pivot);
            self.stack.push(Frame {
                live: on_live,
                on: on_on,
            });

            let mut off_live = frame.live;
            off_live.difference_with(&up);
            off_live.remove(pivot);
            self.stack.push(Frame {
                live: off_live,
                on: frame.on,
            });
        }
        None
    }
}

/// Grow a downstream-enabled prescription to cover its boundary: pairs
/// outside the domain that sit strictly upstream of an OFF pair join the
/// domain as OFF, pairs strictly downstream of an ON pair join as ON.
/// The result is downstream enabled again.
pub fn boundary_inclusion(p: &Prescription, downstream: &Downstream) -> Result<Prescription> {
    if !p.is_downstream_enabled(downstream) {
        return Err(Error::NotDownstreamEnabled);
    }
    let mut f_off: BTreeSet<Pair> = BTreeSet::new();
    let mut f_on: BTreeSet<Pair> = BTreeSet::new();
    for &candidate in downstream.pairs() {
        if p.domain().contains(&candidate) {
            continue;
        }
        if p.off_pairs().any(|b| downstream.is_downstream(candidate, b)) {
            f_off.insert(candidate);
        }
        if p.on_pairs()
            .iter()
            .any(|&d| downstream.is_downstream(d, candidate))
        {
            f_on.insert(candidate);
        }
    }
    // Disjoint because an overlap would chain an ON pair to an OFF pair,
    // contradicting downstream-enabledness.
    debug_assert!(f_off.is_disjoint(&f_on));
    let mut domain = p.domain().clone();
    domain.extend(f_off.iter().copied());
    domain.extend(f_on.iter().copied());
    let mut on = p.on_pairs().clone();
    on.extend(f_on.iter().copied());
    Prescription::new(domain, on)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compat::compatibility_graph;
    use crate::testutil::{f_cycle, f_line};
    use crate::zipper::{build_pair_graph, build_zipper_constraints, downstream_relation,
        pair_sets, ZipperConstraint};

    fn line_setup() -> (Vec<ZipperConstraint>, Downstream, PairGraph) {
        let f = f_line();
        let z = build_zipper_constraints(&f, &compatibility_graph(&f));
        let ds = downstream_relation(&z);
        let pg = build_pair_graph(&z, &pair_sets(&z).all);
        (z, ds, pg)
    }

    fn on_sets(pg: &PairGraph) -> BTreeSet<BTreeSet<Pair>> {
        enum_ds(pg).map(|p| p.on_pairs().clone()).collect()
    }

    /// Reference enumeration: all subsets of the vertex set filtered by
    /// the downstream-enabled test over the graph's own reachability.
    fn bruteforce_on_sets(pg: &PairGraph) -> BTreeSet<BTreeSet<Pair>> {
        let n = pg.len();
        assert!(n <= 16);
        let live = pg.full_live();
        let mut out = BTreeSet::new();
        for mask in 0u32..(1 << n) {
            let on: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let enabled = on.iter().all(|&a| {
                pg.reach_from(a, &live)
                    .ones()
                    .all(|b| on.contains(&b))
            });
            if enabled {
                out.insert(on.iter().map(|&i| pg.pair(i)).collect());
            }
        }
        out
    }

    #[test]
    fn trivial_prescriptions_are_enabled() {
        let (z, ds, _) = line_setup();
        let domain = pair_sets(&z).all;
        let empty = Prescription::new(domain.clone(), BTreeSet::new()).unwrap();
        assert!(empty.is_downstream_enabled(&ds));
        let full = Prescription::new(domain.clone(), domain.clone()).unwrap();
        assert!(full.is_downstream_enabled(&ds));
    }

    #[test]
    fn source_on_target_off_is_not_enabled() {
        let (z, ds, _) = line_setup();
        let domain = pair_sets(&z).all;
        let p = Prescription::new(domain, BTreeSet::from([Pair::new(0, 1)])).unwrap();
        assert!(!p.is_downstream_enabled(&ds));
    }

    #[test]
    fn on_pairs_must_lie_in_the_domain() {
        assert!(Prescription::new(
            BTreeSet::new(),
            BTreeSet::from([Pair::new(0, 1)])
        )
        .is_err());
    }

    #[test]
    fn line_enumerates_three_prescriptions() {
        let (_, _, pg) = line_setup();
        let a = Pair::new(0, 1);
        let b = Pair::new(1, 2);
        assert_eq!(
            on_sets(&pg),
            BTreeSet::from([
                BTreeSet::new(),
                BTreeSet::from([b]),
                BTreeSet::from([a, b]),
            ])
        );
    }

    #[test]
    fn cycle_enumerates_all_or_nothing() {
        let f = f_cycle();
        let z = build_zipper_constraints(&f, &compatibility_graph(&f));
        let pg = build_pair_graph(&z, &pair_sets(&z).all);
        assert_eq!(
            on_sets(&pg),
            BTreeSet::from([
                BTreeSet::new(),
                BTreeSet::from([Pair::new(0, 1), Pair::new(2, 3)]),
            ])
        );
    }

    #[test]
    fn antichain_enumerates_every_subset() {
        let pairs: BTreeSet<Pair> = (0..4).map(|i| Pair::new(2 * i, 2 * i + 1)).collect();
        let pg = PairGraph::new(pairs, &[]).unwrap();
        assert_eq!(enum_ds(&pg).count(), 16);
        assert_eq!(on_sets(&pg).len(), 16);
    }

    #[test]
    fn enumeration_matches_bruteforce_on_random_graphs() {
        let mut rng = crate::gen::SplitMix64::new(0xda7a);
        for round in 0..300 {
            let n = 1 + (rng.next_u64() as usize) % 9;
            let pairs: Vec<Pair> = (0..n).map(|i| Pair::new(2 * i, 2 * i + 1)).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.next_u64().is_multiple_of(3) {
                        edges.push((pairs[i], pairs[j]));
                    }
                }
            }
            let pg = PairGraph::new(pairs.iter().copied().collect(), &edges).unwrap();
            let enumerated: Vec<BTreeSet<Pair>> =
                enum_ds(&pg).map(|p| p.on_pairs().clone()).collect();
            let as_set: BTreeSet<BTreeSet<Pair>> = enumerated.iter().cloned().collect();
            assert_eq!(as_set.len(), enumerated.len(), "round {round}: duplicates");
            assert_eq!(as_set, bruteforce_on_sets(&pg), "round {round}");

            let poset = crate::zipper::condensation_poset(&pg);
            assert!(
                (enumerated.len() as u128) <= poset.prescription_bound(),
                "round {round}: {} prescriptions exceed bound {}",
                enumerated.len(),
                poset.prescription_bound()
            );
        }
    }

    #[test]
    fn classes_switch_together() {
        let f = f_cycle();
        let z = build_zipper_constraints(&f, &compatibility_graph(&f));
        let pg = build_pair_graph(&z, &pair_sets(&z).all);
        let poset = crate::zipper::condensation_poset(&pg);
        for p in enum_ds(&pg) {
            for class in &poset.classes {
                let on_count = class.iter().filter(|&&pair| p.is_on(pair)).count();
                assert!(on_count == 0 || on_count == class.len());
            }
        }
    }

    #[test]
    fn boundary_inclusion_is_identity_on_the_full_domain() {
        let (z, ds, pg) = line_setup();
        let _ = z;
        for p in enum_ds(&pg) {
            let grown = boundary_inclusion(&p, &ds).unwrap();
            assert_eq!(&grown, &p);
        }
    }

    #[test]
    fn boundary_inclusion_requires_enabledness() {
        let (z, ds, _) = line_setup();
        let domain = pair_sets(&z).all;
        let bad = Prescription::new(domain, BTreeSet::from([Pair::new(0, 1)])).unwrap();
        assert!(matches!(
            boundary_inclusion(&bad, &ds),
            Err(Error::NotDownstreamEnabled)
        ));
    }

    #[test]
    fn boundary_inclusion_pulls_in_the_chain() {
        // Chain p1 -> p2 -> p3 with domain {p2} and p2 turned ON.
        let p1 = Pair::new(0, 1);
        let p2 = Pair::new(2, 3);
        let p3 = Pair::new(4, 5);
        let z = vec![
            ZipperConstraint {
                source: p1,
                target: p2,
                obs: 0,
            },
            ZipperConstraint {
                source: p2,
                target: p3,
                obs: 0,
            },
        ];
        let ds = downstream_relation(&z);
        let p = Prescription::new(BTreeSet::from([p2]), BTreeSet::from([p2])).unwrap();
        let grown = boundary_inclusion(&p, &ds).unwrap();
        assert_eq!(grown.domain(), &BTreeSet::from([p2, p3]));
        assert_eq!(grown.on_pairs(), &BTreeSet::from([p2, p3]));
        assert!(grown.is_downstream_enabled(&ds));

        // Same domain, p2 OFF: p1 joins as OFF.
        let p = Prescription::new(BTreeSet::from([p2]), BTreeSet::new()).unwrap();
        let grown = boundary_inclusion(&p, &ds).unwrap();
        assert_eq!(grown.domain(), &BTreeSet::from([p1, p2]));
        assert!(grown.on_pairs().is_empty());
        assert!(grown.is_downstream_enabled(&ds));
    }

    #[test]
    fn boundary_inclusion_with_no_external_pairs_is_identity() {
        let (z, ds, _) = line_setup();
        let domain = pair_sets(&z).all;
        let p = Prescription::new(domain.clone(), BTreeSet::new()).unwrap();
        // OFF everywhere but nothing upstream outside the domain.
        let grown = boundary_inclusion(&p, &ds).unwrap();
        assert_eq!(grown.domain(), &domain);
        assert!(grown.on_pairs().is_empty());
    }

    #[test]
    fn boundary_inclusion_result_is_enabled_on_random_instances() {
        let mut rng = crate::gen::SplitMix64::new(0xb0b);
        for _ in 0..200 {
            let n = 2 + (rng.next_u64() as usize) % 6;
            let pairs: Vec<Pair> = (0..n).map(|i| Pair::new(2 * i, 2 * i + 1)).collect();
            let mut z = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.next_u64().is_multiple_of(3) {
                        z.push(ZipperConstraint {
                            source: pairs[i],
                            target: pairs[j],
                            obs: 0,
                        });
                    }
                }
            }
            let ds = downstream_relation(&z);
            let domain: BTreeSet<Pair> = pairs
                .iter()
                .copied()
                .filter(|_| rng.next_u64().is_multiple_of(2))
                .collect();
            let pg = ds.restriction(&domain);
            for p in enum_ds(&pg) {
                assert!(p.is_downstream_enabled(&ds));
                let grown = boundary_inclusion(&p, &ds).unwrap();
                assert!(grown.is_downstream_enabled(&ds));
                assert!(grown.domain().is_superset(p.domain()));
                assert!(grown.on_pairs().is_superset(p.on_pairs()));
            }
        }
    }
}
