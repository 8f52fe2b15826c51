//! Fuzzing over raw instances: arbitrary graphs with arbitrary constraint
//! collections, including shapes no filter can produce (one source pair
//! with two targets on the same symbol, a pair constrained to itself).
//! These drive the boundary-inclusion and repair machinery much harder
//! than filter-derived instances do, and historically exposed the repair
//! fallback: growing a clique during repair can merge a bystander pair
//! that the prescription holds OFF.

use filtmin::*;
use std::collections::BTreeSet;

#[test]
fn raw_instances_match_the_oracle_in_every_mode() {
    let mut rng = SplitMix64::new(0xfeed);
    let mut fallbacks = 0usize;
    let mut boundary_grew = 0usize;
    let mut straddlers = 0usize;
    let mut rounds = 0usize;
    for round in 0..2500 {
        let n = 3 + (rng.next_u64() as usize) % 6;
        let mut g = Graph::new(n);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.next_u64() % 100 < 55 {
                    g.add_edge(u, v).unwrap();
                    edges.push(Pair::new(u, v));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let k = (rng.next_u64() as usize) % 7;
        let mut constraints = Vec::new();
        for _ in 0..k {
            let s = edges[rng.next_below(edges.len() as u64) as usize];
            let t = edges[rng.next_below(edges.len() as u64) as usize];
            let y = (rng.next_u64() % 2) as usize;
            constraints.push(ZipperConstraint {
                source: s,
                target: t,
                obs: y,
            });
        }
        let inst =
            MzccInstance::new(g.clone(), constraints, vec!["a".into(), "b".into()]).unwrap();
        rounds += 1;

        let sets = pair_sets(inst.constraints());
        let repairable = repairable_pairs(&g, &sets.all).unwrap();
        let domain: BTreeSet<Pair> = sets.all.difference(&repairable).copied().collect();
        if inst.constraints().iter().any(|c| {
            (repairable.contains(&c.source) && domain.contains(&c.target))
                || (domain.contains(&c.source) && repairable.contains(&c.target))
        }) {
            straddlers += 1;
        }

        let oracle = brute_force_mzcc(&inst, n)
            .unwrap()
            .expect("singleton cover always satisfies");
        for (mode, jobs) in [(Mode::Full, 1), (Mode::NoRepair, 1), (Mode::Full, 4)] {
            let report = solve_mzcc(&inst, &SolveOptions { mode, jobs })
                .unwrap_or_else(|e| panic!("round {round} mode {mode:?}: {e}"));
            assert!(
                verify_zipped_cover(&inst, &report.cover).is_empty(),
                "round {round} mode {mode:?}: unverified cover"
            );
            assert_eq!(
                report.best_size,
                oracle.len(),
                "round {round} mode {mode:?}: solver {} vs oracle {}",
                report.best_size,
                oracle.len()
            );
            if mode == Mode::Full && jobs == 1 {
                if report.repair_fallback {
                    fallbacks += 1;
                }
                if report
                    .prescriptions
                    .iter()
                    .any(|l| l.extended_domain > report.stats.domain_pairs)
                {
                    boundary_grew += 1;
                }
            }
        }
        solve_cross_checked(&inst, 1).unwrap_or_else(|e| panic!("round {round}: {e}"));
    }
    // The corpus must actually reach the deep paths.
    assert!(rounds > 2000);
    assert!(fallbacks > 0, "no instance tripped the repair fallback");
    assert!(boundary_grew > 100, "boundary inclusion never grew a domain");
    assert!(straddlers > 100, "no straddling constraints generated");
    println!(
        "raw instances: {rounds} rounds, {fallbacks} repair fallbacks, boundary grew in {boundary_grew} solves, {straddlers} instances with straddling constraints"
    );
}
