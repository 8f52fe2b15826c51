//! The end-to-end minimum zipped clique cover solver and the filter
//! minimization pipeline built on it.
//!
//! One solve walks every downstream-enabled prescription over the chosen
//! domain, bakes each into an augmented graph, solves the unconstrained
//! cover exactly, distills the result back, repairs the constraints left
//! to the repairable set, and keeps the smallest verified cover. A
//! brute-force search over explicit clique combinations provides an
//! independent oracle at small scale.

use crate::augment::augment;
use crate::compat::{compatibility_graph, comparable_neighborhoods, repairable_pairs};
use crate::cover::{min_clique_cover, verify_cover, CliqueCover, CoverViolation};
use crate::error::{Error, Result};
use crate::filter::{output_simulates, Filter, FilterBuilder};
use crate::graph::{Graph, Pair};
use crate::prescription::{boundary_inclusion, enum_ds, Prescription};
use crate::zipper::{build_zipper_constraints, condensation_poset, downstream_relation, pair_sets,
    ZipperConstraint};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

/// A graph plus zipper constraints; the unit the solver works on.
/// Constraint endpoints must be edges of the graph.
#[derive(Clone, Debug)]
pub struct MzccInstance {
    graph: Graph,
    constraints: Vec<ZipperConstraint>,
    obs_labels: Vec<String>,
}

impl MzccInstance {
    pub fn new(
        graph: Graph,
        mut constraints: Vec<ZipperConstraint>,
        obs_labels: Vec<String>,
    ) -> Result<Self> {
        for c in &constraints {
            for pair in [c.source, c.target] {
                if !graph.has_pair_edge(pair) {
                    return Err(Error::BadInstance(format!(
                        "constraint {c} uses pair {pair} which is not an edge"
                    )));
                }
            }
            if c.obs >= obs_labels.len() {
                return Err(Error::BadInstance(format!(
                    "constraint {c} names observation {} outside the alphabet",
                    c.obs
                )));
            }
        }
        constraints.sort_unstable();
        constraints.dedup();
        Ok(MzccInstance {
            graph,
            constraints,
            obs_labels,
        })
    }

    /// The instance induced by a filter: its compatibility graph and its
    /// determinism-enforcing zipper constraints.
    pub fn from_filter(filter: &Filter) -> Self {
        let graph = compatibility_graph(filter);
        let constraints = build_zipper_constraints(filter, &graph);
        MzccInstance {
            graph,
            constraints,
            obs_labels: filter.obs_labels().to_vec(),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn constraints(&self) -> &[ZipperConstraint] {
        &self.constraints
    }

    pub fn obs_labels(&self) -> &[String] {
        &self.obs_labels
    }
}

/// A defect of a candidate zipped cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZippedViolation {
    Cover(CoverViolation),
    /// The source pair is merged in some clique but no clique holds the
    /// target pair.
    ZipperViolated { constraint: ZipperConstraint },
}

impl fmt::Display for ZippedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZippedViolation::Cover(v) => v.fmt(f),
            ZippedViolation::ZipperViolated { constraint } => {
                write!(f, "zipper constraint {constraint} violated")
            }
        }
    }
}

/// Audit `cover` as a solution for `inst`: it must be a clique cover of
/// the graph, and whenever a constraint's source pair shares a clique its
/// target pair must share one too.
pub fn verify_zipped_cover(inst: &MzccInstance, cover: &CliqueCover) -> Vec<ZippedViolation> {
    let mut out: Vec<ZippedViolation> = verify_cover(&inst.graph, cover)
        .into_iter()
        .map(ZippedViolation::Cover)
        .collect();
    for &c in &inst.constraints {
        if cover.merges(c.source.lo(), c.source.hi())
            && !cover.merges(c.target.lo(), c.target.hi())
        {
            out.push(ZippedViolation::ZipperViolated { constraint: c });
        }
    }
    out
}

/// Repair a cover so every constraint with both pairs in `r_under` holds,
/// without growing the cover. For each such constraint's target pair, the
/// endpoint with the smaller closed neighborhood is joined by the other in
/// every clique it occupies; comparable neighborhoods make the grown sets
/// cliques again. Pairs in `r_under` must be edges with comparable
/// neighborhoods.
pub fn repair(
    cover: &CliqueCover,
    r_under: &BTreeSet<Pair>,
    g: &Graph,
    constraints: &[ZipperConstraint],
) -> Result<CliqueCover> {
    for &p in r_under {
        if !g.has_pair_edge(p) {
            return Err(Error::NotAnEdge(p));
        }
        if !comparable_neighborhoods(g, p.lo(), p.hi())? {
            return Err(Error::NotRepairable(p));
        }
    }

    let mut interior_targets: Vec<Pair> = Vec::new();
    for c in constraints {
        if r_under.contains(&c.source)
            && r_under.contains(&c.target)
            && !interior_targets.contains(&c.target)
        {
            interior_targets.push(c.target);
        }
    }

    let mut cliques: Vec<Vec<usize>> = cover.cliques().to_vec();
    for pair in interior_targets {
        let (u, w) = (pair.lo(), pair.hi());
        let nu = g.closed_neighborhood(u);
        let nw = g.closed_neighborhood(w);
        let (anchor, joiner) = if nu.is_subset(&nw) { (u, w) } else { (w, u) };
        for clique in &mut cliques {
            if clique.contains(&anchor) && !clique.contains(&joiner) {
                clique.push(joiner);
            }
        }
    }

    let mut deduped: Vec<Vec<usize>> = Vec::new();
    for mut clique in cliques {
        clique.sort_unstable();
        if !deduped.contains(&clique) {
            deduped.push(clique);
        }
    }
    Ok(CliqueCover::from_parts(cover.graph_fingerprint(), deduped))
}

/// Domain selection for the prescription enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// Enumerate over Z² minus the repairable pairs and repair the rest.
    #[serde(rename = "full")]
    Full,
    /// Enumerate over all of Z²; nothing is left to repair.
    #[serde(rename = "no-repair")]
    NoRepair,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Mode::Full),
            "no-repair" => Ok(Mode::NoRepair),
            other => Err(format!("unknown mode {other:?} (expected full or no-repair)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub mode: Mode,
    /// Worker threads for the prescription loop; 1 keeps everything on
    /// the calling thread. Results are identical for any value.
    pub jobs: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: Mode::Full,
            jobs: 1,
        }
    }
}

/// Instance statistics gathered during a solve.
#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub vertices: usize,
    pub edges: usize,
    pub constraints: usize,
    /// |Z²|: distinct pairs appearing in constraints.
    pub z2_pairs: usize,
    /// |R|: pairs with comparable neighborhoods (0 in no-repair mode).
    pub repairable_pairs: usize,
    /// |D|: pairs in the enumeration domain.
    pub domain_pairs: usize,
    /// Classes of the domain poset, its height and width, and the
    /// (2 + height)^width cap on prescriptions.
    pub classes: usize,
    pub height: usize,
    pub width: usize,
    pub prescription_bound: u128,
    pub prescriptions_evaluated: usize,
}

/// One line per evaluated prescription.
#[derive(Clone, Debug, Serialize)]
pub struct PrescriptionLog {
    pub index: usize,
    pub on: Vec<Pair>,
    /// Domain size after boundary inclusion.
    pub extended_domain: usize,
    pub aug_vertices: usize,
    pub cover_size: usize,
    pub repaired_size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub version: u32,
    /// The mode whose results this report holds (after any fallback).
    pub mode: Mode,
    /// True when full-mode repair produced an unverifiable cover and the
    /// solve re-ran over the whole constraint pair set. Repairing can
    /// merge bystander pairs while growing cliques, and such a merge may
    /// break a constraint no repair is allowed to fix (rare, but real
    /// filters can produce it); the no-repair domain never needs repair,
    /// so it is always sound.
    pub repair_fallback: bool,
    pub best: Vec<Vec<usize>>,
    pub best_size: usize,
    pub stats: SolveStats,
    pub prescriptions: Vec<PrescriptionLog>,
    pub elapsed_seconds: f64,
    #[serde(skip)]
    pub cover: CliqueCover,
}

/// Solve the instance: the returned cover has minimum cardinality among
/// all covers satisfying every zipper constraint, and has been verified.
///
/// In [`Mode::Full`], a repaired cover that fails verification triggers a
/// transparent re-solve in [`Mode::NoRepair`] (see
/// [`SolveReport::repair_fallback`]); in [`Mode::NoRepair`] the same
/// condition is a hard internal error, because that path cannot break.
pub fn solve_mzcc(inst: &MzccInstance, opts: &SolveOptions) -> Result<SolveReport> {
    match solve_mzcc_once(inst, opts) {
        Err(Error::RepairedCoverInvalid { .. }) if opts.mode == Mode::Full => {
            let mut report = solve_mzcc_once(
                inst,
                &SolveOptions {
                    mode: Mode::NoRepair,
                    jobs: opts.jobs,
                },
            )?;
            report.repair_fallback = true;
            Ok(report)
        }
        other => other,
    }
}

fn solve_mzcc_once(inst: &MzccInstance, opts: &SolveOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let g = &inst.graph;
    let sets = pair_sets(&inst.constraints);
    let repairable = match opts.mode {
        Mode::Full => repairable_pairs(g, &sets.all)?,
        Mode::NoRepair => BTreeSet::new(),
    };
    let domain: BTreeSet<Pair> = sets.all.difference(&repairable).copied().collect();
    let downstream = downstream_relation(&inst.constraints);
    // Edges of the enumeration graph are the downstream relation itself,
    // restricted to the domain: reachability must agree with the full
    // relation even when a chain passes through repairable pairs outside
    // the domain, or enumerated prescriptions would not be downstream
    // enabled.
    let enum_graph = downstream.restriction(&domain);
    let poset = condensation_poset(&enum_graph);

    let evaluate = |(index, prescription): (usize, Prescription)| -> Result<(PrescriptionLog, CliqueCover)> {
        let grown = boundary_inclusion(&prescription, &downstream)?;
        let aug = augment(g, &grown)?;
        let cover_plus = min_clique_cover(aug.graph());
        let distilled = aug.distill(&cover_plus)?;
        if distilled.len() != cover_plus.len() {
            return Err(Error::Internal(format!(
                "prescription {index}: minimal augmented cover of size {} distilled to {}",
                cover_plus.len(),
                distilled.len()
            )));
        }
        let r_under: BTreeSet<Pair> = repairable
            .difference(grown.domain())
            .copied()
            .collect();
        let repaired = repair(&distilled, &r_under, g, &inst.constraints)?;
        let violations = verify_zipped_cover(inst, &repaired);
        if !violations.is_empty() {
            return Err(Error::RepairedCoverInvalid {
                prescription: index,
                violations: violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            });
        }
        let log = PrescriptionLog {
            index,
            on: prescription.on_pairs().iter().copied().collect(),
            extended_domain: grown.domain().len(),
            aug_vertices: aug.vertex_count(),
            cover_size: cover_plus.len(),
            repaired_size: repaired.len(),
        };
        Ok((log, repaired))
    };

    let mut results: Vec<(PrescriptionLog, CliqueCover)> = if opts.jobs <= 1 {
        enum_ds(&enum_graph)
            .enumerate()
            .map(evaluate)
            .collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| {
            enum_ds(&enum_graph)
                .enumerate()
                .par_bridge()
                .map(evaluate)
                .collect::<Result<Vec<_>>>()
        })?
    };
    results.sort_by_key(|(log, _)| log.index);

    // All-singletons baseline: vacuously zipper-satisfying, replaced only
    // by strictly smaller covers, earliest prescription first.
    let singletons = CliqueCover::new(g, (0..g.vertex_count()).map(|v| vec![v]).collect());
    let mut best = &singletons;
    for (_, cover) in &results {
        if cover.len() < best.len() {
            best = cover;
        }
    }
    let best = best.clone();
    debug_assert!(verify_zipped_cover(inst, &best).is_empty());

    let stats = SolveStats {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        constraints: inst.constraints.len(),
        z2_pairs: sets.all.len(),
        repairable_pairs: repairable.len(),
        domain_pairs: domain.len(),
        classes: poset.classes.len(),
        height: poset.height,
        width: poset.width,
        prescription_bound: poset.prescription_bound(),
        prescriptions_evaluated: results.len(),
    };
    Ok(SolveReport {
        version: 1,
        mode: opts.mode,
        repair_fallback: false,
        best: best.cliques().to_vec(),
        best_size: best.len(),
        stats,
        prescriptions: results.into_iter().map(|(log, _)| log).collect(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        cover: best,
    })
}

/// Run both domain selections and check they agree on the optimal size;
/// returns the full-mode report. The no-repair path (domain = all of Z²)
/// needs no repair step, so agreement exercises the repair machinery
/// against the simpler route.
pub fn solve_cross_checked(inst: &MzccInstance, jobs: usize) -> Result<SolveReport> {
    let full = solve_mzcc(
        inst,
        &SolveOptions {
            mode: Mode::Full,
            jobs,
        },
    )?;
    let no_repair = solve_mzcc(
        inst,
        &SolveOptions {
            mode: Mode::NoRepair,
            jobs,
        },
    )?;
    if full.best_size != no_repair.best_size {
        return Err(Error::Internal(format!(
            "mode disagreement: full found {}, no-repair found {}",
            full.best_size, no_repair.best_size
        )));
    }
    Ok(full)
}

/// Default vertex guard for [`brute_force_mzcc`].
pub const BRUTE_FORCE_GUARD: usize = 10;

/// Independent oracle: enumerate explicit clique combinations of
/// increasing size and return the first zipped cover found, `None` when
/// no cover of at most `max_size` cliques satisfies the constraints.
/// Refuses graphs larger than [`BRUTE_FORCE_GUARD`] vertices.
pub fn brute_force_mzcc(inst: &MzccInstance, max_size: usize) -> Result<Option<CliqueCover>> {
    brute_force_mzcc_guarded(inst, max_size, BRUTE_FORCE_GUARD)
}

pub fn brute_force_mzcc_guarded(
    inst: &MzccInstance,
    max_size: usize,
    guard: usize,
) -> Result<Option<CliqueCover>> {
    let n = inst.graph.vertex_count();
    if n > guard || guard > 31 {
        return Err(Error::SizeGuard {
            vertices: n,
            guard: guard.min(31),
        });
    }
    if n == 0 {
        return Ok(Some(CliqueCover::new(&inst.graph, Vec::new())));
    }

    // Every nonempty clique, canonically ordered by its sorted vertex
    // list, as vertex bitmasks.
    let mut clique_sets: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1 << n) {
        let verts: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if inst.graph.is_clique(&verts) {
            clique_sets.push(verts);
        }
    }
    clique_sets.sort();
    let masks: Vec<u32> = clique_sets
        .iter()
        .map(|c| c.iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();
    let pair_mask = |p: Pair| -> u32 { 1 << p.lo() | 1 << p.hi() };
    let constraint_masks: Vec<(u32, u32)> = inst
        .constraints
        .iter()
        .map(|c| (pair_mask(c.source), pair_mask(c.target)))
        .collect();
    let full: u32 = (1 << n) - 1;
    let largest = masks.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0);

    struct Search<'a> {
        masks: &'a [u32],
        constraint_masks: &'a [(u32, u32)],
        full: u32,
        largest: usize,
        k: usize,
    }

    impl Search<'_> {
        fn violated(&self, chosen: &[usize]) -> Option<u32> {
            for &(src, tgt) in self.constraint_masks {
                let src_merged = chosen.iter().any(|&i| self.masks[i] & src == src);
                if src_merged && !chosen.iter().any(|&i| self.masks[i] & tgt == tgt) {
                    return Some(tgt);
                }
            }
            None
        }

        fn dfs(&self, chosen: &mut Vec<usize>, covered: u32) -> bool {
            if covered == self.full {
                match self.violated(chosen) {
                    None => return true,
                    Some(target) => {
                        if chosen.len() == self.k {
                            return false;
                        }
                        for i in 0..self.masks.len() {
                            if self.masks[i] & target == target && !chosen.contains(&i) {
                                chosen.push(i);
                                if self.dfs(chosen, covered) {
                                    return true;
                                }
                                chosen.pop();
                            }
                        }
                        return false;
                    }
                }
            }
            if chosen.len() == self.k {
                return false;
            }
            let uncovered = (self.full & !covered).count_ones() as usize;
            if uncovered > (self.k - chosen.len()) * self.largest {
                return false;
            }
            let lowest = (self.full & !covered).trailing_zeros();
            for i in 0..self.masks.len() {
                if self.masks[i] >> lowest & 1 == 1 && !chosen.contains(&i) {
                    chosen.push(i);
                    if self.dfs(chosen, covered | self.masks[i]) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
    }

    for k in 1..=max_size {
        let search = Search {
            masks: &masks,
            constraint_masks: &constraint_masks,
            full,
            largest,
            k,
        };
        let mut chosen = Vec::new();
        if search.dfs(&mut chosen, 0) {
            let cliques = chosen.iter().map(|&i| clique_sets[i].clone()).collect();
            let cover = CliqueCover::new(&inst.graph, cliques);
            debug_assert!(verify_zipped_cover(inst, &cover).is_empty());
            return Ok(Some(cover));
        }
    }
    Ok(None)
}

/// Fold a verified zipped cover back into a filter: one state per clique,
/// the initial state is the lowest-indexed clique holding the original
/// initial state, outputs are inherited (members of a clique share one),
/// and each transition goes to the lowest-indexed clique containing all
/// defined children. The result is checked to output-simulate `filter`.
pub fn cover_to_filter(filter: &Filter, cover: &CliqueCover) -> Result<Filter> {
    let inst = MzccInstance::from_filter(filter);
    let violations = verify_zipped_cover(&inst, cover);
    if !violations.is_empty() {
        return Err(Error::BadCover(format!(
            "cover_to_filter input: {}",
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }

    let cliques = cover.cliques();
    let mut b = FilterBuilder::new();
    b.alphabet(filter.obs_labels().iter().cloned());
    for clique in cliques {
        let output = filter.output(clique[0]);
        if clique.iter().any(|&v| filter.output(v) != output) {
            return Err(Error::Internal(
                "clique members with distinct outputs survived verification".into(),
            ));
        }
        let label = clique
            .iter()
            .map(|&v| match filter.state_label(v) {
                Some(l) => l.to_string(),
                None => v.to_string(),
            })
            .collect::<Vec<_>>()
            .join(",");
        b.labeled_state(output, format!("{{{label}}}"));
    }

    let initial = cliques
        .iter()
        .position(|c| c.contains(&filter.initial()))
        .expect("verified cover contains every vertex");
    b.initial(initial);

    for (i, clique) in cliques.iter().enumerate() {
        for y in 0..filter.alphabet_size() {
            let children: BTreeSet<usize> = clique
                .iter()
                .filter_map(|&u| filter.step(u, y))
                .collect();
            if children.is_empty() {
                continue;
            }
            let target = cliques
                .iter()
                .position(|c| children.iter().all(|t| c.contains(t)))
                .ok_or_else(|| {
                    Error::Reconstruction(format!(
                        "no clique contains all {}-children of clique {i}",
                        filter.obs_label(y)
                    ))
                })?;
            b.transition(i, y, target);
        }
    }

    let result = b.build().map_err(|e| Error::Reconstruction(e.to_string()))?;
    match output_simulates(filter, &result)? {
        crate::filter::Simulation::Holds => Ok(result),
        crate::filter::Simulation::Refuted { witness } => Err(Error::Reconstruction(format!(
            "reconstructed filter fails output simulation, witness {witness:?}"
        ))),
    }
}

/// Minimize a filter: prune unreachable states, solve the induced zipped
/// cover instance, and fold the best cover back into a filter. The result
/// output-simulates the input and its state count is the minimum possible.
pub fn minimize_filter(filter: &Filter) -> Result<(Filter, SolveReport)> {
    minimize_filter_with(filter, &SolveOptions::default())
}

pub fn minimize_filter_with(filter: &Filter, opts: &SolveOptions) -> Result<(Filter, SolveReport)> {
    let pruned = filter.prune_unreachable().filter;
    let inst = MzccInstance::from_filter(&pruned);
    let report = solve_mzcc(&inst, opts)?;
    let result = cover_to_filter(&pruned, &report.cover)?;
    match output_simulates(filter, &result)? {
        crate::filter::Simulation::Holds => Ok((result, report)),
        crate::filter::Simulation::Refuted { witness } => Err(Error::Internal(format!(
            "minimized filter fails output simulation against the input, witness {witness:?}"
        ))),
    }
}
