//! Minimization of deterministic combinatorial filters.
//!
//! A filter maps streams of observations to streams of outputs. Minimizing
//! one means finding an output-equivalent filter with the fewest states.
//! This crate reduces that problem to a clique-cover problem on the
//! compatibility graph of the filter's states, constrained by *zipper
//! constraints* that keep the merged machine deterministic, and solves it
//! exactly:
//!
//! 1. build the compatibility graph and the zipper constraint collection
//!    ([`compat`], [`zipper`]);
//! 2. split constraint pairs into a repairable set and an enumeration
//!    domain, and enumerate the downstream-enabled prescriptions over the
//!    domain ([`prescription`]);
//! 3. for each prescription, augment the graph so the prescription is baked
//!    into its structure, solve an unconstrained minimum clique cover, and
//!    distill the result back ([`augment`], [`cover`]);
//! 4. repair the straggler constraints and keep the best cover, then fold
//!    the cover back into a filter ([`solver`]).
//!
//! Brute-force oracles for the whole pipeline live next to the solver so
//! every constructive claim can be cross-checked at small scale.

pub mod augment;
pub mod compat;
pub mod cover;
pub mod dot;
pub mod error;
pub mod filter;
pub mod gen;
pub mod graph;
pub mod io;
pub mod prescription;
pub mod solver;
pub mod zipper;

#[cfg(test)]
pub(crate) mod testutil;

pub use augment::{augment, AugVertex, AugmentedGraph};
pub use compat::{compatibility_graph, comparable_neighborhoods, neighborhood, repairable_pairs};
pub use cover::{greedy_cover, min_clique_cover, min_clique_cover_bounded, verify_cover,
    CliqueCover, CoverViolation};
pub use dot::{compatibility_dot, filter_dot, poset_dot};
pub use error::{Error, Result};
pub use filter::{output_simulates, Filter, FilterBuilder, ObsId, OutputId, Pruned, Simulation,
    StateId, Trace, Violation};
pub use gen::{enumerate_filters, random_filter, FilterEnumeration, GenSpec, SplitMix64};
pub use graph::{Graph, Pair};
pub use io::{parse_filter, parse_mzcc, serialize_cover, serialize_filter, serialize_mzcc,
    FORMAT_VERSION};
pub use prescription::{boundary_inclusion, enum_ds, is_faithful, EnumDs, Prescription};
pub use solver::{brute_force_mzcc, brute_force_mzcc_guarded, cover_to_filter, minimize_filter,
    minimize_filter_with, repair, solve_cross_checked, solve_mzcc, verify_zipped_cover, Mode,
    MzccInstance, PrescriptionLog, SolveOptions, SolveReport, SolveStats, ZippedViolation,
    BRUTE_FORCE_GUARD};
pub use zipper::{build_pair_graph, build_zipper_constraints, condensation_poset,
    downstream_relation, pair_sets, Downstream, PairGraph, PairPoset, PairSets, ZipperConstraint};
