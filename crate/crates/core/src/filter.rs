//! Deterministic combinatorial filters: construction, validation, tracing,
//! reachability pruning, and output simulation.

use crate::error::{Error, Result};
use std::collections::VecDeque;
use std::fmt;

pub type StateId = usize;
pub type ObsId = usize;
pub type OutputId = usize;

/// A well-formedness violation found while ingesting a filter.
///
/// Violations are data, not failures: `validate` reports all of them and
/// leaves the decision to the caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    BadInitial { initial: usize, states: usize },
    DuplicateStateId { id: usize },
    NonDenseStateIds { states: usize, max_id: usize },
    DuplicateObservation { label: String },
    UnknownObservationLabel { label: String },
    DanglingSource { from: usize },
    DanglingTarget { from: usize, obs: usize, to: usize },
    UnknownObservation { from: usize, obs: usize },
    NondeterministicTransition { from: usize, obs: usize },
}

impl Violation {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NoStates => "NoStates",
            Violation::BadInitial { .. } => "BadInitial",
            Violation::DuplicateStateId { .. } => "DuplicateStateId",
            Violation::NonDenseStateIds { .. } => "NonDenseStateIds",
            Violation::DuplicateObservation { .. } => "DuplicateObservation",
            Violation::UnknownObservationLabel { .. } => "UnknownObservationLabel",
            Violation::DanglingSource { .. } => "DanglingSource",
            Violation::DanglingTarget { .. } => "DanglingTarget",
            Violation::UnknownObservation { .. } => "UnknownObservation",
            Violation::NondeterministicTransition { .. } => "NondeterministicTransition",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "NoStates: a filter needs at least one state"),
            Violation::BadInitial { initial, states } => {
                write!(f, "BadInitial: initial state {initial} not in 0..{states}")
            }
            Violation::DuplicateStateId { id } => {
                write!(f, "DuplicateStateId: state id {id} declared twice")
            }
            Violation::NonDenseStateIds { states, max_id } => write!(
                f,
                "NonDenseStateIds: {states} states but ids reach {max_id}; ids must be 0..{states}"
            ),
            Violation::DuplicateObservation { label } => {
                write!(f, "DuplicateObservation: symbol {label:?} declared twice")
            }
            Violation::UnknownObservationLabel { label } => {
                write!(f, "UnknownObservationLabel: symbol {label:?} not in the alphabet")
            }
            Violation::DanglingSource { from } => {
                write!(f, "DanglingSource: transition from nonexistent state {from}")
            }
            Violation::DanglingTarget { from, obs, to } => write!(
                f,
                "DanglingTarget: transition ({from}, {obs}) points at nonexistent state {to}"
            ),
            Violation::UnknownObservation { from, obs } => write!(
                f,
                "UnknownObservation: transition from {from} uses observation {obs} outside the alphabet"
            ),
            Violation::NondeterministicTransition { from, obs } => write!(
                f,
                "NondeterministicTransition: two targets recorded for ({from}, {obs})"
            ),
        }
    }
}

/// Accumulates raw filter data and checks the well-formedness invariants
/// before a [`Filter`] is built. States receive dense ids in the order
/// they are added.
#[derive(Clone, Debug, Default)]
pub struct FilterBuilder {
    initial: StateId,
    outputs: Vec<OutputId>,
    state_labels: Vec<Option<String>>,
    obs_labels: Vec<String>,
    transitions: Vec<(StateId, ObsId, StateId)>,
}

impl FilterBuilder {
    pub fn new() -> Self {
        FilterBuilder::default()
    }

    pub fn observation(&mut self, label: impl Into<String>) -> ObsId {
        self.obs_labels.push(label.into());
        self.obs_labels.len() - 1
    }

    pub fn alphabet<I, S>(&mut self, labels: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for l in labels {
            self.observation(l);
        }
        self
    }

    pub fn state(&mut self, output: OutputId) -> StateId {
        self.outputs.push(output);
        self.state_labels.push(None);
        self.outputs.len() - 1
    }

    pub fn labeled_state(&mut self, output: OutputId, label: impl Into<String>) -> StateId {
        let id = self.state(output);
        self.state_labels[id] = Some(label.into());
        id
    }

    pub fn initial(&mut self, v: StateId) -> &mut Self {
        self.initial = v;
        self
    }

    pub fn transition(&mut self, from: StateId, obs: ObsId, to: StateId) -> &mut Self {
        self.transitions.push((from, obs, to));
        self
    }

    /// All well-formedness violations in the data so far; empty iff a
    /// call to [`FilterBuilder::build`] would succeed.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.outputs.len();
        let mut violations = Vec::new();
        if n == 0 {
            violations.push(Violation::NoStates);
        }
        if self.initial >= n {
            violations.push(Violation::BadInitial {
                initial: self.initial,
                states: n,
            });
        }
        for (i, label) in self.obs_labels.iter().enumerate() {
            if self.obs_labels[..i].contains(label) {
                violations.push(Violation::DuplicateObservation {
                    label: label.clone(),
                });
            }
        }
        let mut seen: Vec<Option<StateId>> = vec![None; n * self.obs_labels.len()];
        for &(from, obs, to) in &self.transitions {
            if from >= n {
                violations.push(Violation::DanglingSource { from });
                continue;
            }
            if obs >= self.obs_labels.len() {
                violations.push(Violation::UnknownObservation { from, obs });
                continue;
            }
            if to >= n {
                violations.push(Violation::DanglingTarget { from, obs, to });
                continue;
            }
            let slot = &mut seen[from * self.obs_labels.len() + obs];
            match *slot {
                None => *slot = Some(to),
                // Re-recording the same target is idempotent; a distinct
                // target breaks the partial-function invariant.
                Some(prev) if prev == to => {}
                Some(_) => violations.push(Violation::NondeterministicTransition { from, obs }),
            }
        }
        violations
    }

    pub fn build(self) -> Result<Filter> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidFilter(violations));
        }
        let n = self.outputs.len();
        let k = self.obs_labels.len();
        let mut transitions = vec![vec![None; k]; n];
        for (from, obs, to) in self.transitions {
            transitions[from][obs] = Some(to);
        }
        Ok(Filter {
            initial: self.initial,
            outputs: self.outputs,
            transitions,
            obs_labels: self.obs_labels,
            state_labels: self.state_labels,
        })
    }
}

/// A deterministic filter: dense states `0..n`, an initial state, a finite
/// observation alphabet, a partial transition function and a total output
/// function. Immutable once built, so all operations are read-only and
/// safe to share across threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filter {
    initial: StateId,
    outputs: Vec<OutputId>,
    transitions: Vec<Vec<Option<StateId>>>,
    obs_labels: Vec<String>,
    state_labels: Vec<Option<String>>,
}

/// Result of tracing an observation sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub end: StateId,
    /// Output of every visited state, starting state included.
    pub outputs: Vec<OutputId>,
}

/// A filter together with the renumbering that produced it.
#[derive(Clone, Debug)]
pub struct Pruned {
    pub filter: Filter,
    /// `old_to_new[v]` is the new id of old state `v`, `None` if dropped.
    pub old_to_new: Vec<Option<StateId>>,
}

/// Outcome of an output-simulation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Simulation {
    Holds,
    /// A shortest sequence traceable on the spec but not reproduced by the
    /// candidate, ties broken by smallest observation id.
    Refuted { witness: Vec<ObsId> },
}

impl Simulation {
    pub fn holds(&self) -> bool {
        matches!(self, Simulation::Holds)
    }

    pub fn witness(&self) -> Option<&[ObsId]> {
        match self {
            Simulation::Holds => None,
            Simulation::Refuted { witness } => Some(witness),
        }
    }
}

impl Filter {
    pub fn builder() -> FilterBuilder {
        FilterBuilder::new()
    }

    pub fn state_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.outputs.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn alphabet_size(&self) -> usize {
        self.obs_labels.len()
    }

    pub fn obs_labels(&self) -> &[String] {
        &self.obs_labels
    }

    pub fn obs_label(&self, y: ObsId) -> &str {
        &self.obs_labels[y]
    }

    pub fn obs_by_label(&self, label: &str) -> Option<ObsId> {
        self.obs_labels.iter().position(|l| l == label)
    }

    pub fn output(&self, v: StateId) -> OutputId {
        self.outputs[v]
    }

    pub fn state_label(&self, v: StateId) -> Option<&str> {
        self.state_labels[v].as_deref()
    }

    pub fn step(&self, v: StateId, y: ObsId) -> Option<StateId> {
        self.transitions[v][y]
    }

    pub fn transitions_from(&self, v: StateId) -> impl Iterator<Item = (ObsId, StateId)> + '_ {
        self.transitions[v]
            .iter()
            .enumerate()
            .filter_map(|(y, t)| t.map(|t| (y, t)))
    }

    /// Re-checks the construction invariants. Always empty for values built
    /// through [`FilterBuilder`]; exists so tests and tools can audit any
    /// filter they are handed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut b = FilterBuilder::new();
        b.initial = self.initial;
        b.outputs = self.outputs.clone();
        b.state_labels = self.state_labels.clone();
        b.obs_labels = self.obs_labels.clone();
        for v in self.states() {
            for (y, t) in self.transitions_from(v) {
                b.transition(v, y, t);
            }
        }
        b.validate()
    }

    /// Trace `seq` starting from `from`, collecting the output of every
    /// visited state. `Ok(None)` when some step is undefined.
    pub fn trace(&self, from: StateId, seq: &[ObsId]) -> Result<Option<Trace>> {
        if from >= self.state_count() {
            return Err(Error::UnknownState(from));
        }
        let mut outputs = Vec::with_capacity(seq.len() + 1);
        let mut cur = from;
        outputs.push(self.outputs[cur]);
        for &y in seq {
            if y >= self.alphabet_size() {
                return Err(Error::UnknownObservation(y));
            }
            match self.transitions[cur][y] {
                Some(next) => {
                    cur = next;
                    outputs.push(self.outputs[cur]);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(Trace { end: cur, outputs }))
    }

    /// Restrict to the states reachable from the initial state. Surviving
    /// states keep their relative order, so an already-reachable filter
    /// maps through the identity.
    pub fn prune_unreachable(&self) -> Pruned {
        let n = self.state_count();
        let mut reachable = vec![false; n];
        let mut queue = VecDeque::new();
        reachable[self.initial] = true;
        queue.push_back(self.initial);
        while let Some(v) = queue.pop_front() {
            for (_, t) in self.transitions_from(v) {
                if !reachable[t] {
                    reachable[t] = true;
                    queue.push_back(t);
                }
            }
        }
        let mut old_to_new = vec![None; n];
        let mut next = 0;
        for v in 0..n {
            if reachable[v] {
                old_to_new[v] = Some(next);
                next += 1;
            }
        }
        let mut b = FilterBuilder::new();
        b.alphabet(self.obs_labels.iter().cloned());
        for (v, _) in reachable.iter().enumerate().filter(|(_, &r)| r) {
            match &self.state_labels[v] {
                Some(l) => b.labeled_state(self.outputs[v], l.clone()),
                None => b.state(self.outputs[v]),
            };
        }
        b.initial(old_to_new[self.initial].expect("initial state is reachable"));
        for v in 0..n {
            if let Some(new_v) = old_to_new[v] {
                for (y, t) in self.transitions_from(v) {
                    b.transition(new_v, y, old_to_new[t].expect("target of reachable state"));
                }
            }
        }
        Pruned {
            filter: b.build().expect("pruning preserves validity"),
            old_to_new,
        }
    }
}

/// Decides whether every observation sequence traceable on `spec` from its
/// initial state is traceable on `candidate` with an identical output
/// stream. Runs a breadth-first search over the product of state pairs;
/// a pair fails when outputs differ or a step defined on the spec side is
/// undefined on the candidate side. Failures come with a shortest witness,
/// ties broken by smallest observation id.
pub fn output_simulates(spec: &Filter, candidate: &Filter) -> Result<Simulation> {
    if spec.obs_labels != candidate.obs_labels {
        return Err(Error::AlphabetMismatch);
    }
    let nc = candidate.state_count();
    let pair_index = |u: StateId, w: StateId| u * nc + w;

    if spec.output(spec.initial()) != candidate.output(candidate.initial()) {
        return Ok(Simulation::Refuted { witness: vec![] });
    }

    let mut visited = vec![false; spec.state_count() * nc];
    let mut parent: Vec<Option<(usize, ObsId)>> = vec![None; spec.state_count() * nc];
    let start = pair_index(spec.initial(), candidate.initial());
    visited[start] = true;
    let mut queue = VecDeque::new();
    queue.push_back((spec.initial(), candidate.initial()));

    let witness_through = |parent: &[Option<(usize, ObsId)>], last: usize, y: ObsId| {
        let mut seq = vec![y];
        let mut cur = last;
        while let Some((prev, step)) = parent[cur] {
            seq.push(step);
            cur = prev;
        }
        seq.reverse();
        seq
    };

    while let Some((u, w)) = queue.pop_front() {
        for y in 0..spec.alphabet_size() {
            let Some(u2) = spec.step(u, y) else { continue };
            let Some(w2) = candidate.step(w, y) else {
                return Ok(Simulation::Refuted {
                    witness: witness_through(&parent, pair_index(u, w), y),
                });
            };
            if spec.output(u2) != candidate.output(w2) {
                return Ok(Simulation::Refuted {
                    witness: witness_through(&parent, pair_index(u, w), y),
                });
            }
            let idx = pair_index(u2, w2);
            if !visited[idx] {
                visited[idx] = true;
                parent[idx] = Some((pair_index(u, w), y));
                queue.push_back((u2, w2));
            }
        }
    }
    Ok(Simulation::Holds)
}
