//! Shared fixtures and independent brute-force oracles for unit tests.
//!
//! The oracles here deliberately avoid the implementation paths they are
//! used to check: simulation is decided by enumerating observation
//! sequences, compatibility by comparing outputs over enumerated common
//! extensions.

use crate::filter::{Filter, FilterBuilder, ObsId, StateId};

/// Three states in a chain 0 -a-> 1 -a-> 2, all outputs 0.
pub fn f_line() -> Filter {
    let mut b = FilterBuilder::new();
    b.observation("a");
    let s0 = b.state(0);
    let s1 = b.state(0);
    let s2 = b.state(0);
    b.initial(s0);
    b.transition(s0, 0, s1).transition(s1, 0, s2);
    b.build().unwrap()
}

/// Four states, two of them a-parents of distinct children, one child with
/// a different output: 0 -a-> 2, 1 -a-> 3, output(3) = 1, others 0.
pub fn f_fork() -> Filter {
    let mut b = FilterBuilder::new();
    b.observation("a");
    let s0 = b.state(0);
    let s1 = b.state(0);
    let s2 = b.state(0);
    let s3 = b.state(1);
    b.initial(s0);
    b.transition(s0, 0, s2).transition(s1, 0, s3);
    b.build().unwrap()
}

/// Four states, all outputs 0, zipper constraints forming a 2-cycle:
/// 0 -a-> 2, 1 -a-> 3, 2 -b-> 0, 3 -b-> 1.
pub fn f_cycle() -> Filter {
    let mut b = FilterBuilder::new();
    b.alphabet(["a", "b"]);
    let s0 = b.state(0);
    let s1 = b.state(0);
    let s2 = b.state(0);
    let s3 = b.state(0);
    b.initial(s0);
    b.transition(s0, 0, s2)
        .transition(s1, 0, s3)
        .transition(s2, 1, s0)
        .transition(s3, 1, s1);
    b.build().unwrap()
}

/// One state over alphabet {a} with the given output, optionally looping.
pub fn one_state_filter(output: usize, self_loop: bool) -> Filter {
    let mut b = FilterBuilder::new();
    b.observation("a");
    let s = b.state(output);
    b.initial(s);
    if self_loop {
        b.transition(s, 0, s);
    }
    b.build().unwrap()
}

/// All observation sequences over `alphabet_size` symbols with length
/// `0..=depth`, in (length, lexicographic) order.
pub fn all_sequences(alphabet_size: usize, depth: usize) -> Vec<Vec<ObsId>> {
    let mut out: Vec<Vec<ObsId>> = vec![vec![]];
    let mut frontier: Vec<Vec<ObsId>> = vec![vec![]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for seq in &frontier {
            for y in 0..alphabet_size {
                let mut s = seq.clone();
                s.push(y);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// First sequence (in (length, lex) order, up to `depth`) that is traceable
/// on `spec` from its initial state but not reproduced by `candidate`;
/// `None` when simulation holds to that depth.
pub fn simulation_counterexample(
    spec: &Filter,
    candidate: &Filter,
    depth: usize,
) -> Option<Vec<ObsId>> {
    for seq in all_sequences(spec.alphabet_size(), depth) {
        let st = spec.trace(spec.initial(), &seq).unwrap();
        let Some(st) = st else { continue };
        match candidate.trace(candidate.initial(), &seq).unwrap() {
            Some(ct) if ct.outputs == st.outputs => {}
            _ => return Some(seq),
        }
    }
    None
}

/// Whether the outputs of `v` and `w` agree on every common extension of
/// length at most `depth`.
pub fn compatible_bruteforce(f: &Filter, v: StateId, w: StateId, depth: usize) -> bool {
    for seq in all_sequences(f.alphabet_size(), depth) {
        let tv = f.trace(v, &seq).unwrap();
        let tw = f.trace(w, &seq).unwrap();
        if let (Some(tv), Some(tw)) = (tv, tw) {
            if tv.outputs != tw.outputs {
                return false;
            }
        }
    }
    true
}
