//! Seeded random and exhaustive filter generation for oracle testing and
//! benchmarks.

use crate::error::{Error, Result};
use crate::filter::{Filter, FilterBuilder};
use serde::{Deserialize, Serialize};

/// SplitMix64: a published 64-bit mixing generator, chosen so seeds
/// reproduce bit-for-bit across platforms and implementations. The
/// recurrence is
///
/// ```text
/// state += 0x9e3779b97f4a7c15
/// z = state
/// z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
/// z = (z ^ (z >> 27)) * 0x94d049bb133111eb
/// output = z ^ (z >> 31)
/// ```
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` by rejection, so the draw sequence does not
    /// depend on platform arithmetic.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Parameters for random filter generation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    /// State count before pruning.
    pub states: usize,
    /// Alphabet size.
    pub alphabet: usize,
    /// Number of distinct outputs.
    pub outputs: usize,
    /// Probability that each (state, observation) transition is defined.
    pub density: f64,
    pub seed: u64,
}

impl GenSpec {
    fn validate(&self) -> Result<()> {
        if self.states < 1 || self.alphabet < 1 || self.outputs < 1 {
            return Err(Error::BadGenSpec(
                "states, alphabet and outputs must all be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::BadGenSpec(format!(
                "density {} outside [0, 1]",
                self.density
            )));
        }
        Ok(())
    }
}

pub(crate) fn obs_name(y: usize) -> String {
    if y < 26 {
        ((b'a' + y as u8) as char).to_string()
    } else {
        format!("o{y}")
    }
}

/// A valid, pruned filter drawn deterministically from `spec.seed`.
///
/// Draw order: one output per state in id order, then for each
/// (state, observation) slot in lexicographic order a presence draw
/// followed, when present, by a target draw.
pub fn random_filter(spec: &GenSpec) -> Result<Filter> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let mut b = FilterBuilder::new();
    b.alphabet((0..spec.alphabet).map(obs_name));
    for _ in 0..spec.states {
        b.state(rng.next_below(spec.outputs as u64) as usize);
    }
    b.initial(0);
    for s in 0..spec.states {
        for y in 0..spec.alphabet {
            if rng.next_f64() < spec.density {
                let t = rng.next_below(spec.states as u64) as usize;
                b.transition(s, y, t);
            }
        }
    }
    Ok(b.build().expect("generator output is well-formed").prune_unreachable().filter)
}

const ENUM_MAX_STATES: usize = 4;
const ENUM_MAX_ALPHABET: usize = 2;
const ENUM_MAX_OUTPUTS: usize = 2;

/// Every valid pruned filter with up to `n_max` states, exactly `y_max`
/// observation symbols and outputs drawn from `0..c_max`, one
/// representative per renaming of state ids. A filter is emitted iff its
/// states are numbered in breadth-first discovery order from the initial
/// state (symbols scanned in ascending order), which picks exactly one
/// labeling per isomorphism class.
pub fn enumerate_filters(n_max: usize, y_max: usize, c_max: usize) -> Result<FilterEnumeration> {
    if n_max > ENUM_MAX_STATES || y_max > ENUM_MAX_ALPHABET || c_max > ENUM_MAX_OUTPUTS {
        return Err(Error::EnumGuard(format!(
            "requested ({n_max}, {y_max}, {c_max}), guard is ({ENUM_MAX_STATES}, {ENUM_MAX_ALPHABET}, {ENUM_MAX_OUTPUTS})"
        )));
    }
    Ok(FilterEnumeration {
        n_max,
        y_max,
        c_max,
        n: 1,
        trans_code: 0,
        out_code: 0,
        current_structure: None,
    })
}

/// Iterator over enumerated filters; see [`enumerate_filters`].
pub struct FilterEnumeration {
    n_max: usize,
    y_max: usize,
    c_max: usize,
    n: usize,
    trans_code: u64,
    out_code: u64,
    /// Decoded transition table of `trans_code` when it passed the
    /// canonical-form check.
    current_structure: Option<Vec<Vec<Option<usize>>>>,
}

impl FilterEnumeration {
    fn trans_code_count(&self) -> u64 {
        ((self.n + 1) as u64).pow((self.n * self.y_max) as u32)
    }

    fn out_code_count(&self) -> u64 {
        (self.c_max as u64).pow(self.n as u32)
    }

    fn decode_structure(&self) -> Vec<Vec<Option<usize>>> {
        let base = (self.n + 1) as u64;
        let mut code = self.trans_code;
        let mut table = vec![vec![None; self.y_max]; self.n];
        for row in table.iter_mut() {
            for slot in row.iter_mut() {
                let digit = code % base;
                code /= base;
                *slot = (digit > 0).then(|| (digit - 1) as usize);
            }
        }
        table
    }

    /// All states reachable from 0, discovered in the order 0, 1, 2, ...
    fn is_canonical(&self, table: &[Vec<Option<usize>>]) -> bool {
        let mut discovered = vec![false; self.n];
        discovered[0] = true;
        let mut order = vec![0usize];
        let mut next_expected = 1;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for slot in &table[v] {
                if let Some(t) = *slot {
                    if !discovered[t] {
                        if t != next_expected {
                            return false;
                        }
                        discovered[t] = true;
                        next_expected += 1;
                        order.push(t);
                    }
                }
            }
        }
        order.len() == self.n
    }

    fn build(&self, table: &[Vec<Option<usize>>]) -> Filter {
        let mut b = FilterBuilder::new();
        b.alphabet((0..self.y_max).map(obs_name));
        let mut code = self.out_code;
        for _ in 0..self.n {
            b.state((code % self.c_max as u64) as usize);
            code /= self.c_max as u64;
        }
        b.initial(0);
        for (s, row) in table.iter().enumerate() {
            for (y, slot) in row.iter().enumerate() {
                if let Some(t) = *slot {
                    b.transition(s, y, t);
                }
            }
        }
        b.build().expect("enumerated filters are well-formed")
    }
}

impl Iterator for FilterEnumeration {
    type Item = Filter;

    fn next(&mut self) -> Option<Filter> {
        loop {
            if self.n > self.n_max {
                return None;
            }
            if let Some(table) = self.current_structure.take() {
                let filter = self.build(&table);
                self.out_code += 1;
                if self.out_code < self.out_code_count() {
                    self.current_structure = Some(table);
                } else {
                    self.out_code = 0;
                    self.trans_code += 1;
                }
                return Some(filter);
            }
            if self.trans_code >= self.trans_code_count() {
                self.n += 1;
                self.trans_code = 0;
                self.out_code = 0;
                continue;
            }
            let table = self.decode_structure();
            if self.is_canonical(&table) {
                self.current_structure = Some(table);
            } else {
                self.trans_code += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_reproduces_the_filter() {
        let spec = GenSpec {
            states: 6,
            alphabet: 2,
            outputs: 2,
            density: 0.7,
            seed: 42,
        };
        assert_eq!(random_filter(&spec).unwrap(), random_filter(&spec).unwrap());
    }

    #[test]
    fn zero_density_leaves_a_single_state() {
        let spec = GenSpec {
            states: 5,
            alphabet: 2,
            outputs: 2,
            density: 0.0,
            seed: 3,
        };
        let f = random_filter(&spec).unwrap();
        assert_eq!(f.state_count(), 1);
        assert_eq!(f.transitions_from(0).count(), 0);
    }

    #[test]
    fn full_density_defines_every_slot() {
        let spec = GenSpec {
            states: 4,
            alphabet: 2,
            outputs: 2,
            density: 1.0,
            seed: 9,
        };
        let f = random_filter(&spec).unwrap();
        assert!(f.validate().is_empty());
        for s in f.states() {
            assert_eq!(f.transitions_from(s).count(), 2);
        }
    }

    #[test]
    fn generated_filters_are_valid_and_pruned() {
        for seed in 0..50 {
            let spec = GenSpec {
                states: 7,
                alphabet: 3,
                outputs: 2,
                density: 0.5,
                seed,
            };
            let f = random_filter(&spec).unwrap();
            assert!(f.validate().is_empty());
            assert!(f.state_count() <= 7);
            let pruned = f.prune_unreachable();
            assert_eq!(pruned.filter, f, "seed {seed} not pruned");
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        let mut spec = GenSpec {
            states: 0,
            alphabet: 1,
            outputs: 1,
            density: 0.5,
            seed: 0,
        };
        assert!(random_filter(&spec).is_err());
        spec.states = 1;
        spec.density = 1.5;
        assert!(random_filter(&spec).is_err());
    }

    #[test]
    fn one_state_enumerations_have_known_sizes() {
        // One state, one symbol: self-loop present or absent.
        assert_eq!(enumerate_filters(1, 1, 1).unwrap().count(), 2);
        // Two outputs double that.
        assert_eq!(enumerate_filters(1, 1, 2).unwrap().count(), 4);
        // Empty bound, empty stream.
        assert_eq!(enumerate_filters(0, 1, 1).unwrap().count(), 0);
    }

    #[test]
    fn enumerated_filters_are_valid_pruned_and_distinct() {
        let mut seen = std::collections::BTreeSet::new();
        let mut count = 0usize;
        for f in enumerate_filters(3, 2, 2).unwrap() {
            assert!(f.validate().is_empty());
            assert_eq!(f.prune_unreachable().filter, f);
            let key = format!("{f:?}");
            assert!(seen.insert(key), "duplicate filter emitted");
            count += 1;
        }
        assert!(count > 100);
    }

    #[test]
    fn guard_rejects_oversized_requests() {
        assert!(matches!(
            enumerate_filters(5, 2, 2),
            Err(Error::EnumGuard(_))
        ));
        assert!(matches!(
            enumerate_filters(4, 3, 2),
            Err(Error::EnumGuard(_))
        ));
    }
}
