//! Brute-force satisfiability by enumerating lasso-shaped traces.
//!
//! A lasso is a finite sequence of states whose suffix from `loop_start`
//! repeats forever. Temporal operators are reflexive: `G a` holds at `i` when `a`
//! holds at every position reachable from `i`, `F a` when it holds at one of them.
//! This module shares nothing with the tableau beyond the formula type.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{fragment_check, Formula, FragmentViolation};

/// Upper bound on the number of (trace, loop point) candidates examined.
pub const DEFAULT_STATE_CAP: u64 = 50_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Fragment(#[from] FragmentViolation),
    #[error("search space of {candidates} lassos exceeds the cap of {cap}")]
    StateSpaceExceeded { candidates: u128, cap: u64 },
}

/// An ultimately periodic trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    /// True atoms per position.
    pub states: Vec<BTreeSet<String>>,
    /// Position the last state loops back to.
    pub loop_start: usize,
}

impl Lasso {
    pub fn new(states: Vec<BTreeSet<String>>, loop_start: usize) -> Self {
        assert!(
            !states.is_empty() && states.len() < 64 && loop_start < states.len(),
            "malformed lasso"
        );
        Lasso { states, loop_start }
    }

    /// Evaluates `f` at position 0.
    pub fn satisfies(&self, f: &Formula) -> bool {
        let atoms: Vec<String> = f.atoms().into_iter().collect();
        let index: HashMap<&str, usize> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.as_str(), i))
            .collect();
        let states: Vec<u32> = self
            .states
            .iter()
            .map(|s| {
                s.iter()
                    .filter_map(|a| index.get(a.as_str()))
                    .fold(0u32, |m, &i| m | (1 << i))
            })
            .collect();
        let trace = Trace {
            states: &states,
            loop_start: self.loop_start,
        };
        trace.eval(f, &index) & 1 == 1
    }
}

struct Trace<'a> {
    states: &'a [u32],
    loop_start: usize,
}

impl Trace<'_> {
    fn len(&self) -> usize {
        self.states.len()
    }

    fn full(&self) -> u64 {
        (1u64 << self.len()) - 1
    }

    // Bit i of the result is set when `f` holds at position i.
    fn eval(&self, f: &Formula, index: &HashMap<&str, usize>) -> u64 {
        match f {
            Formula::Atom(name) => {
                let bit = index[name.as_str()];
                self.states
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| *s >> bit & 1 == 1)
                    .fold(0, |m, (i, _)| m | 1 << i)
            }
            Formula::Not(a) => !self.eval(a, index) & self.full(),
            Formula::And(a, b) => self.eval(a, index) & self.eval(b, index),
            Formula::Or(a, b) => self.eval(a, index) | self.eval(b, index),
            Formula::Implies(a, b) => (!self.eval(a, index) | self.eval(b, index)) & self.full(),
            Formula::Always(a) => self.always(self.eval(a, index)),
            Formula::Eventually(a) => self.eventually(self.eval(a, index)),
        }
    }

    fn always(&self, holds: u64) -> u64 {
        let n = self.len();
        let cycle = self.full() & !((1u64 << self.loop_start) - 1);
        let on_cycle = holds & cycle == cycle;
        let mut out = 0;
        let mut next = on_cycle;
        for i in (0..n).rev() {
            let here = if i >= self.loop_start {
                on_cycle
            } else {
                holds >> i & 1 == 1 && next
            };
            if here {
                out |= 1 << i;
            }
            next = here;
        }
        out
    }

    fn eventually(&self, holds: u64) -> u64 {
        let n = self.len();
        let cycle = self.full() & !((1u64 << self.loop_start) - 1);
        let on_cycle = holds & cycle != 0;
        let mut out = 0;
        let mut next = on_cycle;
        for i in (0..n).rev() {
            let here = if i >= self.loop_start {
                on_cycle
            } else {
                holds >> i & 1 == 1 || next
            };
            if here {
                out |= 1 << i;
            }
            next = here;
        }
        out
    }
}

/// Default prefix bound: one position per eventuality plus the initial one.
pub fn default_max_prefix(f: &Formula) -> usize {
    f.eventuality_count() + 1
}

pub fn oracle_sat(f: &Formula, max_prefix: usize) -> Result<bool, OracleError> {
    Ok(find_model(f, max_prefix, DEFAULT_STATE_CAP)?.is_some())
}

/// Returns the first satisfying lasso of length at most `max_prefix`, shortest first.
pub fn find_model(f: &Formula, max_prefix: usize, cap: u64) -> Result<Option<Lasso>, OracleError> {
    fragment_check(f)?;
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let max_prefix = max_prefix.max(1);

    let valuations: u128 = 1u128 << atoms.len().min(64);
    let candidates: u128 = (1..=max_prefix as u32)
        .map(|k| valuations.saturating_pow(k).saturating_mul(k as u128))
        .fold(0u128, |a, b| a.saturating_add(b));
    if atoms.len() > 16 || max_prefix > 63 || candidates > cap as u128 {
        return Err(OracleError::StateSpaceExceeded { candidates, cap });
    }

    let index: HashMap<&str, usize> = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i))
        .collect();
    let valuations = valuations as u32;
    for len in 1..=max_prefix {
        let mut states = vec![0u32; len];
        loop {
            for loop_start in 0..len {
                let trace = Trace {
                    states: &states,
                    loop_start,
                };
                if trace.eval(f, &index) & 1 == 1 {
                    let states = states
                        .iter()
                        .map(|&s| {
                            atoms
                                .iter()
                                .enumerate()
                                .filter(|(i, _)| s >> i & 1 == 1)
                                .map(|(_, a)| a.clone())
                                .collect()
                        })
                        .collect();
                    return Ok(Some(Lasso { states, loop_start }));
                }
            }
            if !advance(&mut states, valuations) {
                break;
            }
        }
    }
    Ok(None)
}

// Odometer increment over `base` digits; false once every sequence was visited.
fn advance(states: &mut [u32], base: u32) -> bool {
    for digit in states.iter_mut() {
        *digit += 1;
        if *digit < base {
            return true;
        }
        *digit = 0;
    }
    false
}
