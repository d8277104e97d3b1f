//! Exact security index `δ(u_i)` by exhaustive search.
//!
//! A set `I_a ∋ u_i` admits a perfectly undetectable attack that actively
//! uses `u_i` iff `normrank G^(I_a) = normrank G^(I_a \ u_i)`. Sets are tried
//! by increasing cardinality; the first feasible one is the witness.
//!
//! Within a cardinality the other components are ordered unprotected
//! sensors first (`y1, y2, ...`) and then the remaining actuators, and
//! combinations are visited lexicographically in that order.

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::model::{ComponentSet, Realization, StructuralModel};
use crate::transfer::TransferSamples;
use crate::IndexValue;

/// Result of a (possibly budget-limited) search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactValue {
    Finite(usize),
    Infinite,
    /// No feasible set up to the budget; the index is at least this value
    /// and may be infinite.
    AtLeast(usize),
}

impl ExactValue {
    /// The index, when the search was conclusive.
    pub fn index(self) -> Option<IndexValue> {
        match self {
            ExactValue::Finite(v) => Some(IndexValue::Finite(v)),
            ExactValue::Infinite => Some(IndexValue::Infinite),
            ExactValue::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Finite(v) => write!(f, "{v}"),
            ExactValue::Infinite => f.write_str("inf"),
            ExactValue::AtLeast(v) => write!(f, ">= {v}, possibly inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub actuator: usize,
    pub value: ExactValue,
    pub witness: Option<ComponentSet>,
    /// A rank test on the decisive path had a pivot near the threshold.
    pub borderline: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Other {
    Sensor(usize),
    Actuator(usize),
}

/// Brute-force solver over one realization; the transfer matrix is sampled
/// once and shared by every rank test.
pub struct ExactSolver<'a> {
    model: &'a StructuralModel,
    samples: TransferSamples,
}

impl<'a> ExactSolver<'a> {
    pub fn new(model: &'a StructuralModel, realization: &Realization, seed: u64) -> Self {
        ExactSolver {
            model,
            samples: TransferSamples::new(model, realization, seed),
        }
    }

    pub fn samples(&self) -> &TransferSamples {
        &self.samples
    }

    /// Normal-rank condition for `set` with `actuator` actively used.
    /// Returns `(feasible, borderline)`.
    pub fn feasible(&self, set: &ComponentSet, actuator: usize) -> (bool, bool) {
        debug_assert!(set.actuators.contains(&actuator));
        let full = self.samples.normrank(self.model, set);
        let mut reduced_set = set.clone();
        reduced_set.actuators.remove(&actuator);
        let reduced = self.samples.normrank(self.model, &reduced_set);
        (full.rank == reduced.rank, full.borderline || reduced.borderline)
    }

    /// `δ(actuator)`, searching sets of at most `budget` components
    /// (default: every actuator and unprotected sensor).
    pub fn delta(&self, actuator: usize, budget: Option<usize>) -> IndexReport {
        let m = self.model;
        let total = m.n_u() + m.n_y();
        let limit = budget.unwrap_or(total).min(total);
        let others: Vec<Other> = (0..m.n_y())
            .map(Other::Sensor)
            .chain((0..m.n_u()).filter(|&k| k != actuator).map(Other::Actuator))
            .collect();

        for size in 1..=limit {
            let candidates: Vec<ComponentSet> = others
                .iter()
                .copied()
                .combinations(size - 1)
                .map(|combo| {
                    let mut set = ComponentSet::new([actuator], []);
                    for o in combo {
                        match o {
                            Other::Sensor(l) => set.sensors.insert(l),
                            Other::Actuator(k) => set.actuators.insert(k),
                        };
                    }
                    set
                })
                .collect();
            let evaluated: Vec<(bool, bool)> = candidates
                .par_iter()
                .map(|set| self.feasible(set, actuator))
                .collect();
            let borderline = evaluated.iter().any(|&(_, b)| b);
            if let Some(pos) = evaluated.iter().position(|&(ok, _)| ok) {
                return IndexReport {
                    actuator,
                    value: ExactValue::Finite(size),
                    witness: Some(candidates[pos].clone()),
                    borderline: evaluated[..=pos].iter().any(|&(_, b)| b),
                };
            }
            if size == limit {
                let value = if limit == total {
                    ExactValue::Infinite
                } else {
                    ExactValue::AtLeast(limit + 1)
                };
                return IndexReport {
                    actuator,
                    value,
                    witness: None,
                    borderline,
                };
            }
        }
        // limit == 0: only reachable with an explicit zero budget.
        IndexReport {
            actuator,
            value: if total == 0 {
                ExactValue::Infinite
            } else {
                ExactValue::AtLeast(1)
            },
            witness: None,
            borderline: false,
        }
    }
}

/// Normal-rank feasibility test for a single set.
pub fn feasible(
    m: &StructuralModel,
    r: &Realization,
    set: &ComponentSet,
    actuator: usize,
    seed: u64,
) -> bool {
    ExactSolver::new(m, r, seed).feasible(set, actuator).0
}

pub fn delta(
    m: &StructuralModel,
    r: &Realization,
    actuator: usize,
    budget: Option<usize>,
    seed: u64,
) -> IndexReport {
    ExactSolver::new(m, r, seed).delta(actuator, budget)
}

/// `δ` for every actuator, in actuator order.
pub fn delta_all(
    m: &StructuralModel,
    r: &Realization,
    budget: Option<usize>,
    seed: u64,
) -> Vec<IndexReport> {
    let solver = ExactSolver::new(m, r, seed);
    (0..m.n_u())
        .into_par_iter()
        .map(|k| solver.delta(k, budget))
        .collect()
}
