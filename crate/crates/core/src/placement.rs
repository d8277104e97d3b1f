//! Sensor placement for raising `δ_r`.
//!
//! An unprotected sensor on a state of `X_{u_i}` raises `δ_r(u_i)` by one,
//! and a protected one makes it infinite. Both placement problems are
//! submodular coverage problems over these sets and are solved greedily,
//! with exhaustive optima available for small instances.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, StructuralModel};

/// Exhaustive search limit on the number of candidates.
pub const BRUTE_FORCE_LIMIT: usize = 16;

/// States where a new sensor raises `δ_r` of one actuator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XSet {
    pub actuator: usize,
    pub states: BTreeSet<usize>,
}

impl XSet {
    pub fn label(&self, m: &StructuralModel) -> String {
        let names: Vec<String> = self.states.iter().map(|&x| m.state_label(x)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// States reachable from `actuator` once every state driven by another
/// actuator is deleted.
pub fn x_set(m: &StructuralModel, actuator: usize) -> XSet {
    let blocked = |x: usize| m.actuator_on(x).is_some_and(|k| k != actuator);
    let mut states = BTreeSet::new();
    let start = m.b_target(actuator);
    let mut stack = vec![start];
    states.insert(start);
    while let Some(x) = stack.pop() {
        for next in m.out_neighbors(x) {
            if !blocked(next) && states.insert(next) {
                stack.push(next);
            }
        }
    }
    XSet { actuator, states }
}

pub fn x_sets(m: &StructuralModel) -> Vec<XSet> {
    (0..m.n_u()).map(|k| x_set(m, k)).collect()
}

/// One candidate sensor per state in the union of the X-sets.
pub fn default_candidates(sets: &[XSet]) -> Vec<usize> {
    sets.iter()
        .flat_map(|s| s.states.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacementInstance {
    pub n_x: usize,
    /// Indexed by actuator.
    pub x_sets: Vec<BTreeSet<usize>>,
    /// Candidate sensors, by the state each would measure.
    pub candidates: Vec<usize>,
    /// Required increase per actuator.
    pub k: Vec<usize>,
    pub u_p: BTreeSet<usize>,
    pub k_max: usize,
}

impl PlacementInstance {
    pub fn new(
        n_x: usize,
        x_sets: Vec<BTreeSet<usize>>,
        candidates: Vec<usize>,
        k: Vec<usize>,
        u_p: impl IntoIterator<Item = usize>,
        k_max: usize,
    ) -> Result<Self> {
        let inst = PlacementInstance {
            n_x,
            x_sets,
            candidates,
            k,
            u_p: u_p.into_iter().collect(),
            k_max,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Instance over the model's own X-sets. `candidates` defaults to one
    /// sensor per X-set state.
    pub fn from_model(
        m: &StructuralModel,
        candidates: Option<Vec<usize>>,
        k: Vec<usize>,
        u_p: impl IntoIterator<Item = usize>,
        k_max: usize,
    ) -> Result<Self> {
        let sets = x_sets(m);
        let candidates = candidates.unwrap_or_else(|| default_candidates(&sets));
        let mut k = k;
        if k.len() > m.n_u() {
            return Err(Error::OutOfRange {
                kind: "actuator",
                index: k.len() - 1,
                count: m.n_u(),
            });
        }
        k.resize(m.n_u(), 0);
        Self::new(
            m.n_x(),
            sets.into_iter().map(|s| s.states).collect(),
            candidates,
            k,
            u_p,
            k_max,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.k.len() != self.x_sets.len() {
            return Err(Error::Dimension(format!(
                "{} targets for {} actuators",
                self.k.len(),
                self.x_sets.len()
            )));
        }
        let states = self
            .candidates
            .iter()
            .chain(self.x_sets.iter().flatten());
        for &x in states {
            if x >= self.n_x {
                return Err(Error::OutOfRange {
                    kind: "state",
                    index: x,
                    count: self.n_x,
                });
            }
        }
        for &u in &self.u_p {
            if u >= self.x_sets.len() {
                return Err(Error::OutOfRange {
                    kind: "actuator",
                    index: u,
                    count: self.x_sets.len(),
                });
            }
        }
        Ok(())
    }

    pub fn target(&self) -> usize {
        self.k.iter().sum()
    }
}

/// Total capped gain of placing the chosen candidates (indices into
/// `candidates`) as unprotected sensors.
pub fn gain_unprotected(inst: &PlacementInstance, chosen: &[usize]) -> usize {
    inst.x_sets
        .iter()
        .zip(&inst.k)
        .map(|(set, &k)| {
            let hits = chosen
                .iter()
                .filter(|&&c| set.contains(&inst.candidates[c]))
                .count();
            hits.min(k)
        })
        .sum()
}

/// Number of actuators in `u_p` whose X-set meets `states`.
pub fn gain_protected(inst: &PlacementInstance, states: &BTreeSet<usize>) -> usize {
    inst.u_p
        .iter()
        .filter(|&&u| !inst.x_sets[u].is_disjoint(states))
        .count()
}

/// `H(d) = 1 + 1/2 + ... + 1/d`.
pub fn harmonic(d: usize) -> f64 {
    (1..=d).fold(0.0, |acc, j| acc + 1.0 / j as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnprotectedPlacement {
    /// Indices into the candidate list, in the order picked.
    pub chosen: Vec<usize>,
    pub states: Vec<usize>,
    pub gain: usize,
    pub max_single_gain: usize,
    /// `H(max_single_gain)`: the placement is at most this factor larger
    /// than the optimum.
    pub certificate: f64,
}

/// Greedy cover for the minimum number of unprotected sensors raising each
/// `δ_r(u_i)` by `k_i`.
pub fn greedy_unprotected(inst: &PlacementInstance) -> Result<UnprotectedPlacement> {
    let all: Vec<usize> = (0..inst.candidates.len()).collect();
    let target = inst.target();
    let reachable = gain_unprotected(inst, &all);
    if reachable < target {
        return Err(Error::Infeasible(format!(
            "candidates reach a total gain of {reachable}, {target} required"
        )));
    }
    let max_single_gain = all
        .iter()
        .map(|&c| gain_unprotected(inst, &[c]))
        .max()
        .unwrap_or(0);

    let mut chosen = Vec::new();
    let mut gain = 0;
    while gain < target {
        let mut best = usize::MAX;
        let mut best_gain = gain;
        for &c in &all {
            if chosen.contains(&c) {
                continue;
            }
            chosen.push(c);
            let g = gain_unprotected(inst, &chosen);
            chosen.pop();
            if g > best_gain {
                (best, best_gain) = (c, g);
            }
        }
        assert!(best_gain > gain, "greedy stalled below a reachable target");
        chosen.push(best);
        gain = best_gain;
    }
    Ok(UnprotectedPlacement {
        states: chosen.iter().map(|&c| inst.candidates[c]).collect(),
        chosen,
        gain,
        max_single_gain,
        certificate: harmonic(max_single_gain),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProtectedPlacement {
    pub states: BTreeSet<usize>,
    pub value: usize,
}

/// Greedy choice of at most `k_max` protected-sensor states covering as
/// many actuators of `u_p` as possible.
pub fn greedy_protected(inst: &PlacementInstance) -> ProtectedPlacement {
    let pool: Vec<usize> = inst
        .candidates
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut states = BTreeSet::new();
    let mut value = 0;
    while states.len() < inst.k_max {
        let mut best: Option<(usize, usize)> = None;
        for &x in &pool {
            if !states.insert(x) {
                continue;
            }
            let v = gain_protected(inst, &states);
            states.remove(&x);
            if v > best.map_or(value, |b| b.1) {
                best = Some((x, v));
            }
        }
        match best {
            Some((x, v)) => {
                states.insert(x);
                value = v;
            }
            None => break,
        }
    }
    ProtectedPlacement { states, value }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    /// Fewest unprotected sensors meeting every target.
    MinUnprotected,
    /// Most actuators covered by at most `k_max` protected sensors.
    MaxProtected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Optimum {
    /// Sensor count for [`Problem::MinUnprotected`], covered actuators for
    /// [`Problem::MaxProtected`].
    pub value: usize,
    /// Candidate indices, or states for the protected problem.
    pub chosen: Vec<usize>,
}

/// Exhaustive optimum, first in subset order on ties.
pub fn brute_force_optimum(inst: &PlacementInstance, which: Problem) -> Result<Optimum> {
    let pool: Vec<usize> = match which {
        Problem::MinUnprotected => (0..inst.candidates.len()).collect(),
        Problem::MaxProtected => inst
            .candidates
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    if pool.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeGuard {
            size: pool.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let subsets = (0u32..1 << pool.len()).map(|mask| {
        pool.iter()
            .enumerate()
            .filter(|(bit, _)| mask & (1 << bit) != 0)
            .map(|(_, &c)| c)
            .collect::<Vec<_>>()
    });
    match which {
        Problem::MinUnprotected => {
            let target = inst.target();
            subsets
                .filter(|s| gain_unprotected(inst, s) >= target)
                .min_by_key(|s| s.len())
                .map(|chosen| Optimum {
                    value: chosen.len(),
                    chosen,
                })
                .ok_or_else(|| Error::Infeasible(format!("no placement reaches a gain of {target}")))
        }
        Problem::MaxProtected => {
            let mut best = Optimum {
                value: 0,
                chosen: Vec::new(),
            };
            for s in subsets.filter(|s| s.len() <= inst.k_max) {
                let v = gain_protected(inst, &s.iter().copied().collect());
                if v > best.value {
                    best = Optimum { value: v, chosen: s };
                }
            }
            Ok(best)
        }
    }
}

/// Adds one sensor per listed state.
pub fn apply_placement(
    m: &StructuralModel,
    states: impl IntoIterator<Item = usize>,
    protected: bool,
) -> Result<StructuralModel> {
    states
        .into_iter()
        .try_fold(m.clone(), |acc, x| model::add_sensor(&acc, x, protected))
}

/// On-disk placement request.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementRequest {
    /// Required increase per actuator id.
    #[serde(default)]
    pub k: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<usize>>,
    #[serde(default)]
    pub protected: bool,
    #[serde(default)]
    pub k_max: usize,
    /// Defaults to every actuator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_p: Option<Vec<usize>>,
}

impl PlacementRequest {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&model::read_text(path.as_ref())?)
    }

    pub fn instance(&self, m: &StructuralModel) -> Result<PlacementInstance> {
        let mut k = vec![0; m.n_u()];
        for (id, &need) in &self.k {
            let u: usize = id
                .parse()
                .map_err(|_| Error::Schema(format!("actuator id {id:?} is not an integer")))?;
            if u >= m.n_u() {
                return Err(Error::OutOfRange {
                    kind: "actuator",
                    index: u,
                    count: m.n_u(),
                });
            }
            k[u] = need;
        }
        let u_p = self.u_p.clone().unwrap_or_else(|| (0..m.n_u()).collect());
        PlacementInstance::from_model(m, self.candidates.clone(), k, u_p, self.k_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(raw: &[&[usize]]) -> Vec<BTreeSet<usize>> {
        raw.iter().map(|s| s.iter().copied().collect()).collect()
    }

    fn disjoint() -> PlacementInstance {
        PlacementInstance::new(2, sets(&[&[0], &[1]]), vec![0, 1], vec![1, 1], [0, 1], 0).unwrap()
    }

    fn shared() -> PlacementInstance {
        PlacementInstance::new(3, sets(&[&[0, 1], &[1]]), vec![0, 1], vec![1, 1], [0, 1], 1)
            .unwrap()
    }

    #[test]
    fn x_sets_of_examples() {
        let ex3 = StructuralModel::new(
            3,
            [(0, 1), (1, 0), (1, 2), (2, 1)],
            [0, 1],
            [(0, false), (2, true)],
        )
        .unwrap();
        assert_eq!(x_set(&ex3, 0).states, BTreeSet::from([0]));
        let ex4 = StructuralModel::new(2, [(1, 0), (1, 1)], [0], [(1, false)]).unwrap();
        assert_eq!(x_set(&ex4, 0).label(&ex4), "{x1,x2}");
        let platoon =
            StructuralModel::new(2, [(0, 0), (0, 1), (1, 0), (1, 1)], [0, 1], [(1, false)])
                .unwrap();
        assert_eq!(x_set(&platoon, 0).states, BTreeSet::from([0]));
        assert_eq!(x_set(&platoon, 1).states, BTreeSet::from([1]));
    }

    #[test]
    fn gains() {
        let inst = disjoint();
        assert_eq!(gain_unprotected(&inst, &[]), 0);
        assert_eq!(gain_unprotected(&inst, &[0]), 1);
        let inst =
            PlacementInstance::new(1, sets(&[&[0], &[0]]), vec![0], vec![1, 1], [0, 1], 0).unwrap();
        assert_eq!(gain_unprotected(&inst, &[0]), 2);
    }

    #[test]
    fn greedy_unprotected_cases() {
        let p = greedy_unprotected(&disjoint()).unwrap();
        assert_eq!(p.chosen, vec![0, 1]);
        assert_eq!(p.certificate, 1.0);
        assert_eq!(brute_force_optimum(&disjoint(), Problem::MinUnprotected).unwrap().value, 2);

        let mut zero = disjoint();
        zero.k = vec![0, 0];
        assert!(greedy_unprotected(&zero).unwrap().chosen.is_empty());

        let p = greedy_unprotected(&shared()).unwrap();
        assert_eq!(p.states, vec![1]);
        assert_eq!(brute_force_optimum(&shared(), Problem::MinUnprotected).unwrap().value, 1);

        let mut short = disjoint();
        short.k = vec![2, 1];
        assert!(matches!(greedy_unprotected(&short), Err(Error::Infeasible(_))));
    }

    #[test]
    fn greedy_protected_cases() {
        let p = greedy_protected(&shared());
        assert_eq!(p.states, BTreeSet::from([1]));
        assert_eq!(p.value, 2);
        assert_eq!(brute_force_optimum(&shared(), Problem::MaxProtected).unwrap().value, 2);

        let mut none = shared();
        none.k_max = 0;
        assert_eq!(greedy_protected(&none).value, 0);
        let mut empty = shared();
        empty.u_p.clear();
        let p = greedy_protected(&empty);
        assert!(p.states.is_empty());
        assert_eq!(p.value, 0);
    }

    #[test]
    fn request_parsing() {
        let m = StructuralModel::new(2, [(0, 0), (0, 1), (1, 0), (1, 1)], [0, 1], [(1, false)])
            .unwrap();
        let req = PlacementRequest::parse(r#"{"k": {"0": 1, "1": 1}}"#).unwrap();
        let inst = req.instance(&m).unwrap();
        assert_eq!(inst.candidates, vec![0, 1]);
        assert_eq!(inst.k, vec![1, 1]);
        assert!(PlacementRequest::parse(r#"{"k": {"u": 1}}"#)
            .unwrap()
            .instance(&m)
            .is_err());
        assert!(PlacementRequest::parse(r#"{"bogus": 1}"#).is_err());
    }
}
