//! Synthesis and simulation of perfectly undetectable attacks.
//!
//! Three attackers are modelled:
//!
//! * [`AttackKind::Feedforward`] knows a full realization and precomputes
//!   every signal offline. Other attacked actuators pin their states to
//!   zero deviation and attacked sensors subtract the predicted output.
//! * [`AttackKind::LocalFeedback`] reads the states around the attacked
//!   actuators at run time and holds compromised sensors at their value at
//!   attack onset.
//! * [`AttackKind::Replay`] knows only the structure and replays recorded
//!   outputs on the compromised sensors.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ComponentSet, Realization, RealizationFile, StructuralModel};
use crate::robust_index::{self, build_extended_graph, GraphNode};

/// Entries at or below this magnitude count as zero.
/// One vector per time step.
pub type Signal = Vec<DVector<f64>>;

pub const ZERO_TOLERANCE: f64 = 1e-9;
/// A residual above this magnitude reveals the attack.
pub const DETECTION_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_WARMUP: usize = 20;

/// The free signal injected through the actively used actuator, indexed
/// from attack onset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Zero,
    /// `a(k) = amplitude`
    Step(f64),
    /// `a(k) = slope * k`
    Ramp(f64),
    /// Explicit values, zero afterwards.
    Samples(Vec<f64>),
}

impl Payload {
    pub fn at(&self, k: usize) -> f64 {
        match self {
            Payload::Zero => 0.0,
            Payload::Step(a) => *a,
            Payload::Ramp(s) => s * k as f64,
            Payload::Samples(v) => v.get(k).copied().unwrap_or(0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Payload::Zero => true,
            Payload::Step(a) | Payload::Ramp(a) => *a == 0.0,
            Payload::Samples(v) => v.iter().all(|&x| x == 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    #[serde(alias = "type1")]
    Feedforward,
    #[serde(alias = "type2")]
    LocalFeedback,
    #[serde(alias = "type3")]
    Replay,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Feedforward { believed: Realization },
    LocalFeedback,
    /// One output vector per recorded step, replayed cyclically.
    Replay { recorded: Vec<DVector<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackPolicy {
    pub attacked: ComponentSet,
    pub active_actuator: usize,
    pub payload: Payload,
    pub strategy: Strategy,
    /// Conditions under which the attack may be revealed.
    pub warnings: Vec<String>,
}

impl AttackPolicy {
    pub fn kind(&self) -> AttackKind {
        match self.strategy {
            Strategy::Feedforward { .. } => AttackKind::Feedforward,
            Strategy::LocalFeedback => AttackKind::LocalFeedback,
            Strategy::Replay { .. } => AttackKind::Replay,
        }
    }

    /// Offline signals of a feedforward policy over `horizon` steps from
    /// onset: one actuator vector (length `n_u`) and one sensor vector
    /// (length of the sensor list) per step.
    pub fn feedforward_signals(
        &self,
        m: &StructuralModel,
        horizon: usize,
    ) -> Option<(Signal, Signal)> {
        let Strategy::Feedforward { believed } = &self.strategy else {
            return None;
        };
        let mut xi = DVector::zeros(m.n_x());
        let mut act = Vec::with_capacity(horizon);
        let mut sens = Vec::with_capacity(horizon);
        for k in 0..horizon {
            let mut a_u = DVector::zeros(m.n_u());
            for &j in &self.attacked.actuators {
                if j == self.active_actuator {
                    a_u[j] = self.payload.at(k);
                } else {
                    let p = m.b_target(j);
                    a_u[j] = -believed.a.row(p).dot(&xi.transpose()) / believed.b[(p, j)];
                }
            }
            let mut a_y = DVector::zeros(m.sensor_count());
            for &l in &self.attacked.sensors {
                a_y[l] = -believed.c.row(l).dot(&xi.transpose());
            }
            xi = &believed.a * &xi + &believed.b * &a_u;
            act.push(a_u);
            sens.push(a_y);
        }
        Some((act, sens))
    }
}

fn check_set(m: &StructuralModel, set: &ComponentSet, actuator: usize) -> Result<()> {
    set.validate_attack(m)?;
    if !set.actuators.contains(&actuator) {
        return Err(Error::Invariant(format!(
            "active actuator {} is not in the attacked set {}",
            m.actuator_label(actuator),
            set.label(m)
        )));
    }
    Ok(())
}

fn separator_warning(m: &StructuralModel, set: &ComponentSet, actuator: usize) -> Option<String> {
    (!robust_index::is_separator(m, set, actuator)).then(|| {
        format!(
            "{} does not separate {} from the operator; the attack may be detected",
            set.label(m),
            m.actuator_label(actuator)
        )
    })
}

/// Feedforward attacker working from a believed realization.
pub fn synth_type1(
    m: &StructuralModel,
    believed: &Realization,
    set: &ComponentSet,
    actuator: usize,
    payload: Payload,
) -> Result<AttackPolicy> {
    check_set(m, set, actuator)?;
    believed.validate(m)?;
    Ok(AttackPolicy {
        attacked: set.clone(),
        active_actuator: actuator,
        payload,
        strategy: Strategy::Feedforward {
            believed: believed.clone(),
        },
        warnings: separator_warning(m, set, actuator).into_iter().collect(),
    })
}

/// Local-feedback attacker. Refuses sets that are not separators.
pub fn synth_type2(
    m: &StructuralModel,
    set: &ComponentSet,
    actuator: usize,
    payload: Payload,
) -> Result<AttackPolicy> {
    check_set(m, set, actuator)?;
    if !robust_index::is_separator(m, set, actuator) {
        return Err(Error::NotSeparator { actuator });
    }
    Ok(AttackPolicy {
        attacked: set.clone(),
        active_actuator: actuator,
        payload,
        strategy: Strategy::LocalFeedback,
        warnings: Vec::new(),
    })
}

/// Sensors whose state is reachable from `actuator`.
pub fn reachable_sensors(m: &StructuralModel, actuator: usize) -> BTreeSet<usize> {
    let mut seen = vec![false; m.n_x()];
    let start = m.b_target(actuator);
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        for n in m.out_neighbors(x) {
            if !seen[n] {
                seen[n] = true;
                stack.push(n);
            }
        }
    }
    (0..m.sensor_count())
        .filter(|&l| seen[m.c_target(l)])
        .collect()
}

/// Replay attacker using outputs recorded before onset.
pub fn synth_type3(
    m: &StructuralModel,
    set: &ComponentSet,
    actuator: usize,
    payload: Payload,
    recorded: Vec<DVector<f64>>,
) -> Result<AttackPolicy> {
    check_set(m, set, actuator)?;
    if recorded.is_empty() {
        return Err(Error::Invariant("replay needs at least one recorded output".into()));
    }
    if let Some(bad) = recorded.iter().find(|y| y.len() != m.sensor_count()) {
        return Err(Error::Dimension(format!(
            "recorded output has {} entries, model has {} sensors",
            bad.len(),
            m.sensor_count()
        )));
    }
    let mut warnings = Vec::new();
    let exposed: Vec<String> = reachable_sensors(m, actuator)
        .into_iter()
        .filter(|l| !set.sensors.contains(l))
        .map(|l| m.sensor_label(l))
        .collect();
    if !exposed.is_empty() {
        warnings.push(format!(
            "sensors reachable from {} are not replayed: {}",
            m.actuator_label(actuator),
            exposed.join(",")
        ));
    }
    if set.actuators.len() > 1 {
        warnings.push("replay leaves the other attacked actuators idle".into());
    }
    Ok(AttackPolicy {
        attacked: set.clone(),
        active_actuator: actuator,
        payload,
        strategy: Strategy::Replay { recorded },
        warnings,
    })
}

/// Operator input: a constant vector plus step changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSchedule {
    pub base: Vec<f64>,
    #[serde(default)]
    pub changes: Vec<InputChange>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputChange {
    /// First step at which the change applies.
    pub k: usize,
    pub actuator: usize,
    pub delta: f64,
}

impl InputSchedule {
    pub fn constant(base: Vec<f64>) -> Self {
        InputSchedule {
            base,
            changes: Vec::new(),
        }
    }

    pub fn zero(n_u: usize) -> Self {
        Self::constant(vec![0.0; n_u])
    }

    pub fn at(&self, k: usize) -> DVector<f64> {
        let mut u = DVector::from_column_slice(&self.base);
        for c in self.changes.iter().filter(|c| c.k <= k) {
            u[c.actuator] += c.delta;
        }
        u
    }

    fn check(&self, m: &StructuralModel) -> Result<()> {
        if self.base.len() != m.n_u() {
            return Err(Error::Dimension(format!(
                "input has {} entries, model has {} actuators",
                self.base.len(),
                m.n_u()
            )));
        }
        if let Some(c) = self.changes.iter().find(|c| c.actuator >= m.n_u()) {
            return Err(Error::OutOfRange {
                kind: "actuator",
                index: c.actuator,
                count: m.n_u(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackTrace {
    pub horizon: usize,
    pub k_start: usize,
    pub x: Vec<DVector<f64>>,
    pub y_received: Vec<DVector<f64>>,
    pub y_expected: Vec<DVector<f64>>,
    /// `y_expected - y_received`
    pub residual: Vec<DVector<f64>>,
    /// Actuator part of the injected signal.
    pub attack_u: Vec<DVector<f64>>,
    /// Sensor part of the injected signal.
    pub attack_y: Vec<DVector<f64>>,
}

impl AttackTrace {
    pub fn max_abs_residual(&self) -> f64 {
        self.residual
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// First step whose residual exceeds `threshold`.
    pub fn first_detection(&self, threshold: f64) -> Option<usize> {
        self.residual
            .iter()
            .position(|r| r.iter().any(|v| v.abs() > threshold))
    }

    pub fn is_undetected(&self) -> bool {
        self.max_abs_residual() <= ZERO_TOLERANCE
    }

    /// Writes `k, x_*, y_received_*, y_expected_*, residual_*` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n_x = self.x.first().map_or(0, |v| v.len());
        let n_y = self.residual.first().map_or(0, |v| v.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k".to_owned()];
        header.extend((1..=n_x).map(|i| format!("x_{i}")));
        for name in ["y_received", "y_expected", "residual"] {
            header.extend((1..=n_y).map(|l| format!("{name}_{l}")));
        }
        let csv_err = |e: csv::Error| Error::Parse(format!("writing trace: {e}"));
        w.write_record(&header).map_err(csv_err)?;
        for k in 0..self.horizon {
            let mut row = vec![k.to_string()];
            let cols = [&self.x[k], &self.y_received[k], &self.y_expected[k], &self.residual[k]];
            for v in cols {
                row.extend(v.iter().map(|x| x.to_string()));
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "trace".into(),
            source,
        })?;
        Ok(())
    }
}

fn check_realization(m: &StructuralModel, r: &Realization) -> Result<()> {
    let n = m.n_x();
    if r.a.shape() != (n, n) || r.b.shape() != (n, m.n_u()) || r.c.shape() != (m.sensor_count(), n) {
        return Err(Error::Dimension("realization does not match the model".into()));
    }
    Ok(())
}

/// Runs the plant under `policy` and the operator's attack-free prediction
/// side by side. The attack starts at `k_start`.
pub fn simulate(
    m: &StructuralModel,
    r: &Realization,
    policy: &AttackPolicy,
    x0: &DVector<f64>,
    inputs: &InputSchedule,
    horizon: usize,
    k_start: usize,
) -> Result<AttackTrace> {
    check_realization(m, r)?;
    inputs.check(m)?;
    check_set(m, &policy.attacked, policy.active_actuator)?;
    if x0.len() != m.n_x() {
        return Err(Error::Dimension(format!(
            "x0 has {} entries, model has {} states",
            x0.len(),
            m.n_x()
        )));
    }
    if let Strategy::Replay { recorded } = &policy.strategy {
        if recorded.iter().any(|y| y.len() != m.sensor_count()) {
            return Err(Error::Dimension("recorded outputs do not match the sensors".into()));
        }
    }
    let onset_len = horizon.saturating_sub(k_start);
    let offline = policy.feedforward_signals(m, onset_len);

    let mut x = x0.clone();
    let mut x_nom = x0.clone();
    // captured at onset by the local-feedback attacker
    let mut x_ref = x0.clone();
    let mut y_ref = &r.c * x0;
    let mut trace = AttackTrace {
        horizon,
        k_start,
        x: Vec::with_capacity(horizon),
        y_received: Vec::with_capacity(horizon),
        y_expected: Vec::with_capacity(horizon),
        residual: Vec::with_capacity(horizon),
        attack_u: Vec::with_capacity(horizon),
        attack_y: Vec::with_capacity(horizon),
    };

    for k in 0..horizon {
        let y_true = &r.c * &x;
        let mut a_u = DVector::zeros(m.n_u());
        let mut a_y = DVector::zeros(m.sensor_count());
        if k >= k_start {
            let t = k - k_start;
            if t == 0 {
                x_ref = x.clone();
                y_ref = y_true.clone();
            }
            match &policy.strategy {
                Strategy::Feedforward { .. } => {
                    let (act, sens) = offline.as_ref().expect("feedforward signals");
                    a_u = act[t].clone();
                    a_y = sens[t].clone();
                }
                Strategy::LocalFeedback => {
                    for &j in &policy.attacked.actuators {
                        if j == policy.active_actuator {
                            a_u[j] = policy.payload.at(t);
                        } else {
                            let p = m.b_target(j);
                            let drift = (&x - &x_ref).transpose();
                            a_u[j] = -r.a.row(p).dot(&drift) / r.b[(p, j)];
                        }
                    }
                    for &l in &policy.attacked.sensors {
                        a_y[l] = y_ref[l] - y_true[l];
                    }
                }
                Strategy::Replay { recorded } => {
                    a_u[policy.active_actuator] = policy.payload.at(t);
                    let replay = &recorded[t % recorded.len()];
                    for &l in &policy.attacked.sensors {
                        a_y[l] = replay[l] - y_true[l];
                    }
                }
            }
        }
        let u = inputs.at(k);
        let y_received = y_true + &a_y;
        let y_expected = &r.c * &x_nom;
        trace.residual.push(&y_expected - &y_received);
        trace.y_received.push(y_received);
        trace.y_expected.push(y_expected);
        trace.x.push(x.clone());
        x = &r.a * &x + &r.b * (&u + &a_u);
        x_nom = &r.a * &x_nom + &r.b * &u;
        trace.attack_u.push(a_u);
        trace.attack_y.push(a_y);
    }
    Ok(trace)
}

/// Outputs of an attack-free run of `steps` steps, used as replay material.
pub fn record_outputs(
    r: &Realization,
    x0: &DVector<f64>,
    inputs: &InputSchedule,
    steps: usize,
) -> Vec<DVector<f64>> {
    let mut x = x0.clone();
    (0..steps)
        .map(|k| {
            let y = &r.c * &x;
            x = &r.a * &x + &r.b * inputs.at(k);
            y
        })
        .collect()
}

/// Equilibrium `x = (I - A)^-1 B u`, if `I - A` is invertible.
pub fn steady_state(r: &Realization, u: &DVector<f64>) -> Option<DVector<f64>> {
    let n = r.a.nrows();
    let lhs = DMatrix::identity(n, n) - &r.a;
    lhs.lu().solve(&(&r.b * u))
}

/// A realization under which any payload on the path's actuator shows up
/// on the path's sensor unless the path itself is attacked.
///
/// `path` runs `u_i, x_.., y_l` in the extended graph. The first state's
/// row of `A` is cleared, each later state is driven only by its
/// predecessor, and the path's gains are drawn from `[0.5, 1]` in
/// magnitude so the response is comfortably above numerical noise.
pub fn adversarial_realization(
    m: &StructuralModel,
    path: &[GraphNode],
    seed: u64,
) -> Result<Realization> {
    let bad = |why: &str| Error::InvalidPath(why.to_owned());
    if path.len() > m.n_x() + 2 {
        return Err(bad("path is longer than any simple path"));
    }
    if path.len() < 3 {
        return Err(bad("path needs an actuator, at least one state and a sensor"));
    }
    let GraphNode::Actuator(u) = path[0] else {
        return Err(bad("path must start at an actuator"));
    };
    let GraphNode::Sensor(y) = path[path.len() - 1] else {
        return Err(bad("path must end at a sensor"));
    };
    if u >= m.n_u() || y >= m.sensor_count() {
        return Err(bad("path component out of range"));
    }
    let mut states = Vec::with_capacity(path.len() - 2);
    for node in &path[1..path.len() - 1] {
        match *node {
            GraphNode::State(x) if x < m.n_x() => states.push(x),
            _ => return Err(bad("interior path nodes must be states")),
        }
    }
    if states.iter().collect::<BTreeSet<_>>().len() != states.len() {
        return Err(bad("path revisits a state"));
    }
    if m.b_target(u) != states[0] {
        return Err(bad("actuator does not drive the first state"));
    }
    for w in states.windows(2) {
        if !m.a(w[1], w[0]) {
            return Err(bad("consecutive states are not connected"));
        }
    }
    if m.c_target(y) != *states.last().expect("nonempty") {
        return Err(bad("sensor does not measure the last state"));
    }

    let mut r = model::random_realization(m, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut strong = || {
        let v: f64 = rng.gen_range(0.5..=1.0);
        if rng.gen::<bool>() {
            v
        } else {
            -v
        }
    };
    r.b[(states[0], u)] = strong();
    r.a.row_mut(states[0]).fill(0.0);
    for w in states.windows(2) {
        r.a.row_mut(w[1]).fill(0.0);
        r.a[(w[1], w[0])] = strong();
    }
    r.c[(y, *states.last().expect("nonempty"))] = strong();
    r.validate(m)?;
    Ok(r)
}

/// Shortest path from `actuator` to a sensor in the extended graph that
/// avoids everything the attacked set controls, if one exists.
pub fn unguarded_path(
    m: &StructuralModel,
    set: &ComponentSet,
    actuator: usize,
) -> Option<Vec<GraphNode>> {
    let g = build_extended_graph(m);
    let sep = g.separator_of(set, actuator);
    let start = m.b_target(actuator);
    if sep.states.contains(&start) {
        return None;
    }
    let mut parent: Vec<Option<usize>> = vec![None; m.n_x()];
    let mut seen = vec![false; m.n_x()];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        if let Some(l) = m.sensors_on(x).find(|l| !sep.sensors.contains(l)) {
            let mut states = vec![x];
            while let Some(p) = parent[*states.last().expect("nonempty")] {
                states.push(p);
            }
            states.reverse();
            let mut path = vec![GraphNode::Actuator(actuator)];
            path.extend(states.into_iter().map(GraphNode::State));
            path.push(GraphNode::Sensor(l));
            return Some(path);
        }
        for n in m.out_neighbors(x) {
            if !seen[n] && !sep.states.contains(&n) {
                seen[n] = true;
                parent[n] = Some(x);
                queue.push_back(n);
            }
        }
    }
    None
}

/// One attack in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSpec {
    pub name: String,
    pub policy: AttackKind,
    /// Actively used actuator id.
    pub actuator: usize,
    pub attacked: ComponentSet,
    pub payload: Payload,
    /// Realization assumed by a feedforward attacker; defaults to the
    /// true one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    believed: Option<RealizationFile>,
}

impl AttackSpec {
    pub fn new(
        name: impl Into<String>,
        policy: AttackKind,
        actuator: usize,
        attacked: ComponentSet,
        payload: Payload,
    ) -> Self {
        AttackSpec {
            name: name.into(),
            policy,
            actuator,
            attacked,
            payload,
            believed: None,
        }
    }

    pub fn with_believed(mut self, r: &Realization) -> Self {
        self.believed = Some(RealizationFile::from_realization(r));
        self
    }
}

/// Scenario file: a model, initial conditions, operator inputs and a list
/// of attacks to run against them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Model file, relative to the scenario file.
    pub model: PathBuf,
    pub horizon: usize,
    pub x0: Vec<f64>,
    pub u0: Vec<f64>,
    #[serde(default)]
    pub u_changes: Vec<InputChange>,
    #[serde(default)]
    pub k_start: usize,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    /// Seeds a random realization when the model carries none.
    #[serde(default)]
    pub seed: u64,
    pub attacks: Vec<AttackSpec>,
}

fn default_warmup() -> usize {
    DEFAULT_WARMUP
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub name: String,
    pub kind: AttackKind,
    pub warnings: Vec<String>,
    pub trace: AttackTrace,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub model: StructuralModel,
    pub realization: Realization,
    pub runs: Vec<ScenarioRun>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut s = Self::parse(&model::read_text(path)?)?;
        if s.model.is_relative() {
            if let Some(dir) = path.parent() {
                s.model = dir.join(&s.model);
            }
        }
        Ok(s)
    }

    pub fn inputs(&self) -> InputSchedule {
        InputSchedule {
            base: self.u0.clone(),
            changes: self.u_changes.clone(),
        }
    }

    /// Loads the model and runs every attack.
    pub fn run(&self) -> Result<ScenarioOutcome> {
        let (m, r) = model::load_model(&self.model)?;
        let r = r.unwrap_or_else(|| model::random_realization(&m, self.seed));
        let runs = self.run_on(&m, &r)?;
        Ok(ScenarioOutcome {
            model: m,
            realization: r,
            runs,
        })
    }

    pub fn run_on(&self, m: &StructuralModel, r: &Realization) -> Result<Vec<ScenarioRun>> {
        let x0 = DVector::from_column_slice(&self.x0);
        let inputs = self.inputs();
        inputs.check(m)?;
        self.attacks
            .iter()
            .map(|spec| {
                let policy = match spec.policy {
                    AttackKind::Feedforward => {
                        let believed = match &spec.believed {
                            Some(b) => b.to_realization(m)?,
                            None => r.clone(),
                        };
                        synth_type1(m, &believed, &spec.attacked, spec.actuator, spec.payload.clone())?
                    }
                    AttackKind::LocalFeedback => {
                        synth_type2(m, &spec.attacked, spec.actuator, spec.payload.clone())?
                    }
                    AttackKind::Replay => {
                        let recorded = record_outputs(
                            r,
                            &x0,
                            &InputSchedule::constant(self.u0.clone()),
                            self.warmup.max(1),
                        );
                        synth_type3(m, &spec.attacked, spec.actuator, spec.payload.clone(), recorded)?
                    }
                };
                let trace = simulate(m, r, &policy, &x0, &inputs, self.horizon, self.k_start)?;
                Ok(ScenarioRun {
                    name: spec.name.clone(),
                    kind: spec.policy,
                    warnings: policy.warnings,
                    trace,
                })
            })
            .collect()
    }
}
