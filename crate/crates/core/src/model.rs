//! Structural and numeric plant models.
//!
//! A [`StructuralModel`] records which entries of `A`, `B` and `C` may be
//! nonzero. Each actuator drives exactly one state and each sensor measures
//! exactly one state. Sensors are stored unprotected first, protected last,
//! so the unprotected sensors `0..n_y` line up with the sensor-attack
//! channels of the attack vector.
//!
//! A [`Realization`] is a numeric instance of a structural model.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower edge of the magnitude band used by [`random_realization`].
pub const SAMPLE_DEAD_ZONE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actuator {
    pub target: usize,
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sensor {
    pub target: usize,
    pub protected: bool,
    pub name: Option<String>,
}

/// Binary sparsity description of a plant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralModel {
    n_x: usize,
    a_pattern: BTreeSet<(usize, usize)>,
    actuators: Vec<Actuator>,
    sensors: Vec<Sensor>,
    state_names: Option<Vec<String>>,
    name: Option<String>,
}

impl StructuralModel {
    /// Builds and validates a model. `a_pattern` holds `(row, col)` pairs of
    /// structural ones in `[A]`; `sensors` are `(target, protected)` pairs and
    /// must list every unprotected sensor before the first protected one.
    pub fn new(
        n_x: usize,
        a_pattern: impl IntoIterator<Item = (usize, usize)>,
        actuator_targets: impl IntoIterator<Item = usize>,
        sensors: impl IntoIterator<Item = (usize, bool)>,
    ) -> Result<Self> {
        let model = StructuralModel {
            n_x,
            a_pattern: a_pattern.into_iter().collect(),
            actuators: actuator_targets
                .into_iter()
                .map(|target| Actuator { target, name: None })
                .collect(),
            sensors: sensors
                .into_iter()
                .map(|(target, protected)| Sensor {
                    target,
                    protected,
                    name: None,
                })
                .collect(),
            state_names: None,
            name: None,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        if self.n_x == 0 {
            return Err(Error::Invariant("n_x must be positive".into()));
        }
        for &(i, j) in &self.a_pattern {
            if i >= self.n_x || j >= self.n_x {
                return Err(Error::Invariant(format!(
                    "a_pattern entry [{i},{j}] outside {n}x{n}",
                    n = self.n_x
                )));
            }
        }
        for (k, act) in self.actuators.iter().enumerate() {
            if act.target >= self.n_x {
                return Err(Error::OutOfRange {
                    kind: "actuator target state",
                    index: act.target,
                    count: self.n_x,
                });
            }
            if let Some(first) = self.actuators[..k].iter().position(|a| a.target == act.target) {
                return Err(Error::DuplicateActuatorTarget {
                    first,
                    second: k,
                    state: act.target,
                });
            }
        }
        let mut seen_protected = false;
        for s in &self.sensors {
            if s.target >= self.n_x {
                return Err(Error::OutOfRange {
                    kind: "sensor target state",
                    index: s.target,
                    count: self.n_x,
                });
            }
            if s.protected {
                seen_protected = true;
            } else if seen_protected {
                return Err(Error::Invariant(
                    "protected sensors must follow every unprotected sensor".into(),
                ));
            }
        }
        if let Some(names) = &self.state_names {
            if names.len() != self.n_x {
                return Err(Error::Invariant(format!(
                    "{} state names for {} states",
                    names.len(),
                    self.n_x
                )));
            }
        }
        Ok(())
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_u(&self) -> usize {
        self.actuators.len()
    }

    /// Number of unprotected sensors.
    pub fn n_y(&self) -> usize {
        self.sensors.iter().filter(|s| !s.protected).count()
    }

    /// Number of protected sensors.
    pub fn n_e(&self) -> usize {
        self.sensors.len() - self.n_y()
    }

    pub fn sensor_count(&self) -> usize {
        self.sensors.len()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn actuators(&self) -> &[Actuator] {
        &self.actuators
    }

    pub fn sensors(&self) -> &[Sensor] {
        &self.sensors
    }

    pub fn a_pattern(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.a_pattern.iter().copied()
    }

    /// `[A](row, col) == 1`.
    pub fn a(&self, row: usize, col: usize) -> bool {
        self.a_pattern.contains(&(row, col))
    }

    pub fn b_target(&self, actuator: usize) -> usize {
        self.actuators[actuator].target
    }

    pub fn c_target(&self, sensor: usize) -> usize {
        self.sensors[sensor].target
    }

    pub fn is_protected(&self, sensor: usize) -> bool {
        self.sensors[sensor].protected
    }

    /// Actuator driving `state`, if any.
    pub fn actuator_on(&self, state: usize) -> Option<usize> {
        self.actuators.iter().position(|a| a.target == state)
    }

    /// Sensors measuring `state`.
    pub fn sensors_on(&self, state: usize) -> impl Iterator<Item = usize> + '_ {
        self.sensors
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.target == state)
            .map(|(l, _)| l)
    }

    /// States `j` with `[A](state, j) = 1`.
    pub fn in_neighbors(&self, state: usize) -> impl Iterator<Item = usize> + '_ {
        self.a_pattern
            .range((state, 0)..(state + 1, 0))
            .map(|&(_, j)| j)
    }

    /// States `i` with `[A](i, state) = 1`.
    pub fn out_neighbors(&self, state: usize) -> impl Iterator<Item = usize> + '_ {
        self.a_pattern
            .iter()
            .filter(move |&&(_, j)| j == state)
            .map(|&(i, _)| i)
    }

    pub fn state_label(&self, state: usize) -> String {
        match &self.state_names {
            Some(names) => names[state].clone(),
            None => format!("x{}", state + 1),
        }
    }

    pub fn actuator_label(&self, actuator: usize) -> String {
        self.actuators[actuator]
            .name
            .clone()
            .unwrap_or_else(|| format!("u{}", actuator + 1))
    }

    pub fn sensor_label(&self, sensor: usize) -> String {
        self.sensors[sensor]
            .name
            .clone()
            .unwrap_or_else(|| format!("y{}", sensor + 1))
    }

    /// Looks up an actuator by display label (`u2`, or a custom name) or by
    /// a 1-based number.
    pub fn find_actuator(&self, label: &str) -> Option<usize> {
        if let Some(k) = (0..self.n_u()).find(|&k| self.actuator_label(k) == label) {
            return Some(k);
        }
        let digits = label.strip_prefix('u').unwrap_or(label);
        digits
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1 && n <= self.n_u())
            .map(|n| n - 1)
    }

    pub fn with_state_names(mut self, names: Vec<String>) -> Result<Self> {
        self.state_names = Some(names);
        self.validate()?;
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Insertion position a new sensor takes so the protected suffix stays
    /// intact.
    pub fn sensor_insert_position(&self, protected: bool) -> usize {
        if protected {
            self.sensors.len()
        } else {
            self.n_y()
        }
    }
}

/// Returns a copy of `m` with one more sensor on `state`.
pub fn add_sensor(m: &StructuralModel, state: usize, protected: bool) -> Result<StructuralModel> {
    if state >= m.n_x {
        return Err(Error::OutOfRange {
            kind: "state",
            index: state,
            count: m.n_x,
        });
    }
    let mut out = m.clone();
    let pos = m.sensor_insert_position(protected);
    out.sensors.insert(
        pos,
        Sensor {
            target: state,
            protected,
            name: None,
        },
    );
    Ok(out)
}

/// Inverse of [`add_sensor`].
pub fn remove_sensor(m: &StructuralModel, sensor: usize) -> Result<StructuralModel> {
    if sensor >= m.sensors.len() {
        return Err(Error::OutOfRange {
            kind: "sensor",
            index: sensor,
            count: m.sensors.len(),
        });
    }
    let mut out = m.clone();
    out.sensors.remove(sensor);
    Ok(out)
}

/// Returns a copy of `m` with a new actuator on `state`, appended last.
pub fn add_actuator(m: &StructuralModel, state: usize) -> Result<StructuralModel> {
    if state >= m.n_x {
        return Err(Error::OutOfRange {
            kind: "state",
            index: state,
            count: m.n_x,
        });
    }
    let mut out = m.clone();
    out.actuators.push(Actuator {
        target: state,
        name: None,
    });
    out.validate()?;
    Ok(out)
}

/// Attack components: actuators by index, sensors by index into
/// [`StructuralModel::sensors`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentSet {
    #[serde(default)]
    pub actuators: BTreeSet<usize>,
    #[serde(default)]
    pub sensors: BTreeSet<usize>,
}

impl ComponentSet {
    pub fn new(
        actuators: impl IntoIterator<Item = usize>,
        sensors: impl IntoIterator<Item = usize>,
    ) -> Self {
        ComponentSet {
            actuators: actuators.into_iter().collect(),
            sensors: sensors.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.actuators.len() + self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks ids are in range and that no protected sensor is included.
    pub fn validate_attack(&self, m: &StructuralModel) -> Result<()> {
        if let Some(&a) = self.actuators.iter().find(|&&a| a >= m.n_u()) {
            return Err(Error::OutOfRange {
                kind: "actuator",
                index: a,
                count: m.n_u(),
            });
        }
        for &s in &self.sensors {
            if s >= m.sensor_count() {
                return Err(Error::OutOfRange {
                    kind: "sensor",
                    index: s,
                    count: m.sensor_count(),
                });
            }
            if m.is_protected(s) {
                return Err(Error::Invariant(format!(
                    "sensor {} is protected and cannot be attacked",
                    m.sensor_label(s)
                )));
            }
        }
        Ok(())
    }

    /// Human-readable form such as `{u1,u2,y1}`.
    pub fn label(&self, m: &StructuralModel) -> String {
        let parts: Vec<String> = self
            .actuators
            .iter()
            .map(|&a| m.actuator_label(a))
            .chain(self.sensors.iter().map(|&s| m.sensor_label(s)))
            .collect();
        format!("{{{}}}", parts.join(","))
    }
}

fn indexed(m: &DMatrix<f64>) -> impl Iterator<Item = ((usize, usize), &f64)> {
    (0..m.nrows()).flat_map(move |i| (0..m.ncols()).map(move |j| ((i, j), &m[(i, j)])))
}

/// Numeric matrices consistent with a [`StructuralModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl Realization {
    /// Builds a realization and checks it against `m`.
    pub fn new(
        m: &StructuralModel,
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
    ) -> Result<Self> {
        let r = Realization { a, b, c };
        r.validate(m)?;
        Ok(r)
    }

    pub fn validate(&self, m: &StructuralModel) -> Result<()> {
        let n = m.n_x();
        let want = [
            ("a", self.a.shape(), (n, n)),
            ("b", self.b.shape(), (n, m.n_u())),
            ("c", self.c.shape(), (m.sensor_count(), n)),
        ];
        for (name, got, expect) in want {
            if got != expect {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {}x{}",
                    got.0, got.1, expect.0, expect.1
                )));
            }
        }
        for ((i, j), v) in indexed(&self.a) {
            if !v.is_finite() {
                return Err(Error::Invariant(format!("A({},{}) is not finite", i + 1, j + 1)));
            }
            if *v != 0.0 && !m.a(i, j) {
                return Err(Error::Invariant(format!(
                    "A({},{}) = {v} but [A] is zero there",
                    i + 1,
                    j + 1
                )));
            }
        }
        for ((i, j), v) in indexed(&self.b) {
            let structural = m.b_target(j) == i;
            if !v.is_finite() || (structural && *v == 0.0) || (!structural && *v != 0.0) {
                return Err(Error::Invariant(format!(
                    "B({},{}) = {v} violates [B] (actuator {} drives x{})",
                    i + 1,
                    j + 1,
                    m.actuator_label(j),
                    m.b_target(j) + 1
                )));
            }
        }
        for ((l, j), v) in indexed(&self.c) {
            if !v.is_finite() || (*v != 0.0 && m.c_target(l) != j) {
                return Err(Error::Invariant(format!(
                    "C({},{}) = {v} violates [C] (sensor {} measures x{})",
                    l + 1,
                    j + 1,
                    m.sensor_label(l),
                    m.c_target(l) + 1
                )));
            }
        }
        Ok(())
    }

    /// Nonzero `B` entry of `actuator`.
    pub fn b_gain(&self, m: &StructuralModel, actuator: usize) -> f64 {
        self.b[(m.b_target(actuator), actuator)]
    }

    /// Same realization with one more sensor row, matching [`add_sensor`].
    pub fn with_sensor(
        &self,
        m: &StructuralModel,
        state: usize,
        protected: bool,
        gain: f64,
    ) -> Result<(StructuralModel, Realization)> {
        let m2 = add_sensor(m, state, protected)?;
        let pos = m.sensor_insert_position(protected);
        let mut c = self.c.clone().insert_row(pos, 0.0);
        c[(pos, state)] = gain;
        let r2 = Realization::new(&m2, self.a.clone(), self.b.clone(), c)?;
        Ok((m2, r2))
    }

    /// Same realization with one more actuator column, matching [`add_actuator`].
    pub fn with_actuator(
        &self,
        m: &StructuralModel,
        state: usize,
        gain: f64,
    ) -> Result<(StructuralModel, Realization)> {
        let m2 = add_actuator(m, state)?;
        let k = self.b.ncols();
        let mut b = self.b.clone().insert_column(k, 0.0);
        b[(state, k)] = gain;
        let r2 = Realization::new(&m2, self.a.clone(), b, self.c.clone())?;
        Ok((m2, r2))
    }
}

fn sample_entry(rng: &mut impl Rng) -> f64 {
    let magnitude = rng.gen_range(SAMPLE_DEAD_ZONE..=1.0);
    if rng.gen::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

/// Draws every structural one uniformly from `[-1, -0.05] ∪ [0.05, 1]`.
/// Deterministic in `seed`.
pub fn random_realization(m: &StructuralModel, seed: u64) -> Realization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.n_x();
    let mut a = DMatrix::zeros(n, n);
    for (i, j) in m.a_pattern() {
        a[(i, j)] = sample_entry(&mut rng);
    }
    let mut b = DMatrix::zeros(n, m.n_u());
    for (k, act) in m.actuators().iter().enumerate() {
        b[(act.target, k)] = sample_entry(&mut rng);
    }
    let mut c = DMatrix::zeros(m.sensor_count(), n);
    for (l, s) in m.sensors().iter().enumerate() {
        c[(l, s.target)] = sample_entry(&mut rng);
    }
    Realization { a, b, c }
}

// ---- on-disk format -------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    n_x: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    state_names: Option<Vec<String>>,
    actuators: Vec<ActuatorEntry>,
    sensors: Vec<SensorEntry>,
    a_pattern: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    realization: Option<RealizationFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActuatorEntry {
    target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorEntry {
    target: usize,
    #[serde(default)]
    protected: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RealizationFile {
    a: DenseMatrix,
    b: DenseMatrix,
    c: DenseMatrix,
}

/// Matrices on disk: a list of rows, or a flat row-major list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum DenseMatrix {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl DenseMatrix {
    fn from_matrix(m: &DMatrix<f64>) -> Self {
        DenseMatrix::Rows(
            m.row_iter()
                .map(|row| row.iter().copied().collect())
                .collect(),
        )
    }

    fn to_matrix(&self, name: &str, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
        match self {
            DenseMatrix::Rows(data) => {
                // An all-empty list of rows is ambiguous with the flat form.
                if data.len() != rows || data.iter().any(|r| r.len() != cols) {
                    return Err(Error::Schema(format!(
                        "realization.{name} must be {rows}x{cols}"
                    )));
                }
                Ok(DMatrix::from_fn(rows, cols, |i, j| data[i][j]))
            }
            DenseMatrix::Flat(data) => {
                if data.len() != rows * cols {
                    return Err(Error::Schema(format!(
                        "realization.{name} has {} entries, expected {}",
                        data.len(),
                        rows * cols
                    )));
                }
                Ok(DMatrix::from_row_slice(rows, cols, data))
            }
        }
    }
}

impl RealizationFile {
    pub(crate) fn from_realization(r: &Realization) -> Self {
        RealizationFile {
            a: DenseMatrix::from_matrix(&r.a),
            b: DenseMatrix::from_matrix(&r.b),
            c: DenseMatrix::from_matrix(&r.c),
        }
    }

    pub(crate) fn to_realization(&self, m: &StructuralModel) -> Result<Realization> {
        let n = m.n_x();
        // Empty matrices (no actuators / no sensors) parse as an empty list.
        let dims = |name: &str, d: &DenseMatrix, rows: usize, cols: usize| {
            if rows * cols == 0 {
                Ok(DMatrix::zeros(rows, cols))
            } else {
                d.to_matrix(name, rows, cols)
            }
        };
        let a = dims("a", &self.a, n, n)?;
        let b = dims("b", &self.b, n, m.n_u())?;
        let c = dims("c", &self.c, m.sensor_count(), n)?;
        Realization::new(m, a, b, c)
    }
}

/// Parses a model document.
pub fn parse_model(text: &str) -> Result<(StructuralModel, Option<Realization>)> {
    let file: ModelFile = serde_json::from_str(text)?;
    let model = StructuralModel {
        n_x: file.n_x,
        a_pattern: file.a_pattern.iter().map(|&[i, j]| (i, j)).collect(),
        actuators: file
            .actuators
            .into_iter()
            .map(|a| Actuator {
                target: a.target,
                name: a.name,
            })
            .collect(),
        sensors: file
            .sensors
            .into_iter()
            .map(|s| Sensor {
                target: s.target,
                protected: s.protected,
                name: s.name,
            })
            .collect(),
        state_names: file.state_names,
        name: file.name,
    };
    model.validate()?;
    let realization = file
        .realization
        .as_ref()
        .map(|r| r.to_realization(&model))
        .transpose()?;
    Ok((model, realization))
}

/// Reads and validates a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<(StructuralModel, Option<Realization>)> {
    let text = read_text(path.as_ref())?;
    parse_model(&text)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Canonical text form: sorted pattern, pretty-printed, trailing newline.
pub fn model_to_string(m: &StructuralModel, r: Option<&Realization>) -> String {
    let file = ModelFile {
        name: m.name.clone(),
        n_x: m.n_x,
        state_names: m.state_names.clone(),
        actuators: m
            .actuators
            .iter()
            .map(|a| ActuatorEntry {
                target: a.target,
                name: a.name.clone(),
            })
            .collect(),
        sensors: m
            .sensors
            .iter()
            .map(|s| SensorEntry {
                target: s.target,
                protected: s.protected,
                name: s.name.clone(),
            })
            .collect(),
        a_pattern: m.a_pattern.iter().map(|&(i, j)| [i, j]).collect(),
        realization: r.map(RealizationFile::from_realization),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
    text.push('\n');
    text
}

pub fn save_model(path: impl AsRef<Path>, m: &StructuralModel, r: Option<&Realization>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model_to_string(m, r)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

impl fmt::Display for StructuralModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n_x={} n_u={} n_y={} n_e={}",
            self.n_x,
            self.n_u(),
            self.n_y(),
            self.n_e()
        )
    }
}
