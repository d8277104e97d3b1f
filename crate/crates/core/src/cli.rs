//! Command implementations behind the `secidx` binary.
//!
//! Each command returns a [`RunReport`] that renders either as a plain
//! table (1-based names such as `u1`, `x2`) or as JSON (0-based ids).

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::attack::Scenario;
use crate::error::{Error, Result};
use crate::exact_index::{ExactSolver, ExactValue};
use crate::model::{self, StructuralModel};
use crate::placement::{self, PlacementRequest};
use crate::robust_index::{self, build_extended_graph, build_flow_network};
use crate::IndexValue;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the input file.
    pub model_hash: String,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl RunReport {
    fn new(command: &str, hash: String, seed: Option<u64>, results: Value, lines: Vec<String>) -> Self {
        RunReport {
            command: command.to_owned(),
            model_hash: hash,
            version: VERSION,
            seed,
            results,
            timing_ms: None,
            lines,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        if let Some(ms) = self.timing_ms {
            out.push_str(&format!("time: {ms:.3} ms\n"));
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn file_hash(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Actuators selected by an optional label (`u2`, a custom name, or a
/// 1-based number).
fn selected(m: &StructuralModel, actuator: Option<&str>) -> Result<Vec<usize>> {
    match actuator {
        None => Ok((0..m.n_u()).collect()),
        Some(label) => m
            .find_actuator(label)
            .map(|k| vec![k])
            .ok_or_else(|| Error::Parse(format!("unknown actuator {label:?}"))),
    }
}

/// `label: value` lines.
fn table(rows: Vec<(String, String)>) -> Vec<String> {
    rows.into_iter().map(|(l, v)| format!("{l}: {v}")).collect()
}

pub fn cmd_index_exact(
    path: &Path,
    actuator: Option<&str>,
    budget: Option<usize>,
    seed: u64,
) -> Result<RunReport> {
    let hash = file_hash(path)?;
    let (m, r) = model::load_model(path)?;
    let r = r.ok_or(Error::MissingRealization)?;
    let which = selected(&m, actuator)?;
    let solver = ExactSolver::new(&m, &r, seed);
    let reports: Vec<_> = {
        use rayon::prelude::*;
        which.par_iter().map(|&k| solver.delta(k, budget)).collect()
    };
    let mut rows = Vec::new();
    for rep in &reports {
        let mut cell = rep.value.to_string();
        if let Some(w) = &rep.witness {
            cell.push(' ');
            cell.push_str(&w.label(&m));
        }
        if rep.borderline {
            cell.push_str(" (borderline)");
        }
        rows.push((m.actuator_label(rep.actuator), cell));
    }
    let results = Value::Array(
        reports
            .iter()
            .map(|rep| {
                json!({
                    "actuator": rep.actuator,
                    "value": match rep.value {
                        ExactValue::Finite(v) => json!(v),
                        ExactValue::Infinite => json!("inf"),
                        ExactValue::AtLeast(v) => json!({ "at_least": v }),
                    },
                    "witness": rep.witness,
                    "borderline": rep.borderline,
                })
            })
            .collect(),
    );
    Ok(RunReport::new("index-exact", hash, Some(seed), results, table(rows)))
}

pub fn cmd_index_robust(path: &Path, actuator: Option<&str>, dump_graph: bool) -> Result<RunReport> {
    let hash = file_hash(path)?;
    let (m, _) = model::load_model(path)?;
    let which = selected(&m, actuator)?;
    let reports: Vec<_> = {
        use rayon::prelude::*;
        which.par_iter().map(|&k| robust_index::delta_r(&m, k)).collect()
    };
    let rows = reports
        .iter()
        .map(|rep| {
            let cell = match (&rep.witness, &rep.separator) {
                (Some(w), Some(s)) => format!("{} {} separator {}", rep.value, w.label(&m), s.label(&m)),
                _ => rep.value.to_string(),
            };
            (m.actuator_label(rep.actuator), cell)
        })
        .collect();
    let mut lines = table(rows);
    if dump_graph {
        lines.extend(graph_lines(&m, &which));
    }
    let results = serde_json::to_value(&reports).expect("reports serialize");
    Ok(RunReport::new("index-robust", hash, None, results, lines))
}

fn graph_lines(m: &StructuralModel, which: &[usize]) -> Vec<String> {
    let g = build_extended_graph(m);
    let mut lines = Vec::new();
    for &k in which {
        lines.push(format!("# {}", m.actuator_label(k)));
        let net = build_flow_network(&g, k);
        lines.extend(net.edge_list(m).lines().map(str::to_owned));
    }
    lines
}

/// Flow networks as `src dst capacity` edge lists, one block per actuator.
pub fn cmd_dump_graph(path: &Path, actuator: Option<&str>) -> Result<RunReport> {
    let hash = file_hash(path)?;
    let (m, _) = model::load_model(path)?;
    let which = selected(&m, actuator)?;
    let g = build_extended_graph(&m);
    let results = Value::Array(
        which
            .iter()
            .map(|&k| {
                let net = build_flow_network(&g, k);
                json!({
                    "actuator": k,
                    "nodes": net.nodes,
                    "arcs": net.arcs,
                })
            })
            .collect(),
    );
    Ok(RunReport::new("dump-graph", hash, None, results, graph_lines(&m, &which)))
}

pub fn cmd_xset(path: &Path, actuator: Option<&str>) -> Result<RunReport> {
    let hash = file_hash(path)?;
    let (m, _) = model::load_model(path)?;
    let sets: Vec<_> = selected(&m, actuator)?
        .into_iter()
        .map(|k| placement::x_set(&m, k))
        .collect();
    let rows = sets
        .iter()
        .map(|s| (m.actuator_label(s.actuator), s.label(&m)))
        .collect();
    let results = serde_json::to_value(&sets).expect("sets serialize");
    Ok(RunReport::new("xset", hash, None, results, table(rows)))
}

fn states_label(m: &StructuralModel, states: impl IntoIterator<Item = usize>) -> String {
    let names: Vec<String> = states.into_iter().map(|x| m.state_label(x)).collect();
    format!("{{{}}}", names.join(","))
}

pub fn cmd_place(model_path: &Path, request_path: &Path) -> Result<RunReport> {
    let mut hasher = Sha256::new();
    hasher.update(file_hash(model_path)?);
    hasher.update(file_hash(request_path)?);
    let hash = hex::encode(hasher.finalize());
    let (m, _) = model::load_model(model_path)?;
    let request = PlacementRequest::load(request_path)?;
    let inst = request.instance(&m)?;

    let (results, lines) = if request.protected {
        let p = placement::greedy_protected(&inst);
        let placed = placement::apply_placement(&m, p.states.iter().copied(), true)?;
        let after = robust_index::delta_r_all(&placed);
        let lines = vec![
            format!("protected sensors: {}", states_label(&m, p.states.iter().copied())),
            format!("covered actuators: {} of {}", p.value, inst.u_p.len()),
            format!("guarantee: value >= {:.4} * optimum", 1.0 - (-1.0f64).exp()),
        ];
        (
            json!({
                "problem": "max_protected",
                "states": p.states,
                "value": p.value,
                "delta_r_after": after.iter().map(|r| r.value).collect::<Vec<_>>(),
            }),
            lines,
        )
    } else {
        let before = robust_index::delta_r_all(&m);
        let p = placement::greedy_unprotected(&inst)?;
        let placed = placement::apply_placement(&m, p.states.iter().copied(), false)?;
        let after = robust_index::delta_r_all(&placed);
        let mut lines = vec![
            format!(
                "sensors: {} {}",
                p.states.len(),
                states_label(&m, p.states.iter().copied())
            ),
            format!("gain: {} of {}", p.gain, inst.target()),
            format!(
                "certificate: H({}) = {}",
                p.max_single_gain,
                trim_float(p.certificate)
            ),
        ];
        let rows = (0..m.n_u())
            .map(|k| {
                (
                    m.actuator_label(k),
                    format!("{} -> {}", before[k].value, after[k].value),
                )
            })
            .collect();
        lines.extend(table(rows));
        (
            json!({
                "problem": "min_unprotected",
                "candidates": p.chosen,
                "states": p.states,
                "gain": p.gain,
                "max_single_gain": p.max_single_gain,
                "certificate": p.certificate,
                "delta_r_before": before.iter().map(|r| r.value).collect::<Vec<IndexValue>>(),
                "delta_r_after": after.iter().map(|r| r.value).collect::<Vec<IndexValue>>(),
            }),
            lines,
        )
    };
    Ok(RunReport::new("place", hash, None, results, lines))
}

fn trim_float(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_owned()
}

/// Where the trace of one attack goes when a scenario has several.
pub fn trace_path(out: &Path, name: &str, runs: usize) -> std::path::PathBuf {
    if runs == 1 {
        return out.to_path_buf();
    }
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}_{name}.{ext}"))
}

pub fn cmd_simulate(scenario_path: &Path, out: Option<&Path>) -> Result<RunReport> {
    let hash = file_hash(scenario_path)?;
    let scenario = Scenario::load(scenario_path)?;
    let outcome = scenario.run()?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for run in &outcome.runs {
        let max = run.trace.max_abs_residual();
        let mut cell = format!("max |residual| = {max:.3e}");
        for w in &run.warnings {
            cell.push_str(&format!(" [warning: {w}]"));
        }
        rows.push((run.name.clone(), cell));
        results.push(json!({
            "name": run.name,
            "policy": run.kind,
            "max_abs_residual": max,
            "first_detection": run.trace.first_detection(crate::attack::DETECTION_THRESHOLD),
            "warnings": run.warnings,
        }));
        if let Some(out) = out {
            let path = trace_path(out, &run.name, outcome.runs.len());
            let file = std::fs::File::create(&path).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            run.trace.write_csv(file)?;
        }
    }
    Ok(RunReport::new(
        "simulate",
        hash,
        Some(scenario.seed),
        Value::Array(results),
        table(rows),
    ))
}
