//! Per-run artifacts: the trace table and the structured record.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ccgsa_core::{GroupStructure, Trace, TracePoint};
use serde::{Deserialize, Serialize};

use crate::config::Algorithm;
use crate::error::{HarnessError, Result};
use crate::report::fmt_f64;

pub fn trace_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("run_{seed}.trace"))
}

pub fn record_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("run_{seed}.record"))
}

/// Renders a trace as tab-separated `evaluations  best` rows under a `#`
/// header. Values are written in shortest round-trip form.
pub fn format_trace(trace: &Trace) -> String {
    let mut out = String::from("# evaluations\tbest\n");
    for p in &trace.points {
        let _ = writeln!(out, "{}\t{}", p.evaluations, fmt_f64(p.best));
    }
    out
}

pub fn parse_trace(text: &str) -> std::result::Result<Trace, String> {
    let mut points = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(e), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(format!("line {}: expected two columns", n + 1));
        };
        let evaluations = e
            .parse()
            .map_err(|_| format!("line {}: bad evaluation count `{e}`", n + 1))?;
        let best = b
            .parse()
            .map_err(|_| format!("line {}: bad value `{b}`", n + 1))?;
        points.push(TracePoint { evaluations, best });
    }
    Ok(Trace { points })
}

pub fn read_trace(path: &Path) -> Result<Trace> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_trace(&text).map_err(|m| HarnessError::parse(path, m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub fingerprint: String,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub function: String,
    pub dim: usize,
    pub fe_budget: u64,
    pub duration_secs: f64,
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunOutcome {
    Completed(Completed),
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Completed {
    pub best_fitness: f64,
    pub best_position: Vec<f64>,
    pub evaluations_used: u64,
    /// Plain GSA only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cc: Option<CcDetails>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcDetails {
    pub groups: GroupStructure,
    pub grouping_evaluations: u64,
    pub cycles_completed: usize,
    /// `None` for coordinates whose group was never optimized.
    pub subcomponent_best: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grouping_matches_truth: Option<bool>,
}

impl RunRecord {
    pub fn completed(&self) -> Option<&Completed> {
        match &self.outcome {
            RunOutcome::Completed(c) => Some(c),
            RunOutcome::Failed { .. } => None,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = record_path(dir, self.seed);
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| HarnessError::parse(&path, e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| HarnessError::parse(path, e.to_string()))
    }
}

/// Loads every `run_<seed>.record` in `dir` with its trace, ordered by seed.
pub fn load_runs(dir: &Path) -> Result<Vec<(RunRecord, Trace)>> {
    let entries = fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut runs = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| HarnessError::io(dir, e))?.path();
        let is_record = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("run_") && n.ends_with(".record"));
        if !is_record {
            continue;
        }
        let record = RunRecord::read(&path)?;
        let trace_file = trace_path(dir, record.seed);
        let trace = if trace_file.exists() {
            read_trace(&trace_file)?
        } else {
            Trace::default()
        };
        runs.push((record, trace));
    }
    if runs.is_empty() {
        return Err(HarnessError::Config(format!(
            "no run records found in {}",
            dir.display()
        )));
    }
    runs.sort_by_key(|(r, _)| r.seed);
    Ok(runs)
}
