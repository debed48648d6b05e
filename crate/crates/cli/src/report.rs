//! Summary statistics, convergence tables and cross-experiment comparison.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use ccgsa_core::Trace;
use serde::{Deserialize, Serialize};

use crate::config::Algorithm;
use crate::error::{HarnessError, Result};
use crate::record::RunRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub function: String,
    pub dim: usize,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub failed: usize,
    pub best: f64,
    pub median: f64,
    pub mean: f64,
    pub worst: f64,
    pub mean_evaluations: f64,
    /// Number of groups found (CCGSA-DG only).
    pub groups: Option<usize>,
    /// Whether every run recovered the known partition.
    pub grouping_exact: Option<bool>,
}

const SUMMARY_HEADER: &str =
    "function\tdim\talgorithm\truns\tfailed\tbest\tmedian\tmean\tworst\tmean_evaluations\tgroups\tgrouping_exact";

pub fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Reduces the records of one experiment to a summary row.
pub fn summarize(records: &[RunRecord]) -> Result<SummaryRow> {
    let first = records
        .first()
        .ok_or_else(|| HarnessError::Config("cannot summarize zero runs".into()))?;
    if let Some(r) = records
        .iter()
        .find(|r| r.fingerprint != first.fingerprint)
    {
        return Err(HarnessError::Config(format!(
            "run {} belongs to a different experiment ({} vs {})",
            r.seed, r.fingerprint, first.fingerprint
        )));
    }
    let done: Vec<_> = records.iter().filter_map(|r| r.completed()).collect();
    let mut finals: Vec<f64> = done.iter().map(|c| c.best_fitness).collect();
    finals.sort_by(f64::total_cmp);
    let count = finals.len() as f64;
    let cc: Vec<_> = done.iter().filter_map(|c| c.cc.as_ref()).collect();
    let groups = cc.first().map(|d| d.groups.len());
    let grouping_exact = if cc.is_empty() || cc.iter().any(|d| d.grouping_matches_truth.is_none()) {
        None
    } else {
        Some(cc.iter().all(|d| d.grouping_matches_truth == Some(true)))
    };
    Ok(SummaryRow {
        function: first.function.clone(),
        dim: first.dim,
        algorithm: first.algorithm,
        runs: records.len(),
        failed: records.len() - done.len(),
        best: finals.first().copied().unwrap_or(f64::NAN),
        median: median(&finals),
        mean: finals.iter().sum::<f64>() / count,
        worst: finals.last().copied().unwrap_or(f64::NAN),
        mean_evaluations: done.iter().map(|c| c.evaluations_used as f64).sum::<f64>() / count,
        groups,
        grouping_exact,
    })
}

/// Shortest round-trip text for `v`, in exponent form when the magnitude is
/// very small or very large.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.function,
            r.dim,
            r.algorithm,
            r.runs,
            r.failed,
            fmt_f64(r.best),
            fmt_f64(r.median),
            fmt_f64(r.mean),
            fmt_f64(r.worst),
            fmt_f64(r.mean_evaluations),
            opt(r.groups),
            opt(r.grouping_exact),
        );
    }
    out
}

pub fn parse_summary(text: &str) -> std::result::Result<Vec<SummaryRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SUMMARY_HEADER => {}
        _ => return Err("missing or unexpected summary header".into()),
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let c: Vec<&str> = line.split('\t').collect();
        if c.len() != 12 {
            return Err(format!("row {}: expected 12 columns, found {}", n + 1, c.len()));
        }
        let bad = |what: &str, v: &str| format!("row {}: bad {what} `{v}`", n + 1);
        let num = |i: usize, what: &str| c[i].parse::<f64>().map_err(|_| bad(what, c[i]));
        let int = |i: usize, what: &str| c[i].parse::<usize>().map_err(|_| bad(what, c[i]));
        rows.push(SummaryRow {
            function: c[0].to_string(),
            dim: int(1, "dim")?,
            algorithm: c[2].parse().map_err(|_| bad("algorithm", c[2]))?,
            runs: int(3, "runs")?,
            failed: int(4, "failed")?,
            best: num(5, "best")?,
            median: num(6, "median")?,
            mean: num(7, "mean")?,
            worst: num(8, "worst")?,
            mean_evaluations: num(9, "mean_evaluations")?,
            groups: match c[10] {
                "-" => None,
                v => Some(v.parse().map_err(|_| bad("groups", v))?),
            },
            grouping_exact: match c[11] {
                "-" => None,
                v => Some(v.parse().map_err(|_| bad("grouping_exact", v))?),
            },
        });
    }
    Ok(rows)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_summary(&text).map_err(|m| HarnessError::parse(path, m))
}

/// Plot-ready table: evaluation count, one best-so-far column per run and
/// the median across runs. Rows cover the union of every run's sample
/// points; a run's value is carried forward between its own samples and
/// after it ends, and left as `NaN` before its first sample.
pub fn convergence_table(runs: &[(u64, &Trace)]) -> String {
    let mut out = String::from("# evaluations");
    for (seed, _) in runs {
        let _ = write!(out, "\tseed_{seed}");
    }
    out.push_str("\tmedian\n");

    let steps: BTreeSet<u64> = runs
        .iter()
        .flat_map(|(_, t)| t.points.iter().map(|p| p.evaluations))
        .collect();
    let mut cursor = vec![0usize; runs.len()];
    let mut current = vec![f64::NAN; runs.len()];
    for step in steps {
        for (k, (_, trace)) in runs.iter().enumerate() {
            while let Some(p) = trace.points.get(cursor[k]).filter(|p| p.evaluations <= step) {
                current[k] = p.best;
                cursor[k] += 1;
            }
        }
        let mut known: Vec<f64> = current.iter().copied().filter(|v| !v.is_nan()).collect();
        known.sort_by(f64::total_cmp);
        let _ = write!(out, "{step}");
        for v in &current {
            let _ = write!(out, "\t{}", fmt_f64(*v));
        }
        let _ = writeln!(out, "\t{}", fmt_f64(median(&known)));
    }
    out
}

/// Formats a value in scientific notation with three significant digits.
pub fn sci3(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.2e}")
    } else {
        v.to_string()
    }
}

/// Cross-experiment comparison of median final fitness, one row per
/// (function, dim) and one column per algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub algorithms: Vec<Algorithm>,
    /// Keyed by (function, dim); `None` marks a missing combination.
    pub rows: BTreeMap<(String, usize), Vec<Option<f64>>>,
}

pub fn compare_table(summaries: &[SummaryRow]) -> Comparison {
    let mut algorithms: Vec<Algorithm> = Vec::new();
    for s in summaries {
        if !algorithms.contains(&s.algorithm) {
            algorithms.push(s.algorithm);
        }
    }
    algorithms.sort_by_key(|a| a.label());
    let mut rows: BTreeMap<(String, usize), Vec<Option<f64>>> = BTreeMap::new();
    for s in summaries {
        let col = algorithms.iter().position(|a| *a == s.algorithm).expect("collected above");
        rows.entry((s.function.clone(), s.dim))
            .or_insert_with(|| vec![None; algorithms.len()])[col] = Some(s.median);
    }
    Comparison { algorithms, rows }
}

impl Comparison {
    /// Aligned human-readable table.
    pub fn render(&self) -> String {
        let mut cells: Vec<Vec<String>> = vec![];
        let mut header = vec!["function".to_string(), "dim".to_string()];
        header.extend(self.algorithms.iter().map(|a| a.to_string()));
        cells.push(header);
        for ((function, dim), values) in &self.rows {
            let mut row = vec![function.clone(), dim.to_string()];
            row.extend(values.iter().map(|v| v.map_or_else(|| "-".to_string(), sci3)));
            cells.push(row);
        }
        let widths: Vec<usize> = (0..cells[0].len())
            .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }

    /// Tab-separated form with exact medians.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("function\tdim");
        for a in &self.algorithms {
            let _ = write!(out, "\t{a}");
        }
        out.push('\n');
        for ((function, dim), values) in &self.rows {
            let _ = write!(out, "{function}\t{dim}");
            for v in values {
                let _ = write!(out, "\t{}", v.map_or_else(|| "-".to_string(), fmt_f64));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().ok_or("empty comparison")?.split('\t').collect();
        if header.len() < 2 || header[0] != "function" || header[1] != "dim" {
            return Err("unexpected comparison header".into());
        }
        let algorithms = header[2..]
            .iter()
            .map(|a| a.parse().map_err(|_| format!("unknown algorithm `{a}`")))
            .collect::<std::result::Result<Vec<Algorithm>, String>>()?;
        let mut rows = BTreeMap::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let c: Vec<&str> = line.split('\t').collect();
            if c.len() != header.len() {
                return Err(format!("row `{line}` has {} columns", c.len()));
            }
            let dim = c[1].parse().map_err(|_| format!("bad dim `{}`", c[1]))?;
            let values = c[2..]
                .iter()
                .map(|v| match *v {
                    "-" => Ok(None),
                    v => v.parse().map(Some).map_err(|_| format!("bad value `{v}`")),
                })
                .collect::<std::result::Result<Vec<_>, String>>()?;
            rows.insert((c[0].to_string(), dim), values);
        }
        Ok(Comparison { algorithms, rows })
    }
}
