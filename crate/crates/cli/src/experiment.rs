//! Seeded multi-run execution.

use std::fs;
use std::path::Path;
use std::time::Instant;

use ccgsa_core::{run_ccgsa_dg, run_gsa, Objective, Trace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Algorithm, ExperimentConfig, Problem};
use crate::error::{HarnessError, Result};
use crate::record::{format_trace, trace_path, CcDetails, Completed, RunOutcome, RunRecord};
use crate::report::{convergence_table, format_summary, summarize, SummaryRow};

pub const SUMMARY_FILE: &str = "summary.tsv";
pub const CONVERGENCE_FILE: &str = "convergence.tsv";
pub const GROUPS_FILE: &str = "groups.txt";

#[derive(Debug)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub traces: Vec<Trace>,
    pub summary: SummaryRow,
}

/// Runs one seeded optimization without touching the file system.
pub fn execute_run(cfg: &ExperimentConfig, problem: &Problem, fingerprint: &str, seed: u64) -> (RunRecord, Trace) {
    let start = Instant::now();
    let (outcome, trace) = match cfg.algorithm {
        Algorithm::Gsa => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            match run_gsa(&problem.objective, &cfg.gsa_params(), cfg.fe_budget, cfg.trace_stride, &mut rng) {
                Ok(r) => (
                    RunOutcome::Completed(Completed {
                        best_fitness: r.best_fitness,
                        best_position: r.best_position,
                        evaluations_used: r.evaluations,
                        iterations: Some(r.iterations),
                        cc: None,
                    }),
                    r.trace,
                ),
                Err(e) => (RunOutcome::Failed { error: e.to_string() }, Trace::default()),
            }
        }
        Algorithm::CcgsaDg => match run_ccgsa_dg(&problem.objective, &cfg.cc_config(seed)) {
            Ok(r) => {
                let grouping_matches_truth = problem.truth.as_ref().map(|t| t.same_partition(&r.groups));
                (
                    RunOutcome::Completed(Completed {
                        best_fitness: r.best_fitness,
                        best_position: r.best_position,
                        evaluations_used: r.evaluations_used,
                        iterations: None,
                        cc: Some(CcDetails {
                            groups: r.groups,
                            grouping_evaluations: r.grouping_evaluations,
                            cycles_completed: r.cycles_completed,
                            subcomponent_best: r
                                .subcomponent_best
                                .iter()
                                .map(|v| (!v.is_nan()).then_some(*v))
                                .collect(),
                            grouping_matches_truth,
                        }),
                    }),
                    r.trace,
                )
            }
            Err(e) => (RunOutcome::Failed { error: e.to_string() }, Trace::default()),
        },
    };
    let record = RunRecord {
        fingerprint: fingerprint.to_string(),
        seed,
        algorithm: cfg.algorithm,
        function: problem.label.clone(),
        dim: cfg.dim,
        fe_budget: cfg.fe_budget,
        duration_secs: start.elapsed().as_secs_f64(),
        outcome,
    };
    (record, trace)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let probe = dir.join(".write-check");
    write_file(&probe, "")?;
    fs::remove_file(&probe).map_err(|e| HarnessError::io(&probe, e))
}

/// Writes `summary.tsv` and `convergence.tsv` for a finished experiment.
pub fn write_reports(dir: &Path, records: &[RunRecord], traces: &[Trace]) -> Result<SummaryRow> {
    let summary = summarize(records)?;
    write_file(&dir.join(SUMMARY_FILE), &format_summary(std::slice::from_ref(&summary)))?;
    let runs: Vec<(u64, &Trace)> = records
        .iter()
        .zip(traces)
        .filter(|(r, _)| r.completed().is_some())
        .map(|(r, t)| (r.seed, t))
        .collect();
    write_file(&dir.join(CONVERGENCE_FILE), &convergence_table(&runs))?;
    Ok(summary)
}

/// Executes every run of `cfg`, writing per-run traces and records, then the
/// summary, the convergence table and (on request) the found partition.
///
/// A run that fails numerically is recorded as failed; its siblings still run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let problem = cfg.function.build(cfg.dim)?;
    run_experiment_on(cfg, &problem)
}

/// Like [`run_experiment`] but on an already built problem; `cfg.function`
/// is not consulted.
pub fn run_experiment_on(cfg: &ExperimentConfig, problem: &Problem) -> Result<ExperimentOutput> {
    cfg.validate()?;
    if problem.objective.dim() != cfg.dim {
        return Err(HarnessError::Config(format!(
            "problem has {} dimensions but the configuration asks for {}",
            problem.objective.dim(),
            cfg.dim
        )));
    }
    let dir = cfg.out.as_path();
    ensure_writable(dir)?;
    let fingerprint = cfg.fingerprint();
    let seeds: Vec<u64> = cfg.seeds().collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start workers: {e}")))?;
    let results: Vec<Result<(RunRecord, Trace)>> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let (record, trace) = execute_run(cfg, problem, &fingerprint, seed);
                write_file(&trace_path(dir, seed), &format_trace(&trace))?;
                record.write(dir)?;
                Ok((record, trace))
            })
            .collect()
    });
    let (records, traces): (Vec<RunRecord>, Vec<Trace>) =
        results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();

    let summary = write_reports(dir, &records, &traces)?;
    if cfg.emit_groups {
        let groups = records
            .iter()
            .filter_map(|r| r.completed()?.cc.as_ref())
            .map(|d| d.groups.to_string())
            .next();
        if let Some(mut text) = groups {
            if !text.ends_with('\n') {
                text.push('\n');
            }
            write_file(&dir.join(GROUPS_FILE), &text)?;
        }
    }
    Ok(ExperimentOutput {
        records,
        traces,
        summary,
    })
}
