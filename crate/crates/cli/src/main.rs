use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use ccgsa_harness::experiment::SUMMARY_FILE;
use ccgsa_harness::report::{format_summary, read_summary};
use ccgsa_harness::{
    compare_table, load_runs, run_experiment, write_reports, Algorithm, ExperimentConfig, HarnessError, Overrides,
    ProblemSpec, Result,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ccgsa", version, about = "Run and report GSA / CCGSA-DG experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment described by a configuration file.
    Run(RunArgs),
    /// Recompute summary.tsv and convergence.tsv from an output directory.
    Summarize {
        #[arg(long = "in", value_name = "DIR")]
        input: PathBuf,
    },
    /// Tabulate median final fitness across experiment directories.
    Compare {
        #[arg(long = "in", value_name = "DIR", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        /// Also write the table as tab-separated text.
        #[arg(long, value_name = "FILE")]
        tsv: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    #[arg(long, value_name = "ID", value_parser = parse_problem)]
    function: Option<ProblemSpec>,
    #[arg(long, value_name = "N")]
    dim: Option<usize>,
    #[arg(long, value_name = "K")]
    runs: Option<usize>,
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    #[arg(long, value_name = "N")]
    fe_budget: Option<u64>,
    #[arg(long, value_name = "N")]
    cycles: Option<usize>,
    #[arg(long, value_name = "N")]
    pop: Option<usize>,
    #[arg(long, value_name = "X")]
    epsilon_dg: Option<f64>,
    #[arg(long)]
    emit_groups: bool,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn parse_problem(s: &str) -> std::result::Result<ProblemSpec, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    Overrides {
        algorithm: args.algorithm,
        function: args.function,
        dim: args.dim,
        runs: args.runs,
        seed: args.seed,
        fe_budget: args.fe_budget,
        cycles: args.cycles,
        pop: args.pop,
        epsilon_dg: args.epsilon_dg,
        emit_groups: args.emit_groups,
        out: args.out,
        workers: args.workers,
    }
    .apply(&mut cfg);
    let output = run_experiment(&cfg)?;
    print!("{}", format_summary(std::slice::from_ref(&output.summary)));
    eprintln!("wrote {} runs to {}", output.records.len(), cfg.out.display());
    Ok(())
}

fn summarize(dir: PathBuf) -> Result<()> {
    let (records, traces): (Vec<_>, Vec<_>) = load_runs(&dir)?.into_iter().unzip();
    let summary = write_reports(&dir, &records, &traces)?;
    print!("{}", format_summary(&[summary]));
    Ok(())
}

fn compare(inputs: Vec<PathBuf>, tsv: Option<PathBuf>) -> Result<()> {
    let mut rows = Vec::new();
    for dir in &inputs {
        rows.extend(read_summary(&dir.join(SUMMARY_FILE))?);
    }
    let table = compare_table(&rows);
    print!("{}", table.render());
    if let Some(path) = tsv {
        fs::write(&path, table.to_tsv()).map_err(|e| HarnessError::Io { path, source: e })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Summarize { input } => summarize(input),
        Command::Compare { inputs, tsv } => compare(inputs, tsv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
