//! Experiment configuration: a flat key/value file plus overrides.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ccgsa_core::benchmarks::{make_classical, make_structured, BaseKind, Category, FunctionId};
use ccgsa_core::{Allowance, CcConfig, GroupStructure, GroupingConfig, GsaParams, ObjectiveFunction};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Gsa,
    CcgsaDg,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Gsa => "gsa",
            Algorithm::CcgsaDg => "ccgsa-dg",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gsa" => Ok(Algorithm::Gsa),
            "ccgsa-dg" | "ccgsa" | "cc" => Ok(Algorithm::CcgsaDg),
            other => Err(HarnessError::Config(format!(
                "unknown algorithm `{other}` (expected gsa or ccgsa-dg)"
            ))),
        }
    }
}

/// Which objective to optimize.
///
/// Written as a classical identifier (`F6`, `rastrigin`, ...) or as
/// `structured:<category>:<base>:<group-size>[:<seed>]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ProblemSpec {
    Classical(FunctionId),
    Structured {
        category: Category,
        base: BaseKind,
        group_size: usize,
        seed: u64,
    },
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::Classical(id) => write!(f, "{id}"),
            ProblemSpec::Structured {
                category,
                base,
                group_size,
                seed,
            } => write!(f, "structured:{category}:{base}:{group_size}:{seed}"),
        }
    }
}

impl FromStr for ProblemSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(rest) = s.strip_prefix("structured:") else {
            return Ok(ProblemSpec::Classical(s.parse()?));
        };
        let parts: Vec<&str> = rest.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(HarnessError::Config(format!(
                "structured problem `{s}` must look like structured:<category>:<base>:<group-size>[:<seed>]"
            )));
        }
        let number = |text: &str, what: &str| {
            text.parse::<u64>()
                .map_err(|_| HarnessError::Config(format!("invalid {what} `{text}` in `{s}`")))
        };
        Ok(ProblemSpec::Structured {
            category: parts[0].parse()?,
            base: parts[1].parse()?,
            group_size: number(parts[2], "group size")? as usize,
            seed: match parts.get(3) {
                Some(p) => number(p, "seed")?,
                None => 0,
            },
        })
    }
}

impl TryFrom<String> for ProblemSpec {
    type Error = HarnessError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ProblemSpec> for String {
    fn from(p: ProblemSpec) -> String {
        p.to_string()
    }
}

/// A built objective with its reporting label and, when known, the true
/// variable partition.
pub struct Problem {
    pub objective: ObjectiveFunction,
    pub label: String,
    pub truth: Option<GroupStructure>,
}

impl ProblemSpec {
    pub fn build(&self, dim: usize) -> Result<Problem> {
        match *self {
            ProblemSpec::Classical(id) => Ok(Problem {
                objective: make_classical(id, dim)?,
                label: id.label().to_string(),
                truth: None,
            }),
            ProblemSpec::Structured {
                category,
                base,
                group_size,
                seed,
            } => {
                let p = make_structured(category, dim, group_size, base, seed)?;
                Ok(Problem {
                    objective: p.objective,
                    label: format!("{category}/{base}"),
                    truth: Some(p.truth),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub function: ProblemSpec,
    pub dim: usize,
    pub runs: usize,
    /// Run `r` uses seed `seed + r`.
    pub seed: u64,
    pub fe_budget: u64,
    pub pop: usize,
    /// GSA iterations. Unset means: fill the budget for plain GSA, 500 per
    /// subcomponent invocation for CCGSA-DG.
    pub max_iter: Option<usize>,
    pub g0: f64,
    pub alpha: f64,
    pub kbest_final: usize,
    pub epsilon_force: f64,
    pub cycles: usize,
    pub epsilon_dg: f64,
    pub allowance: Allowance,
    pub refresh_best_per_group: bool,
    pub trace_stride: u64,
    pub emit_groups: bool,
    pub out: PathBuf,
    /// Concurrent runs; 0 uses every available core.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let cc = CcConfig::default();
        let gsa = GsaParams::default();
        Self {
            algorithm: Algorithm::CcgsaDg,
            function: ProblemSpec::Classical(FunctionId::F1),
            dim: 30,
            runs: 25,
            seed: 0,
            fe_budget: cc.fe_budget,
            pop: gsa.pop_size,
            max_iter: None,
            g0: gsa.g0,
            alpha: gsa.alpha,
            kbest_final: gsa.kbest_final,
            epsilon_force: gsa.epsilon_force,
            cycles: cc.cycles,
            epsilon_dg: cc.grouping.epsilon_dg,
            allowance: cc.allowance,
            refresh_best_per_group: cc.refresh_best_per_group,
            trace_stride: cc.trace_stride,
            emit_groups: false,
            out: PathBuf::from("results"),
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Parse {
                path: path.to_path_buf(),
                message: msg,
            },
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(HarnessError::Config("runs must be at least 1".into()));
        }
        if self.dim == 0 {
            return Err(HarnessError::Config("dim must be at least 1".into()));
        }
        if self.seed.checked_add(self.runs as u64 - 1).is_none() {
            return Err(HarnessError::Config("seed + runs overflows".into()));
        }
        match self.algorithm {
            Algorithm::Gsa if self.emit_groups => {
                return Err(HarnessError::Config("emit_groups requires the ccgsa-dg algorithm".into()));
            }
            Algorithm::Gsa => {
                self.gsa_params().validate()?;
                if self.fe_budget < self.pop as u64 {
                    return Err(HarnessError::Config(format!(
                        "fe_budget {} is smaller than one population of {}",
                        self.fe_budget, self.pop
                    )));
                }
            }
            Algorithm::CcgsaDg => self.cc_config(self.seed).validate()?,
        }
        Ok(())
    }

    pub fn gsa_params(&self) -> GsaParams {
        let max_iter = self.max_iter.unwrap_or(match self.algorithm {
            Algorithm::Gsa => (self.fe_budget / self.pop.max(1) as u64).saturating_sub(1) as usize,
            Algorithm::CcgsaDg => GsaParams::default().max_iter,
        });
        GsaParams {
            pop_size: self.pop,
            max_iter,
            g0: self.g0,
            alpha: self.alpha,
            epsilon_force: self.epsilon_force,
            kbest_final: self.kbest_final,
        }
    }

    pub fn cc_config(&self, seed: u64) -> CcConfig {
        CcConfig {
            cycles: self.cycles,
            gsa: self.gsa_params(),
            fe_budget: self.fe_budget,
            grouping: GroupingConfig {
                epsilon_dg: self.epsilon_dg,
                ..GroupingConfig::default()
            },
            seed,
            allowance: self.allowance,
            refresh_best_per_group: self.refresh_best_per_group,
            trace_stride: self.trace_stride,
        }
    }

    /// Seeds of every run, in run order.
    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.runs as u64).map(move |r| self.seed + r)
    }

    /// Hex digest of every setting that influences results. The output
    /// directory and worker count are excluded.
    pub fn fingerprint(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::new();
        canonical.workers = 0;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Command-line values that replace file settings when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub algorithm: Option<Algorithm>,
    pub function: Option<ProblemSpec>,
    pub dim: Option<usize>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub fe_budget: Option<u64>,
    pub cycles: Option<usize>,
    pub pop: Option<usize>,
    pub epsilon_dg: Option<f64>,
    pub emit_groups: bool,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn apply(self, cfg: &mut ExperimentConfig) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        set!(algorithm, function, dim, runs, seed, fe_budget, cycles, pop, epsilon_dg, out, workers);
        cfg.emit_groups |= self.emit_groups;
    }
}
