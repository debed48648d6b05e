//! Differential grouping: finite-difference detection of variable interactions.
//!
//! For a pair `(i, j)` the probe compares how much `f` changes when `x_i` is
//! pushed across its range, once with `x_j` at its lower bound and once with
//! `x_j` at the middle of its range. For an additively separable pair the two
//! differences agree exactly (up to rounding).

use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::evaluator::{Evaluator, SearchSpace};
use crate::objective::{EvalCounter, Objective};
use crate::partition::GroupStructure;

/// Size of the perturbation applied to `x_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeDelta {
    /// `upper - lower` of the perturbed dimension.
    Span,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingConfig {
    pub epsilon_dg: f64,
    pub probe_delta: ProbeDelta,
}

impl Default for GroupingConfig {
    fn default() -> Self {
        Self {
            epsilon_dg: 1e-3,
            probe_delta: ProbeDelta::Span,
        }
    }
}

impl GroupingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_dg > 0.0) {
            return config(format!("epsilon_dg must be positive, got {}", self.epsilon_dg));
        }
        if let ProbeDelta::Fixed(d) = self.probe_delta {
            if !(d > 0.0) || !d.is_finite() {
                return config(format!("probe delta must be positive, got {d}"));
            }
        }
        Ok(())
    }

    fn delta(&self, lower: f64, upper: f64) -> f64 {
        match self.probe_delta {
            ProbeDelta::Span => upper - lower,
            ProbeDelta::Fixed(d) => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingReport {
    pub structure: GroupStructure,
    pub evaluations_used: u64,
    pub pairwise_checks: u64,
    /// False when the sweep stopped early; undecided indices are then reported
    /// as singletons.
    pub complete: bool,
}

fn finite(value: f64, index: usize) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NumericInput {
            what: "probe evaluation",
            index,
            value,
        })
    }
}

/// Tests one pair with four evaluations, each counted on `counter`.
pub fn detect_interaction(
    obj: &dyn Objective,
    i: usize,
    j: usize,
    cfg: &GroupingConfig,
    counter: &EvalCounter,
) -> Result<bool> {
    let dim = obj.dim();
    if i == j || i >= dim || j >= dim {
        return config(format!("invalid probe pair ({i}, {j}) for dimension {dim}"));
    }
    cfg.validate()?;
    let (lower, upper) = (obj.lower(), obj.upper());
    let eval = |x: &[f64]| {
        counter.increment();
        obj.eval(x)
    };

    let mut x = lower.to_vec();
    let f_base = finite(eval(&x), i)?;
    x[i] += cfg.delta(lower[i], upper[i]);
    let f_moved = finite(eval(&x), i)?;

    let mut y = lower.to_vec();
    y[j] = 0.5 * (lower[j] + upper[j]);
    let f_mid = finite(eval(&y), j)?;
    y[i] = x[i];
    let f_mid_moved = finite(eval(&y), j)?;

    Ok(((f_moved - f_base) - (f_mid_moved - f_mid)).abs() > cfg.epsilon_dg)
}

/// Probe state with the per-dimension evaluations cached, so each pairwise
/// check after the first few costs one evaluation.
struct Prober<'s, S: ?Sized> {
    space: &'s mut S,
    eps: f64,
    base: Vec<f64>,
    moved: Vec<f64>,
    mid: Vec<f64>,
    f_base: f64,
    f_moved: Vec<Option<f64>>,
    f_mid: Vec<Option<f64>>,
    checks: u64,
}

impl<'s, S: SearchSpace + ?Sized> Prober<'s, S> {
    fn new(space: &'s mut S, cfg: &GroupingConfig) -> Result<Self> {
        let base = space.lower().to_vec();
        let upper = space.upper();
        let moved: Vec<f64> = base
            .iter()
            .zip(upper)
            .map(|(&lo, &hi)| lo + cfg.delta(lo, hi))
            .collect();
        let mid: Vec<f64> = base.iter().zip(upper).map(|(lo, hi)| 0.5 * (lo + hi)).collect();
        let dim = base.len();
        let f_base = finite(space.evaluate(&base)?, 0)?;
        Ok(Self {
            space,
            eps: cfg.epsilon_dg,
            base,
            moved,
            mid,
            f_base,
            f_moved: vec![None; dim],
            f_mid: vec![None; dim],
            checks: 0,
        })
    }

    fn probe(&mut self, changes: &[(usize, f64)]) -> Result<f64> {
        let mut x = self.base.clone();
        for &(d, v) in changes {
            x[d] = v;
        }
        let value = self.space.evaluate(&x)?;
        finite(value, changes[0].0)
    }

    fn interacts(&mut self, i: usize, j: usize) -> Result<bool> {
        let f_moved = match self.f_moved[i] {
            Some(v) => v,
            None => {
                let v = self.probe(&[(i, self.moved[i])])?;
                *self.f_moved[i].insert(v)
            }
        };
        let f_mid = match self.f_mid[j] {
            Some(v) => v,
            None => {
                let v = self.probe(&[(j, self.mid[j])])?;
                *self.f_mid[j].insert(v)
            }
        };
        let f_both = self.probe(&[(i, self.moved[i]), (j, self.mid[j])])?;
        self.checks += 1;
        let delta1 = f_moved - self.f_base;
        let delta2 = f_both - f_mid;
        Ok((delta1 - delta2).abs() > self.eps)
    }
}

/// Runs the grouping sweep against a budgeted search space.
///
/// Each unassigned index seeds a group; every member added to the group is in
/// turn tested against all still-unassigned indices, so the result is the
/// transitive closure of the detected interactions.
pub fn group_in<S: SearchSpace + ?Sized>(space: &mut S, cfg: &GroupingConfig) -> Result<GroupingReport> {
    cfg.validate()?;
    let dim = space.dim();
    if dim == 0 {
        return config("cannot group a zero-dimensional problem");
    }
    let start = space.remaining();

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut unassigned: Vec<usize> = (0..dim).collect();
    let mut current: Vec<usize> = Vec::new();
    let mut checks = 0;

    let outcome = (|| -> Result<()> {
        let mut prober = Prober::new(&mut *space, cfg)?;
        while !unassigned.is_empty() {
            let seed = unassigned.remove(0);
            current.push(seed);
            let mut cursor = 0;
            while cursor < current.len() {
                let member = current[cursor];
                let mut k = 0;
                while k < unassigned.len() {
                    let j = unassigned[k];
                    let hit = prober.interacts(member, j);
                    checks = prober.checks;
                    if hit? {
                        current.push(unassigned.remove(k));
                    } else {
                        k += 1;
                    }
                }
                cursor += 1;
            }
            groups.push(std::mem::take(&mut current));
        }
        Ok(())
    })();

    let used = start - space.remaining();
    match outcome {
        Ok(()) => Ok(GroupingReport {
            structure: GroupStructure::new(dim, groups)?,
            evaluations_used: used,
            pairwise_checks: checks,
            complete: true,
        }),
        Err(Error::BudgetExhausted { .. }) => {
            if !current.is_empty() {
                groups.push(current);
            }
            groups.extend(unassigned.into_iter().map(|i| vec![i]));
            Err(Error::GroupingIncomplete {
                partial: GroupingReport {
                    structure: GroupStructure::new(dim, groups)?,
                    evaluations_used: used,
                    pairwise_checks: checks,
                    complete: false,
                },
            })
        }
        Err(e) => Err(e),
    }
}

/// Groups the variables of `obj` with an unlimited evaluation budget.
pub fn group(obj: &dyn Objective, cfg: &GroupingConfig) -> Result<GroupingReport> {
    let mut space = Evaluator::new(obj, u64::MAX, 0);
    group_in(&mut space, cfg)
}
