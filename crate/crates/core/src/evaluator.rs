//! Budgeted evaluation with best-so-far tracking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;

/// One point of a convergence trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluations: u64,
    pub best: f64,
}

/// Best-so-far fitness against evaluation count.
///
/// A point is recorded whenever the best-so-far value improves and at every
/// multiple of `stride` evaluations. A stride of zero records improvements only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub points: Vec<TracePoint>,
}

impl Trace {
    fn push(&mut self, evaluations: u64, best: f64) {
        match self.points.last_mut() {
            Some(last) if last.evaluations == evaluations => last.best = best,
            _ => self.points.push(TracePoint { evaluations, best }),
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| {
            w[0].evaluations < w[1].evaluations && !(w[1].best > w[0].best)
        })
    }

    pub fn last(&self) -> Option<TracePoint> {
        self.points.last().copied()
    }
}

/// Something the swarm can be evaluated against.
pub trait SearchSpace {
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    fn evaluate(&mut self, x: &[f64]) -> Result<f64>;
    /// Evaluations still available.
    fn remaining(&self) -> u64;

    fn dim(&self) -> usize {
        self.lower().len()
    }
}

/// Evaluates a full objective under a hard budget and records the trace.
pub struct Evaluator<'a> {
    obj: &'a dyn Objective,
    budget: u64,
    used: u64,
    stride: u64,
    best: f64,
    best_x: Vec<f64>,
    trace: Trace,
}

impl<'a> Evaluator<'a> {
    pub fn new(obj: &'a dyn Objective, budget: u64, stride: u64) -> Self {
        Self {
            obj,
            budget,
            used: 0,
            stride,
            best: f64::INFINITY,
            best_x: Vec::new(),
            trace: Trace::default(),
        }
    }

    pub fn objective(&self) -> &'a dyn Objective {
        self.obj
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn best(&self) -> f64 {
        self.best
    }

    pub fn best_position(&self) -> &[f64] {
        &self.best_x
    }

    /// Closes the trace at the current evaluation count.
    pub fn finish(mut self) -> (Vec<f64>, f64, u64, Trace) {
        if self.used > 0 {
            self.trace.push(self.used, self.best);
        }
        (self.best_x, self.best, self.used, self.trace)
    }
}

impl SearchSpace for Evaluator<'_> {
    fn lower(&self) -> &[f64] {
        self.obj.lower()
    }

    fn upper(&self) -> &[f64] {
        self.obj.upper()
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        if self.used >= self.budget {
            return Err(Error::BudgetExhausted {
                budget: self.budget,
            });
        }
        let value = self.obj.eval(x);
        self.used += 1;
        if value < self.best {
            self.best = value;
            self.best_x.clear();
            self.best_x.extend_from_slice(x);
            self.trace.push(self.used, value);
        } else if self.stride > 0 && self.used.is_multiple_of(self.stride) {
            self.trace.push(self.used, self.best);
        }
        Ok(value)
    }

    fn remaining(&self) -> u64 {
        self.budget - self.used
    }
}
