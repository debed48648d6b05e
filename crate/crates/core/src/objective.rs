//! Objective functions and evaluation wrappers.
//!
//! Every optimizer in this crate minimizes. An objective is a pure map from a
//! `dim`-length slice to a real value over a box given by per-dimension lower
//! and upper bounds.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{config, Result};

/// A box-constrained minimization problem.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn lower(&self) -> &[f64];
    fn upper(&self) -> &[f64];
    fn eval(&self, x: &[f64]) -> f64;

    /// Known optimal value, when the problem has one.
    fn f_opt(&self) -> Option<f64> {
        None
    }

    /// Known optimizer location, when the problem has one.
    fn optimum(&self) -> Option<&[f64]> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn lower(&self) -> &[f64] {
        (**self).lower()
    }
    fn upper(&self) -> &[f64] {
        (**self).upper()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
    fn f_opt(&self) -> Option<f64> {
        (**self).f_opt()
    }
    fn optimum(&self) -> Option<&[f64]> {
        (**self).optimum()
    }
}

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A named objective backed by a closure.
#[derive(Clone)]
pub struct ObjectiveFunction {
    name: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
    f_opt: Option<f64>,
    optimum: Option<Vec<f64>>,
    eval: Arc<EvalFn>,
}

impl ObjectiveFunction {
    /// Builds an objective over the box `[lower, upper]`.
    pub fn new<F>(name: impl Into<String>, lower: Vec<f64>, upper: Vec<f64>, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if lower.is_empty() {
            return config("objective dimension must be at least 1");
        }
        if lower.len() != upper.len() {
            return config(format!(
                "bound lengths differ: {} lower vs {} upper",
                lower.len(),
                upper.len()
            ));
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return config(format!(
                "lower bound {} is not below upper bound {} in dimension {i}",
                lower[i], upper[i]
            ));
        }
        Ok(Self {
            name: name.into(),
            lower,
            upper,
            f_opt: None,
            optimum: None,
            eval: Arc::new(eval),
        })
    }

    /// Same bounds `[lo, hi]` in every one of `dim` dimensions.
    pub fn uniform<F>(name: impl Into<String>, dim: usize, lo: f64, hi: f64, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, vec![lo; dim], vec![hi; dim], eval)
    }

    pub fn with_f_opt(mut self, f_opt: f64) -> Self {
        self.f_opt = Some(f_opt);
        self
    }

    pub fn with_optimum(mut self, x: Vec<f64>) -> Self {
        debug_assert_eq!(x.len(), self.lower.len());
        self.optimum = Some(x);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `(optimal point, optimal value)` as far as they are known.
    pub fn optimum_info(&self) -> (Option<&[f64]>, Option<f64>) {
        (self.optimum.as_deref(), self.f_opt)
    }
}

impl Objective for ObjectiveFunction {
    fn dim(&self) -> usize {
        self.lower.len()
    }
    fn lower(&self) -> &[f64] {
        &self.lower
    }
    fn upper(&self) -> &[f64] {
        &self.upper
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }
    fn f_opt(&self) -> Option<f64> {
        self.f_opt
    }
    fn optimum(&self) -> Option<&[f64]> {
        self.optimum.as_deref()
    }
}

impl fmt::Debug for ObjectiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveFunction")
            .field("name", &self.name)
            .field("dim", &self.lower.len())
            .field("f_opt", &self.f_opt)
            .finish_non_exhaustive()
    }
}

/// Thread-safe evaluation counter.
#[derive(Debug, Default)]
pub struct EvalCounter(AtomicU64);

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn increment(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// Wraps an objective and counts every call to `eval`.
pub struct CountingObjective<O> {
    inner: O,
    counter: EvalCounter,
}

impl<O: Objective> CountingObjective<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            counter: EvalCounter::new(),
        }
    }

    pub fn count(&self) -> u64 {
        self.counter.get()
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: Objective> Objective for CountingObjective<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn lower(&self) -> &[f64] {
        self.inner.lower()
    }
    fn upper(&self) -> &[f64] {
        self.inner.upper()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.counter.increment();
        self.inner.eval(x)
    }
    fn f_opt(&self) -> Option<f64> {
        self.inner.f_opt()
    }
    fn optimum(&self) -> Option<&[f64]> {
        self.inner.optimum()
    }
}
