//! Benchmark problems: the classical scalable suite and structured composites
//! with known separability.

mod classical;
mod structured;

pub use classical::{
    ackley, griewank, make_classical, make_classical_by_name, max_abs, rastrigin, schwefel, sphere,
    step_function, FunctionId, SCHWEFEL_ARGMIN, SCHWEFEL_F_OPT_PER_DIM,
};
pub use structured::{make_structured, BaseKind, Category, StructuredProblem};

use crate::objective::Objective;

/// `(optimal point, optimal value)` for any objective, when known.
pub fn optimum_info<O: Objective + ?Sized>(obj: &O) -> (Option<Vec<f64>>, Option<f64>) {
    (obj.optimum().map(<[f64]>::to_vec), obj.f_opt())
}
