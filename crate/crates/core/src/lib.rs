//! Gravitational Search Algorithm, differential grouping, and their
//! cooperative-coevolution combination (CCGSA-DG) for large-scale continuous
//! black-box minimization.
//!
//! ```
//! use ccgsa_core::{benchmarks::{make_classical, FunctionId}, cc::{run_ccgsa_dg, CcConfig}};
//!
//! let f = make_classical(FunctionId::F6, 5).unwrap();
//! let mut cfg = CcConfig { cycles: 2, fe_budget: 20_000, ..CcConfig::default() };
//! cfg.gsa.max_iter = 20;
//! let result = run_ccgsa_dg(&f, &cfg).unwrap();
//! assert!(result.evaluations_used <= 20_000);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod cc;
pub mod error;
pub mod evaluator;
pub mod grouping;
pub mod gsa;
pub mod objective;
pub mod partition;

pub use cc::{run_ccgsa_dg, Allowance, CcConfig, RunResult};
pub use error::{Error, Result};
pub use evaluator::{Trace, TracePoint};
pub use grouping::{group, GroupingConfig, GroupingReport};
pub use gsa::{run_gsa, GsaParams, GsaResult};
pub use objective::{Objective, ObjectiveFunction};
pub use partition::GroupStructure;
