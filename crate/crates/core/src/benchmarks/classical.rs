//! The classical scalable test functions.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::ObjectiveFunction;

/// Location of the one-dimensional minimum of `-x sin(sqrt|x|)` on `[-500, 500]`.
pub const SCHWEFEL_ARGMIN: f64 = 420.968_746_359_982;

/// Per-dimension optimal value of F8 as tabulated.
pub const SCHWEFEL_F_OPT_PER_DIM: f64 = -418.9829;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionId {
    /// Sphere.
    F1,
    /// Maximum absolute coordinate.
    F4,
    /// Step.
    F6,
    /// Schwefel 2.26.
    F8,
    /// Rastrigin.
    F9,
    /// Ackley.
    F10,
    /// Griewank. Also known as F11 and F13 in published tables.
    Griewank,
}

impl FunctionId {
    pub const ALL: [FunctionId; 7] = [
        FunctionId::F1,
        FunctionId::F4,
        FunctionId::F6,
        FunctionId::F8,
        FunctionId::F9,
        FunctionId::F10,
        FunctionId::Griewank,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FunctionId::F1 => "F1",
            FunctionId::F4 => "F4",
            FunctionId::F6 => "F6",
            FunctionId::F8 => "F8",
            FunctionId::F9 => "F9",
            FunctionId::F10 => "F10",
            FunctionId::Griewank => "Griewank",
        }
    }

    pub fn bounds(self) -> (f64, f64) {
        match self {
            FunctionId::F1 | FunctionId::F4 | FunctionId::F6 => (-100.0, 100.0),
            FunctionId::F8 => (-500.0, 500.0),
            FunctionId::F9 => (-5.12, 5.12),
            FunctionId::F10 => (-32.0, 32.0),
            FunctionId::Griewank => (-600.0, 600.0),
        }
    }

    pub fn f_opt(self, dim: usize) -> f64 {
        match self {
            FunctionId::F8 => SCHWEFEL_F_OPT_PER_DIM * dim as f64,
            _ => 0.0,
        }
    }

    /// The coordinate shared by every component of the optimizer.
    pub fn argmin_coordinate(self) -> f64 {
        match self {
            FunctionId::F8 => SCHWEFEL_ARGMIN,
            _ => 0.0,
        }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s.trim().to_ascii_lowercase().as_str() {
            "f1" | "sphere" => FunctionId::F1,
            "f4" => FunctionId::F4,
            "f6" | "step" => FunctionId::F6,
            "f8" | "schwefel" => FunctionId::F8,
            "f9" | "rastrigin" => FunctionId::F9,
            "f10" | "ackley" => FunctionId::F10,
            "griewank" | "f11" | "f13" => FunctionId::Griewank,
            other => return Err(Error::Config(format!("unknown function identifier `{other}`"))),
        };
        Ok(id)
    }
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn step_function(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| {
            let r = (v + 0.5).floor();
            r * r
        })
        .sum()
}

pub fn schwefel(x: &[f64]) -> f64 {
    x.iter().map(|v| -v * v.abs().sqrt().sin()).sum()
}

pub fn rastrigin(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
        .sum()
}

pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
}

pub fn griewank(x: &[f64]) -> f64 {
    let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product::<f64>();
    sum - prod + 1.0
}

/// Builds classical function `id` in `dim` dimensions.
pub fn make_classical(id: FunctionId, dim: usize) -> Result<ObjectiveFunction> {
    if dim == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    let (lo, hi) = id.bounds();
    let f: fn(&[f64]) -> f64 = match id {
        FunctionId::F1 => sphere,
        FunctionId::F4 => max_abs,
        FunctionId::F6 => step_function,
        FunctionId::F8 => schwefel,
        FunctionId::F9 => rastrigin,
        FunctionId::F10 => ackley,
        FunctionId::Griewank => griewank,
    };
    Ok(ObjectiveFunction::uniform(id.label(), dim, lo, hi, f)?
        .with_f_opt(id.f_opt(dim))
        .with_optimum(vec![id.argmin_coordinate(); dim]))
}

/// Parses an identifier and builds the function.
pub fn make_classical_by_name(name: &str, dim: usize) -> Result<ObjectiveFunction> {
    make_classical(name.parse()?, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Objective;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Golden-section search for the minimum of a unimodal 1-D function.
    fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-12 {
            let c = b - inv_phi * (b - a);
            let d = a + inv_phi * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn sphere_is_zero_at_origin() {
        let f = make_classical(FunctionId::F1, 30).unwrap();
        assert_eq!(f.eval(&[0.0; 30]), 0.0);
    }

    #[test]
    fn schwefel_f_opt_scales_with_dimension() {
        let f = make_classical(FunctionId::F8, 10).unwrap();
        assert_relative_eq!(f.f_opt().unwrap(), -4189.829, max_relative = 1e-12);
    }

    #[test]
    fn step_plateau_around_origin() {
        let f = make_classical(FunctionId::F6, 5).unwrap();
        assert_eq!(f.eval(&[0.3, -0.4, 0.1, 0.0, 0.2]), 0.0);
        assert_eq!(f.eval(&[0.5, 0.0, 0.0, 0.0, 0.0]), 1.0);
        assert_eq!(f.eval(&[-0.5, 0.0, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn ackley_is_zero_at_origin() {
        let f = make_classical(FunctionId::F10, 2).unwrap();
        // -20 e^0 - e^1 + 20 + e
        let oracle = -20.0 * 1.0 - E + 20.0 + E;
        assert!((f.eval(&[0.0, 0.0]) - oracle).abs() < 1e-15);
        assert!(f.eval(&[0.0, 0.0]).abs() < 1e-15);
    }

    #[test]
    fn schwefel_argmin_matches_numerical_search() {
        // The 1-D term is unimodal on [400, 440].
        let x = golden_section(|v| -v * v.abs().sqrt().sin(), 400.0, 440.0);
        assert!((x - SCHWEFEL_ARGMIN).abs() < 1e-6, "{x}");
    }

    #[test]
    fn optimum_info_for_sphere_and_schwefel() {
        let f1 = make_classical(FunctionId::F1, 4).unwrap();
        let (x, v) = f1.optimum_info();
        assert_eq!(x.unwrap(), &[0.0; 4]);
        assert_eq!(v, Some(0.0));

        let f8 = make_classical(FunctionId::F8, 30).unwrap();
        let (x, v) = f8.optimum_info();
        let x = x.unwrap();
        assert!(x.iter().all(|&c| (c - 420.9687).abs() < 1e-4));
        assert_relative_eq!(v.unwrap(), -12569.487, max_relative = 1e-9);
    }

    #[test]
    fn every_function_attains_f_opt_at_optimum() {
        for id in FunctionId::ALL {
            for dim in [1, 2, 7, 30] {
                let f = make_classical(id, dim).unwrap();
                let (x, v) = f.optimum_info();
                let got = f.eval(x.unwrap());
                let want = v.unwrap();
                if want == 0.0 {
                    assert!(got.abs() <= 1e-9, "{id} dim {dim}: {got}");
                } else {
                    assert_relative_eq!(got, want, max_relative = 1e-6);
                }
            }
        }
    }

    #[test]
    fn identifiers_parse_with_aliases() {
        assert_eq!("f13".parse::<FunctionId>().unwrap(), FunctionId::Griewank);
        assert_eq!("F11".parse::<FunctionId>().unwrap(), FunctionId::Griewank);
        assert_eq!("F9".parse::<FunctionId>().unwrap(), FunctionId::F9);
        assert!(matches!("F2".parse::<FunctionId>(), Err(Error::Config(_))));
        assert!(make_classical_by_name("nope", 3).is_err());
        assert!(make_classical(FunctionId::F1, 0).is_err());
    }

    fn id_strategy() -> impl Strategy<Value = FunctionId> {
        prop::sample::select(FunctionId::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn never_below_f_opt(id in id_strategy(), unit in prop::collection::vec(0.0f64..1.0, 1..12)) {
            let f = make_classical(id, unit.len()).unwrap();
            let (lo, hi) = id.bounds();
            let x: Vec<f64> = unit.iter().map(|u| lo + u * (hi - lo)).collect();
            let v = f.eval(&x);
            prop_assert!(v >= f.f_opt().unwrap() - 1e-9);
            prop_assert_eq!(v.to_bits(), f.eval(&x).to_bits());
        }
    }
}
