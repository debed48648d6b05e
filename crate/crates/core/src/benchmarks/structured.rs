//! Shifted, permuted composite problems with a known interaction structure.
//!
//! Variables are permuted by a random permutation `p`. The first
//! `blocks × group_size` entries of `p` form the nonseparable blocks, the rest
//! form an additively separable tail. Inside a block, variables are coupled
//! either by a Rosenbrock chain or by applying the base function to prefix
//! sums of the shifted block (the Schwefel 1.2 construction).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::classical::{ackley, rastrigin, sphere};
use crate::error::{config, Error, Result};
use crate::objective::ObjectiveFunction;
use crate::partition::GroupStructure;

/// Separability category of a structured problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    FullySeparable,
    /// One nonseparable block plus a separable tail.
    SingleGroup,
    /// Ten equal nonseparable blocks plus a separable tail.
    TenGroup,
    /// Twenty equal nonseparable blocks covering every variable.
    TwentyGroup,
    FullyNonseparable,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::FullySeparable,
        Category::SingleGroup,
        Category::TenGroup,
        Category::TwentyGroup,
        Category::FullyNonseparable,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::FullySeparable => "fully-separable",
            Category::SingleGroup => "single-group",
            Category::TenGroup => "ten-group",
            Category::TwentyGroup => "twenty-group",
            Category::FullyNonseparable => "fully-nonseparable",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.label() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown category `{s}`")))
    }
}

/// Function applied inside the nonseparable blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    Rastrigin,
    Ackley,
    #[serde(rename = "schwefel-1.2")]
    Schwefel12,
    Rosenbrock,
    Sphere,
}

impl BaseKind {
    pub const ALL: [BaseKind; 5] = [
        BaseKind::Rastrigin,
        BaseKind::Ackley,
        BaseKind::Schwefel12,
        BaseKind::Rosenbrock,
        BaseKind::Sphere,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BaseKind::Rastrigin => "rastrigin",
            BaseKind::Ackley => "ackley",
            BaseKind::Schwefel12 => "schwefel-1.2",
            BaseKind::Rosenbrock => "rosenbrock",
            BaseKind::Sphere => "sphere",
        }
    }

    pub fn bounds(self) -> (f64, f64) {
        match self {
            BaseKind::Rastrigin => (-5.0, 5.0),
            BaseKind::Ackley => (-32.0, 32.0),
            BaseKind::Schwefel12 | BaseKind::Rosenbrock | BaseKind::Sphere => (-100.0, 100.0),
        }
    }

    fn separable_tail(self) -> fn(&[f64]) -> f64 {
        match self {
            BaseKind::Rastrigin => rastrigin,
            _ => sphere,
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseKind::ALL
            .into_iter()
            .find(|b| b.label() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown base function `{s}`")))
    }
}

/// A composite problem together with its ground-truth interaction structure.
#[derive(Debug, Clone)]
pub struct StructuredProblem {
    pub objective: ObjectiveFunction,
    pub truth: GroupStructure,
    pub category: Category,
    pub permutation: Vec<usize>,
    pub shift: Vec<f64>,
}

fn rosenbrock_chain(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = w[0] - 1.0;
            100.0 * a * a + b * b
        })
        .sum()
}

struct Composite {
    base: BaseKind,
    blocks: Vec<Vec<usize>>,
    tail: Vec<usize>,
    shift: Vec<f64>,
}

impl Composite {
    fn eval(&self, x: &[f64]) -> f64 {
        let mut buf = Vec::new();
        let mut total = 0.0;
        for block in &self.blocks {
            buf.clear();
            match self.base {
                BaseKind::Rosenbrock => {
                    // Optimum of the chain sits at z = 1, i.e. at x = shift.
                    buf.extend(block.iter().map(|&i| x[i] - self.shift[i] + 1.0));
                    total += rosenbrock_chain(&buf);
                }
                kind => {
                    let mut acc = 0.0;
                    buf.extend(block.iter().map(|&i| {
                        acc += x[i] - self.shift[i];
                        acc
                    }));
                    total += match kind {
                        BaseKind::Rastrigin => rastrigin(&buf),
                        BaseKind::Ackley => ackley(&buf),
                        _ => sphere(&buf),
                    };
                }
            }
        }
        if !self.tail.is_empty() {
            buf.clear();
            buf.extend(self.tail.iter().map(|&i| x[i] - self.shift[i]));
            total += (self.base.separable_tail())(&buf);
        }
        total
    }
}

/// Number of nonseparable blocks and their size for a category.
fn layout(category: Category, dim: usize, group_size: usize) -> Result<(usize, usize)> {
    let blocks = match category {
        Category::FullySeparable => return Ok((0, 1)),
        Category::FullyNonseparable => {
            if dim < 2 {
                return config("a fully nonseparable problem needs at least 2 dimensions");
            }
            return Ok((1, dim));
        }
        Category::SingleGroup => 1,
        Category::TenGroup => 10,
        Category::TwentyGroup => 20,
    };
    if group_size < 2 {
        return config(format!("group size must be at least 2 for {category}, got {group_size}"));
    }
    if blocks * group_size > dim {
        return config(format!(
            "{category} needs {blocks} x {group_size} variables but dimension is {dim}"
        ));
    }
    if category == Category::TwentyGroup && blocks * group_size != dim {
        return config(format!(
            "twenty-group leaves no separable variables: dimension must equal 20 x {group_size}"
        ));
    }
    Ok((blocks, group_size))
}

/// Builds a structured problem. Construction is deterministic in `seed`.
pub fn make_structured(
    category: Category,
    dim: usize,
    group_size: usize,
    base: BaseKind,
    seed: u64,
) -> Result<StructuredProblem> {
    if dim == 0 {
        return config("dimension must be at least 1");
    }
    let (blocks, size) = layout(category, dim, group_size)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut permutation: Vec<usize> = (0..dim).collect();
    permutation.shuffle(&mut rng);

    let (lo, hi) = base.bounds();
    let margin = 0.2 * (hi - lo);
    let shift: Vec<f64> = (0..dim)
        .map(|_| rng.gen_range(lo + margin..hi - margin))
        .collect();

    let block_sets: Vec<Vec<usize>> = permutation[..blocks * size]
        .chunks(size)
        .map(<[usize]>::to_vec)
        .collect();
    let tail = permutation[blocks * size..].to_vec();

    let mut truth_groups = block_sets.clone();
    truth_groups.extend(tail.iter().map(|&i| vec![i]));
    let truth = GroupStructure::new(dim, truth_groups)?;

    let composite = Composite {
        base,
        blocks: block_sets,
        tail,
        shift: shift.clone(),
    };
    let name = format!("{category}/{base}");
    let objective = ObjectiveFunction::uniform(name, dim, lo, hi, move |x| composite.eval(x))?
        .with_f_opt(0.0)
        .with_optimum(shift.clone());

    Ok(StructuredProblem {
        objective,
        truth,
        category,
        permutation,
        shift,
    })
}
