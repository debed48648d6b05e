//! Cooperative coevolution with differential grouping and GSA subcomponent
//! optimizers (CCGSA-DG).
//!
//! The variables are grouped once. Each cycle evaluates the population, takes
//! its best member as the context, and optimizes every group in turn with GSA:
//! candidates for a group are scored by substituting them into the context,
//! and the final swarm positions are written back into the group's columns.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::evaluator::{Evaluator, SearchSpace, Trace};
use crate::grouping::{group_in, GroupingConfig, GroupingReport};
use crate::gsa::{evolve, random_positions, GsaParams, RandomSource, Swarm, SwarmBest};
use crate::objective::{EvalCounter, Objective};
use crate::partition::GroupStructure;

/// How many evaluations one subcomponent GSA invocation may spend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Allowance {
    /// `N * (t_max + 1)`: the initial population plus `t_max` iterations.
    Iterations,
    /// The budget left after grouping, split evenly over every invocation of
    /// every cycle, capped at `N * (t_max + 1)`.
    EvenShare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcConfig {
    pub cycles: usize,
    pub gsa: GsaParams,
    pub fe_budget: u64,
    pub grouping: GroupingConfig,
    pub seed: u64,
    pub allowance: Allowance,
    /// Move the context onto a group's best sub-vector as soon as it improves
    /// the context, instead of waiting for the next cycle.
    pub refresh_best_per_group: bool,
    pub trace_stride: u64,
}

impl Default for CcConfig {
    fn default() -> Self {
        Self {
            cycles: 20,
            gsa: GsaParams::default(),
            fe_budget: 3_000_000,
            grouping: GroupingConfig::default(),
            seed: 0,
            allowance: Allowance::EvenShare,
            refresh_best_per_group: false,
            trace_stride: 1000,
        }
    }
}

impl CcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cycles == 0 {
            return config("cycles must be at least 1");
        }
        if self.fe_budget == 0 {
            return config("fe_budget must be positive");
        }
        self.gsa.validate()?;
        self.grouping.validate()
    }
}

/// `N` copies of the context member with one group's columns free.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextPopulation {
    pub base: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
}

impl ContextPopulation {
    /// Rows are `base` with the `group` columns copied from the matching rows of `pop`.
    pub fn new(base: Vec<f64>, group: &[usize], pop: &[Vec<f64>]) -> Self {
        let matrix = pop
            .iter()
            .map(|row| {
                let mut r = base.clone();
                for &d in group {
                    r[d] = row[d];
                }
                r
            })
            .collect();
        Self { base, matrix }
    }

    /// The free columns of every row.
    pub fn sub_positions(&self, group: &[usize]) -> Vec<Vec<f64>> {
        self.matrix
            .iter()
            .map(|r| group.iter().map(|&d| r[d]).collect())
            .collect()
    }

    /// Whether every row agrees bitwise with `base` outside `group`.
    pub fn is_isolated(&self, group: &[usize]) -> bool {
        let mut free = vec![false; self.base.len()];
        for &d in group {
            free[d] = true;
        }
        self.matrix.iter().all(|row| {
            row.iter()
                .zip(&self.base)
                .zip(&free)
                .all(|((a, b), &f)| f || a.to_bits() == b.to_bits())
        })
    }

    /// `base` with the `group` coordinates replaced by `sub_x`.
    pub fn assemble(&self, group: &[usize], sub_x: &[f64]) -> Result<Vec<f64>> {
        let mut full = self.base.clone();
        substitute(&mut full, group, sub_x)?;
        Ok(full)
    }
}

fn substitute(full: &mut [f64], group: &[usize], sub_x: &[f64]) -> Result<()> {
    if sub_x.len() != group.len() {
        return config(format!(
            "sub-vector has {} coordinates but the group has {}",
            sub_x.len(),
            group.len()
        ));
    }
    for (&d, &v) in group.iter().zip(sub_x) {
        full[d] = v;
    }
    Ok(())
}

/// Fitness of a sub-vector in the context population's base member.
pub fn subcomponent_fitness(
    context: &ContextPopulation,
    group: &[usize],
    sub_x: &[f64],
    obj: &dyn Objective,
    counter: &EvalCounter,
) -> Result<f64> {
    let full = context.assemble(group, sub_x)?;
    counter.increment();
    Ok(obj.eval(&full))
}

/// Replaces the `group` columns of `pop` row by row with `subpop`.
pub fn write_back(pop: &mut [Vec<f64>], group: &[usize], subpop: &[Vec<f64>]) -> Result<()> {
    if group.is_empty() {
        return config("cannot write back an empty group");
    }
    if pop.len() != subpop.len() {
        return config(format!(
            "population has {} rows but the subpopulation has {}",
            pop.len(),
            subpop.len()
        ));
    }
    if let Some(&d) = group.iter().find(|&&d| pop.iter().any(|r| d >= r.len())) {
        return config(format!("column {d} is outside the population"));
    }
    for (row, sub) in pop.iter_mut().zip(subpop) {
        substitute(row, group, sub)?;
    }
    Ok(())
}

/// A group's view of the full problem: only the group's coordinates vary.
struct SubcomponentSpace<'e, 'o> {
    evaluator: &'e mut Evaluator<'o>,
    group: &'e [usize],
    base: &'e [f64],
    lower: Vec<f64>,
    upper: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'e, 'o> SubcomponentSpace<'e, 'o> {
    fn new(evaluator: &'e mut Evaluator<'o>, group: &'e [usize], base: &'e [f64]) -> Self {
        let obj = evaluator.objective();
        let lower = group.iter().map(|&d| obj.lower()[d]).collect();
        let upper = group.iter().map(|&d| obj.upper()[d]).collect();
        Self {
            evaluator,
            group,
            base,
            lower,
            upper,
            scratch: base.to_vec(),
        }
    }
}

impl SearchSpace for SubcomponentSpace<'_, '_> {
    fn lower(&self) -> &[f64] {
        &self.lower
    }

    fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.scratch.copy_from_slice(self.base);
        substitute(&mut self.scratch, self.group, x)?;
        self.evaluator.evaluate(&self.scratch)
    }

    fn remaining(&self) -> u64 {
        self.evaluator.remaining()
    }
}

/// Hooks into the driver loop, mainly for instrumentation.
pub trait CcObserver {
    fn subcomponent_started(&mut self, _cycle: usize, _group: &[usize], _base: &[f64]) {}
    fn subcomponent_finished(&mut self, _cycle: usize, _group: &[usize], _best: &SwarmBest) {}
}

impl CcObserver for () {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub trace: Trace,
    pub groups: GroupStructure,
    pub evaluations_used: u64,
    pub grouping_evaluations: u64,
    pub cycles_completed: usize,
    /// Best sub-vector found by the last optimization of each group, scattered
    /// back to full coordinates. NaN for groups never optimized.
    pub subcomponent_best: Vec<f64>,
}

/// Runs CCGSA-DG with a stream seeded from `cfg.seed`.
pub fn run_ccgsa_dg(obj: &dyn Objective, cfg: &CcConfig) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    run_ccgsa_dg_with(obj, cfg, &mut rng, &mut ())
}

/// Runs CCGSA-DG drawing every random number from `rng`.
///
/// Each cycle evaluates the population and takes its best row as the context.
/// After a group is optimized the final swarm replaces the group's columns,
/// and the best sub-vector found is written into the context row so the next
/// cycle starts from every improvement. One evaluation is held back to score
/// the assembled context row at the end.
pub fn run_ccgsa_dg_with<R, O>(obj: &dyn Objective, cfg: &CcConfig, rng: &mut R, observer: &mut O) -> Result<RunResult>
where
    R: RandomSource + ?Sized,
    O: CcObserver + ?Sized,
{
    cfg.validate()?;
    let n = cfg.gsa.pop_size;
    let n64 = n as u64;
    let dim = obj.dim();

    let mut evaluator = Evaluator::new(obj, cfg.fe_budget, cfg.trace_stride);
    let GroupingReport {
        structure: groups,
        evaluations_used: grouping_evaluations,
        ..
    } = group_in(&mut evaluator, &cfg.grouping)?;

    let full_allowance = n64 * (cfg.gsa.max_iter as u64 + 1);
    let allowance = match cfg.allowance {
        Allowance::Iterations => full_allowance,
        Allowance::EvenShare => {
            let per_cycle = evaluator.remaining().saturating_sub(1) / cfg.cycles as u64;
            let share = per_cycle.saturating_sub(n64) / groups.len() as u64;
            share.min(full_allowance)
        }
    };

    let mut pop = random_positions(obj.lower(), obj.upper(), n, rng);
    let mut subcomponent_best = vec![f64::NAN; dim];
    let mut cycles_completed = 0;
    let mut context_row = None;

    'cycles: for cycle in 0..cfg.cycles {
        if evaluator.remaining() < n64 {
            break;
        }
        let fitnesses = pop
            .iter()
            .map(|row| evaluator.evaluate(row))
            .collect::<Result<Vec<f64>>>()?;
        let best_row = crate::gsa::kbest_members(&fitnesses, 1)[0];
        context_row = Some(best_row);
        let mut base = pop[best_row].clone();
        let mut base_fitness = fitnesses[best_row];

        for group in groups.groups() {
            // One evaluation stays reserved for the assembled context row.
            let grant = allowance.min(evaluator.remaining().saturating_sub(1));
            if grant < n64 {
                break 'cycles;
            }
            let iterations = (grant / n64 - 1) as usize;

            let context = ContextPopulation::new(base.clone(), group, &pop);
            debug_assert!(context.is_isolated(group));
            observer.subcomponent_started(cycle, group, &context.base);

            let params = GsaParams {
                max_iter: iterations,
                ..cfg.gsa.clone()
            };
            let mut space = SubcomponentSpace::new(&mut evaluator, group, &context.base);
            let mut swarm = Swarm::from_positions(&mut space, context.sub_positions(group))?;
            let best = evolve(&mut swarm, &mut space, &params, rng)?;

            write_back(&mut pop, group, &swarm.positions)?;
            substitute(&mut pop[best_row], group, &best.position)?;
            for (&d, &v) in group.iter().zip(&best.position) {
                subcomponent_best[d] = v;
            }
            if cfg.refresh_best_per_group && best.fitness < base_fitness {
                substitute(&mut base, group, &best.position)?;
                base_fitness = best.fitness;
            }
            observer.subcomponent_finished(cycle, group, &best);
        }
        cycles_completed += 1;
    }
    if let Some(row) = context_row {
        if evaluator.remaining() > 0 {
            evaluator.evaluate(&pop[row])?;
        }
    }

    let (best_position, best_fitness, evaluations_used, trace) = evaluator.finish();
    Ok(RunResult {
        best_position,
        best_fitness,
        trace,
        groups,
        evaluations_used,
        grouping_evaluations,
        cycles_completed,
        subcomponent_best,
    })
}
