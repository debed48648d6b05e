use approx::assert_relative_eq;
use ccgsa_core::benchmarks::*;
use ccgsa_core::cc::{subcomponent_fitness, write_back, ContextPopulation};
use ccgsa_core::grouping::detect_interaction;
use ccgsa_core::gsa::{compute_masses, gravitational_constant, kbest_size};
use ccgsa_core::objective::EvalCounter;
use ccgsa_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn classical_values() {
    let f1 = make_classical(FunctionId::F1, 30).unwrap();
    assert_eq!(f1.eval(&[0.0; 30]), 0.0);
    assert_relative_eq!(make_classical(FunctionId::F8, 10).unwrap().f_opt().unwrap(), -4189.829);
    let f6 = make_classical(FunctionId::F6, 5).unwrap();
    assert_eq!(f6.eval(&[0.3, -0.4, 0.1, 0.0, 0.2]), 0.0);
    assert!(make_classical(FunctionId::F10, 2).unwrap().eval(&[0.0, 0.0]).abs() < 1e-15);
}

#[test]
fn schwefel_optimum_in_thirty_dimensions() {
    let f8 = make_classical(FunctionId::F8, 30).unwrap();
    let (x, v) = optimum_info(&f8);
    let x = x.unwrap();
    assert!(x.iter().all(|&c| (c - 420.9687).abs() < 1e-4));
    assert_relative_eq!(v.unwrap(), -12569.487, max_relative = 1e-9);
    assert_relative_eq!(f8.eval(&x), -12569.487, max_relative = 1e-6);
}

#[test]
fn structured_truths() {
    let p = make_structured(Category::FullySeparable, 20, 2, BaseKind::Sphere, 3).unwrap();
    assert!(p.truth.same_partition(&GroupStructure::singletons(20)));

    let p = make_structured(Category::TenGroup, 1000, 50, BaseKind::Rosenbrock, 3).unwrap();
    assert_eq!(p.truth.nonseparable().count(), 10);
    assert!(p.truth.nonseparable().all(|g| g.len() == 50));
    assert_eq!(p.truth.singleton_count(), 500);

    let p = make_structured(Category::FullyNonseparable, 40, 40, BaseKind::Schwefel12, 3).unwrap();
    assert_eq!(p.truth.len(), 1);
    assert_eq!(p.truth.groups()[0].len(), 40);

    let (x, v) = optimum_info(&p.objective);
    let x = x.unwrap();
    assert_eq!(x, p.shift);
    assert_eq!(p.objective.eval(&x), v.unwrap());
}

#[test]
fn mass_examples() {
    let m = compute_masses(&[1.0, 2.0, 3.0]).unwrap();
    assert_relative_eq!(m[0], 2.0 / 3.0, max_relative = 1e-15);
    assert_relative_eq!(m[1], 1.0 / 3.0, max_relative = 1e-15);
    assert_eq!(m[2], 0.0);
    assert_eq!(compute_masses(&[5.0; 4]).unwrap(), vec![0.25; 4]);
    assert_eq!(compute_masses(&[0.0, 10.0]).unwrap(), vec![1.0, 0.0]);
}

#[test]
fn schedule_examples() {
    assert_eq!(gravitational_constant(0, 500, 100.0, 20.0), 100.0);
    assert_relative_eq!(gravitational_constant(500, 500, 100.0, 20.0), 2.061e-7, max_relative = 1e-3);
    assert_relative_eq!(gravitational_constant(250, 500, 100.0, 20.0), 4.54e-3, max_relative = 1e-3);
    assert_eq!(kbest_size(0, 500, 50, 1), 50);
    assert_eq!(kbest_size(500, 500, 50, 1), 1);
    assert_eq!(kbest_size(250, 500, 50, 1), 26);
}

#[test]
fn gsa_budget_of_one_population() {
    let f = make_classical(FunctionId::F9, 4).unwrap();
    let params = GsaParams {
        pop_size: 12,
        ..GsaParams::default()
    };
    let r = run_gsa(&f, &params, 12, 0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert_eq!((r.evaluations, r.iterations), (12, 0));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let initial_best = (0..12)
        .map(|_| {
            let x: Vec<f64> = (0..4).map(|_| -5.12 + rng.gen::<f64>() * 10.24).collect();
            f.eval(&x)
        })
        .fold(f64::INFINITY, f64::min);
    assert_eq!(r.best_fitness, initial_best);
}

#[test]
fn interaction_examples() {
    let cfg = GroupingConfig::default();
    let c = EvalCounter::new();
    let sphere10 = make_classical(FunctionId::F1, 10).unwrap();
    assert!(!detect_interaction(&sphere10, 2, 7, &cfg, &c).unwrap());

    let bilinear = ObjectiveFunction::uniform("xy", 2, -1.0, 1.0, |x| x[0] * x[1]).unwrap();
    assert!(detect_interaction(&bilinear, 0, 1, &cfg, &c).unwrap());

    let rosen = ObjectiveFunction::uniform("rosenbrock", 3, -5.0, 10.0, |x| {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
            .sum()
    })
    .unwrap();
    assert!(!detect_interaction(&rosen, 0, 2, &cfg, &c).unwrap());
    assert!(detect_interaction(&rosen, 0, 1, &cfg, &c).unwrap());
    assert_eq!(c.get(), 16);
}

#[test]
fn grouping_examples() {
    let cfg = GroupingConfig::default();
    let sphere = make_classical(FunctionId::F1, 10).unwrap();
    assert!(group(&sphere, &cfg).unwrap().structure.same_partition(&GroupStructure::singletons(10)));

    let p = make_structured(Category::TenGroup, 100, 5, BaseKind::Schwefel12, 9).unwrap();
    assert!(group(&p.objective, &cfg).unwrap().structure.same_partition(&p.truth));

    let squared_sum = ObjectiveFunction::uniform("sum2", 8, -1.0, 1.0, |x| x.iter().sum::<f64>().powi(2)).unwrap();
    let found = group(&squared_sum, &cfg).unwrap().structure;
    assert_eq!(found.groups(), &[(0..8).collect::<Vec<_>>()]);
}

#[test]
fn substitution_examples() {
    let c = EvalCounter::new();
    let sphere = make_classical(FunctionId::F1, 5).unwrap();
    let ctx = ContextPopulation::new(vec![0.0; 5], &[3], &[vec![0.0; 5]]);
    assert_eq!(subcomponent_fitness(&ctx, &[3], &[2.0], &sphere, &c).unwrap(), 4.0);

    let f9 = make_classical(FunctionId::F9, 6).unwrap();
    let ctx = ContextPopulation::new(vec![0.0; 6], &[1, 4], &[vec![1.0; 6]]);
    assert_eq!(subcomponent_fitness(&ctx, &[1, 4], &[0.0, 0.0], &f9, &c).unwrap(), 0.0);

    let all: Vec<usize> = (0..6).collect();
    let x = [0.5, -1.0, 2.0, 0.1, 3.0, -4.0];
    assert_eq!(subcomponent_fitness(&ctx, &all, &x, &f9, &c).unwrap(), f9.eval(&x));
}

#[test]
fn write_back_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pop: Vec<Vec<f64>> = (0..5).map(|_| (0..4).map(|_| rng.gen::<f64>()).collect()).collect();

    let mut partial = pop.clone();
    let sub: Vec<Vec<f64>> = (0..5).map(|k| vec![k as f64, -(k as f64)]).collect();
    write_back(&mut partial, &[0, 2], &sub).unwrap();
    for (new, old) in partial.iter().zip(&pop) {
        assert_eq!(new[1].to_bits(), old[1].to_bits());
        assert_eq!(new[3].to_bits(), old[3].to_bits());
    }

    let mut full = pop.clone();
    let replacement = vec![vec![9.0; 4]; 5];
    write_back(&mut full, &[0, 1, 2, 3], &replacement).unwrap();
    assert_eq!(full, replacement);

    assert!(write_back(&mut full, &[], &vec![vec![]; 5]).is_err());
    assert!(GroupStructure::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
}

#[test]
fn one_dimension_cc_replays_plain_gsa() {
    let f = make_classical(FunctionId::F9, 1).unwrap();
    let gsa = GsaParams {
        pop_size: 10,
        max_iter: 30,
        ..GsaParams::default()
    };
    let cfg = CcConfig {
        cycles: 1,
        gsa: gsa.clone(),
        fe_budget: 10_000,
        allowance: Allowance::Iterations,
        seed: 4,
        ..CcConfig::default()
    };
    let cc = run_ccgsa_dg(&f, &cfg).unwrap();
    let plain = run_gsa(&f, &gsa, 10 * 31, 0, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert_eq!(cc.subcomponent_best, plain.best_position);
    assert_eq!(cc.best_fitness, plain.best_fitness);
    // Grouping, the population, one GSA run and the context row.
    assert_eq!(cc.evaluations_used, 1 + 10 + 10 * 31 + 1);
}

#[test]
fn cc_defaults_solve_step_function() {
    let f = make_classical(FunctionId::F6, 30).unwrap();
    for seed in 0..3 {
        let r = run_ccgsa_dg(&f, &CcConfig { seed, ..CcConfig::default() }).unwrap();
        assert_eq!(r.best_fitness, 0.0);
    }
}

#[test]
fn cc_defaults_solve_rastrigin() {
    let f = make_classical(FunctionId::F9, 30).unwrap();
    let finals = (0..25)
        .map(|seed| run_ccgsa_dg(&f, &CcConfig { seed, ..CcConfig::default() }).unwrap().best_fitness)
        .collect();
    assert!(median(finals) <= 1e-8);
}
