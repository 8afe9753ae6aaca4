//! Monte Carlo harness checked against independent estimates of the same quantities.

use copula_core::data::{compute_ranks, TiePolicy};
use copula_core::estimators::{regular_grid, CopulaEstimate};
use copula_core::mc::{run_limse, run_measures, Cell, EstimatorSpec, ExperimentConfig, Measure};
use copula_core::reference::ReferenceCopula;

fn config(
    model: ReferenceCopula,
    estimators: Vec<EstimatorSpec>,
    n: usize,
    reps: usize,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        model,
        estimators,
        n_values: vec![n],
        replications: reps,
        master_seed: seed,
        lre_cells: None,
        eval_points: 1,
    }
}

fn combined(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

#[test]
fn ivar_matches_grid_variance_of_independent_fits() {
    let (n, reps) = (50, 5000);
    let model = ReferenceCopula::independence();
    let rep = run_measures(&config(model, vec![EstimatorSpec::Empirical], n, reps, 11)).unwrap();
    let ivar = rep.summary(n, EstimatorSpec::Empirical, Measure::Ivar).unwrap();

    // Independent fits, grouped in batches so the oracle carries its own standard error.
    let axis = regular_grid(21);
    let axes = vec![axis.clone(), axis];
    let weight = |i: usize| if i == 0 || i == 20 { 0.5 } else { 1.0 };
    let (batches, per_batch) = (20usize, 2 * reps / 20);
    let mut batch_values = Vec::with_capacity(batches);
    for b in 0..batches {
        let mut sum = vec![0.0f64; 441];
        let mut sum_sq = vec![0.0f64; 441];
        for i in 0..per_batch {
            let seed = 1_000_000 + (b * per_batch + i) as u64;
            let ranks = compute_ranks(&model.sample(n, seed), TiePolicy::Error).unwrap();
            let grid = CopulaEstimate::empirical(ranks).eval_grid(&axes).unwrap();
            for (k, v) in grid.iter().enumerate() {
                sum[k] += v;
                sum_sq[k] += v * v;
            }
        }
        // Trapezoidal weights integrate the pointwise variance over the square.
        let m = per_batch as f64;
        let mut integral = 0.0;
        for k in 0..441 {
            let var = (sum_sq[k] - sum[k] * sum[k] / m) / (m - 1.0);
            integral += weight(k / 21) * weight(k % 21) * var;
        }
        batch_values.push(integral / 400.0);
    }
    let mean = batch_values.iter().sum::<f64>() / batches as f64;
    let sd = (batch_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (batches - 1) as f64).sqrt();
    let oracle_se = sd / (batches as f64).sqrt();
    let tol = 3.0 * combined(ivar.stderr, oracle_se);
    assert!(
        (ivar.mean - mean).abs() <= tol,
        "ivar {} vs oracle {mean} (tol {tol})",
        ivar.mean
    );
}

#[test]
fn limse_on_unit_cell_matches_imse() {
    let (n, reps) = (50, 5000);
    let cfg = config(
        ReferenceCopula::gauss(0.5).unwrap(),
        vec![EstimatorSpec::Beta],
        n,
        reps,
        12,
    );
    let imse = run_measures(&cfg)
        .unwrap()
        .summary(n, EstimatorSpec::Beta, Measure::Imse)
        .unwrap();
    let limse = run_limse(&cfg, EstimatorSpec::Beta, &Cell::unit(2)).unwrap()[0].1;
    let tol = 3.0 * combined(imse.stderr, limse.stderr);
    assert!((imse.mean - limse.mean).abs() <= tol, "{imse:?} vs {limse:?}");
}

#[test]
fn beta_beats_empirical_for_gauss() {
    let (n, reps) = (50, 5000);
    let specs = vec![EstimatorSpec::Empirical, EstimatorSpec::Beta];
    let rep = run_measures(&config(ReferenceCopula::gauss(0.5).unwrap(), specs, n, reps, 13)).unwrap();
    let diff = rep
        .paired_difference((n, EstimatorSpec::Beta), (n, EstimatorSpec::Empirical), Measure::Imse)
        .unwrap();
    assert!(diff.significantly_negative(3.0), "{diff:?}");
}

#[test]
fn measures_are_nonnegative_up_to_noise() {
    let specs: Vec<EstimatorSpec> = ["empirical", "checkerboard", "beta", "bernstein:ceil3", "bernstein:jsv"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let cfg = ExperimentConfig {
        n_values: vec![15, 40],
        ..config(ReferenceCopula::gumbel_tau(0.5).unwrap(), specs.clone(), 15, 800, 14)
    };
    let rep = run_measures(&cfg).unwrap();
    for &n in &cfg.n_values {
        for &s in &specs {
            let isb = rep.summary(n, s, Measure::Isb).unwrap();
            assert!(isb.mean >= -3.0 * isb.stderr, "{s} n={n} {isb:?}");
            assert!(rep.summary(n, s, Measure::Ivar).unwrap().mean >= 0.0);
            assert!(rep.summary(n, s, Measure::Imse).unwrap().mean >= 0.0);
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let specs = vec![
        EstimatorSpec::Empirical,
        EstimatorSpec::Checkerboard,
        EstimatorSpec::Beta,
    ];
    let cfg = config(ReferenceCopula::fgm(0.7).unwrap(), specs, 25, 300, 15);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_measures(&cfg).unwrap())
    };
    assert_eq!(run(1), run(4));
}
