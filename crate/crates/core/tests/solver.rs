mod common;

use common::{
    angle_grid, dense_objective, median, naive_single, normal, random_labeled, random_orthonormal, rel,
    rel_fro, rng, subspace_distance,
};
use mcda::dataset::Dataset;
use mcda::generate::generate_gaussian_mixture;
use mcda::mcda::{
    default_gamma, initialize_projection, mcda_gradient, mcda_objective, McdaProblem,
};
use mcda::projection::orthonormality_error;
use mcda::scatter::analyze;
use mcda::{orthonormalize, solve_mcda, Error, InitStrategy, LabeledDataset, SolverConfig};
use nalgebra::DMatrix;
use proptest::prelude::*;

#[test]
fn objective_matches_dense_materialization() {
    let mut r = rng(21);
    let d = random_labeled(&mut r, 40, 10, 4, 2.0);
    let naive = naive_single(d.features(), d.labels(), 4);
    let (stats, scatter) = analyze(&d.into());
    for gamma in [0.0, 0.3, 7.0] {
        let g = random_orthonormal(&mut r, 10, 2);
        let ours = mcda_objective(&g, &stats, &scatter, gamma);
        assert!(rel(ours, dense_objective(&g, &naive, gamma)) <= 1e-10);
    }
}

#[test]
fn two_class_unit_counts_full_space() {
    let x = DMatrix::from_column_slice(3, 2, &[1.0, 2.0, 0.0, -1.0, 0.0, 1.0]);
    let d: Dataset = LabeledDataset::new(x, vec![0, 1], 2).unwrap().into();
    let (stats, scatter) = analyze(&d);
    let value = mcda_objective(&DMatrix::identity(3, 3), &stats, &scatter, 0.0);
    assert!(rel(value, 1.0 / 9.0) <= 1e-15);
}

#[test]
fn two_class_gradient_closed_form() {
    let mut r = rng(22);
    let d = random_labeled(&mut r, 12, 4, 2, 3.0);
    let (stats, scatter) = analyze(&d.into());
    let g = random_orthonormal(&mut r, 4, 2);
    let gamma = 0.7;
    let dvec = stats.class_mean(0) - stats.class_mean(1);
    let b = &dvec * dvec.transpose();
    let t = (g.transpose() * &b * &g).trace();
    let n1n2 = stats.counts()[0] * stats.counts()[1];
    let expected = &scatter.within * &g * (2.0 * gamma) - &b * &g * (2.0 * n1n2 / (t * t));
    assert!(rel_fro(&mcda_gradient(&g, &stats, &scatter, gamma), &expected) <= 1e-12);
}

#[test]
fn rotation_invariance() {
    let mut r = rng(23);
    let d = random_labeled(&mut r, 50, 9, 5, 1.5);
    let (stats, scatter) = analyze(&d.into());
    let g = random_orthonormal(&mut r, 9, 3);
    let rot = random_orthonormal(&mut r, 3, 3);
    let a = mcda_objective(&g, &stats, &scatter, 1.3);
    let b = mcda_objective(&(&g * rot), &stats, &scatter, 1.3);
    assert!(rel(a, b) <= 1e-10);
}

/// Central differences of the objective, entry by entry.
fn finite_difference(problem: &McdaProblem<'_>, g: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| {
        let mut plus = g.clone();
        let mut minus = g.clone();
        plus[(i, j)] += h;
        minus[(i, j)] -= h;
        (problem.objective(&plus) - problem.objective(&minus)) / (2.0 * h)
    })
}

fn max_relative_entry_error(analytic: &DMatrix<f64>, numeric: &DMatrix<f64>) -> f64 {
    analytic
        .iter()
        .zip(numeric.iter())
        .filter(|(a, _)| a.abs() > 1e-8)
        .map(|(a, n)| (a - n).abs() / a.abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gradient_matches_finite_differences(
        seed in any::<u64>(),
        p in 2usize..=20,
        k in 1usize..=3,
        classes in 2usize..=5,
        gamma in 0.01f64..10.0,
    ) {
        let k = k.min(p);
        let mut r = rng(seed);
        let d = random_labeled(&mut r, 8 * classes, p, classes, 2.0);
        let (stats, scatter) = analyze(&d.into());
        let g = random_orthonormal(&mut r, p, k);
        let problem = McdaProblem::new(&stats, &scatter, gamma);
        let err = max_relative_entry_error(&problem.gradient(&g), &finite_difference(&problem, &g, 1e-5));
        prop_assert!(err <= 1e-5, "max relative entry error {err:e}");
    }
}

fn literal_default_gamma(d: &LabeledDataset) -> f64 {
    let s = naive_single(d.features(), d.labels(), d.class_count());
    let mut sum = 0.0;
    for a in 0..d.class_count() {
        for b in (a + 1)..d.class_count() {
            let diff = &s.means[a] - &s.means[b];
            sum += s.counts[a] * s.counts[b] / (&diff * diff.transpose()).trace();
        }
    }
    sum / s.within.trace()
}

#[test]
fn default_gamma_matches_formula_and_balances() {
    let mut r = rng(24);
    let d = random_labeled(&mut r, 45, 6, 3, 2.0);
    let oracle = literal_default_gamma(&d);
    let (stats, scatter) = analyze(&d.into());
    let gamma = default_gamma(&stats, &scatter).unwrap();
    assert!(rel(gamma, oracle) <= 1e-12);

    let eye = DMatrix::identity(6, 6);
    let value = McdaProblem::new(&stats, &scatter, gamma).evaluate(&eye);
    assert!(rel(gamma * value.within_trace, value.harmonic_sum) <= 1e-10);
}

#[test]
fn default_gamma_scales_with_inverse_fourth_power() {
    let mut r = rng(25);
    let d = random_labeled(&mut r, 30, 5, 3, 2.0);
    let c = 3.0;
    let scaled = LabeledDataset::new(d.features() * c, d.labels().to_vec(), 3).unwrap();
    let (s1, sc1) = analyze(&d.into());
    let (s2, sc2) = analyze(&scaled.into());
    let g1 = default_gamma(&s1, &sc1).unwrap();
    let g2 = default_gamma(&s2, &sc2).unwrap();
    assert!(rel(g2, g1 / c.powi(4)) <= 1e-12);
}

#[test]
fn default_gamma_errors() {
    let x = DMatrix::from_column_slice(1, 4, &[0.0, 0.0, 1.0, 1.0]);
    let d: Dataset = LabeledDataset::new(x, vec![0, 0, 1, 1], 2).unwrap().into();
    let (stats, scatter) = analyze(&d);
    assert!(matches!(default_gamma(&stats, &scatter), Err(Error::WithinScatterDegenerate)));

    let x = DMatrix::from_column_slice(1, 4, &[0.0, 2.0, 0.5, 1.5]);
    let d: Dataset = LabeledDataset::new(x, vec![0, 0, 1, 1], 2).unwrap().into();
    let (stats, scatter) = analyze(&d);
    assert!(matches!(
        default_gamma(&stats, &scatter),
        Err(Error::CoincidentClassMeans { first: 0, second: 1 })
    ));
}

#[test]
fn random_init_is_reproducible_and_provided_is_fixed() {
    let mut r = rng(26);
    let d: Dataset = random_labeled(&mut r, 30, 6, 3, 1.0).into();
    let a = initialize_projection(&d, 2, &InitStrategy::Random(5)).unwrap();
    let b = initialize_projection(&d, 2, &InitStrategy::Random(5)).unwrap();
    assert_eq!(a, b);
    let q = random_orthonormal(&mut r, 6, 2);
    let c = initialize_projection(&d, 2, &InitStrategy::Provided(q.clone())).unwrap();
    assert!((c.matrix() - &q).norm() <= 1e-12);
}

#[test]
fn classical_init_beats_median_random_init() {
    let d: Dataset = generate_gaussian_mixture(3, 20, 8, 6.0, 3).unwrap().into();
    let (stats, scatter) = analyze(&d);
    let gamma = default_gamma(&stats, &scatter).unwrap();
    let start = |s: &InitStrategy| {
        let g = initialize_projection(&d, 2, s).unwrap();
        mcda_objective(g.matrix(), &stats, &scatter, gamma)
    };
    let classical = start(&InitStrategy::ClassicalLda);
    let randoms: Vec<f64> = (0..20).map(|s| start(&InitStrategy::Random(s))).collect();
    assert!(classical <= median(randoms));
}

#[test]
fn classical_init_rejects_large_k() {
    let mut r = rng(27);
    let d: Dataset = random_labeled(&mut r, 30, 6, 3, 1.0).into();
    assert!(matches!(
        initialize_projection(&d, 3, &InitStrategy::ClassicalLda),
        Err(Error::InitRankExceeded { k: 3, max: 2 })
    ));
    // auto falls back to trace ratio beyond K - 1
    let g = initialize_projection(&d, 4, &InitStrategy::Auto).unwrap();
    assert_eq!(g.subspace_dim(), 4);
}

#[test]
fn orthonormalize_preserves_column_space() {
    let mut r = rng(28);
    for _ in 0..10 {
        let m = normal(&mut r, 12, 4);
        let q = orthonormalize(&m).unwrap();
        assert!(orthonormality_error(q.matrix()) <= 1e-10);
        assert!(subspace_distance(q.matrix(), &m) <= 1e-8);
    }
    let q = random_orthonormal(&mut r, 7, 3);
    let out = orthonormalize(&(&q * 5.0)).unwrap();
    assert!((out.matrix() - &q).norm() <= 1e-12);
    let mut collapsed = normal(&mut r, 5, 2);
    let col = collapsed.column(0).into_owned();
    collapsed.set_column(1, &(col * 2.0));
    assert!(matches!(orthonormalize(&collapsed), Err(Error::RankCollapse { .. })));
}

fn planar_instance(seed: u64, classes: usize) -> Dataset {
    let mut r = rng(seed);
    let centers = normal(&mut r, 2, classes) * 3.0;
    let per = 15;
    let noise = normal(&mut r, 2, classes * per);
    let labels: Vec<usize> = (0..classes * per).map(|i| i / per).collect();
    let x = DMatrix::from_fn(2, classes * per, |i, j| centers[(i, labels[j])] + noise[(i, j)]);
    LabeledDataset::new(x, labels, classes).unwrap().into()
}

#[test]
fn planar_solution_matches_angle_grid() {
    for classes in [2, 3] {
        for seed in 0..3 {
            let d = planar_instance(100 + seed, classes);
            let (stats, scatter) = analyze(&d);
            let config = SolverConfig::default();
            let (g, report) = solve_mcda(&d, 1, &config).unwrap();
            let problem = McdaProblem::new(&stats, &scatter, report.gamma);
            let best = angle_grid(1800)
                .map(|g| problem.objective(&g))
                .fold(f64::INFINITY, f64::min);
            let ours = problem.objective(g.matrix());
            assert!(ours <= best * (1.0 + 1e-3), "{ours} vs grid {best}");
        }
    }
}

#[test]
fn objective_trace_is_monotone_and_exit_is_orthonormal() {
    let mut r = rng(29);
    for k in [1, 2, 4] {
        let d: Dataset = random_labeled(&mut r, 60, 10, 4, 1.0).into();
        let (g, report) = solve_mcda(&d, k, &SolverConfig::default()).unwrap();
        for w in report.objective_trace.windows(2) {
            assert!(w[1] <= w[0], "{} then {}", w[0], w[1]);
        }
        assert!(orthonormality_error(g.matrix()) <= 1e-8);
        assert_eq!(g.subspace_dim(), k);
        if report.converged {
            let t = &report.objective_trace;
            let last = t[t.len() - 1];
            let prev = t[t.len().saturating_sub(2)];
            assert!((prev - last).abs() / prev.abs() <= 1e-6);
        }
    }
}

#[test]
fn larger_gamma_does_not_increase_within_trace() {
    let d: Dataset = generate_gaussian_mixture(4, 20, 10, 3.0, 8).unwrap().into();
    let mut previous = f64::INFINITY;
    for gamma in [1e-2, 1.0, 1e2] {
        let config = SolverConfig {
            init: InitStrategy::ClassicalLda,
            ..SolverConfig::with_gamma(gamma)
        };
        let (_, report) = solve_mcda(&d, 2, &config).unwrap();
        assert!(report.final_within_trace <= previous * (1.0 + 1e-9));
        previous = report.final_within_trace;
    }
}

#[test]
fn converges_on_gaussian_mixture() {
    for seed in 0..3 {
        let d: Dataset = generate_gaussian_mixture(4, 30, 50, 4.0, seed).unwrap().into();
        let config = SolverConfig {
            max_iterations: 200,
            ..SolverConfig::default()
        };
        let (_, report) = solve_mcda(&d, 3, &config).unwrap();
        assert!(report.converged, "seed {seed}: {} iterations", report.iterations);
    }
}

#[test]
fn solve_is_deterministic() {
    let d: Dataset = generate_gaussian_mixture(3, 10, 6, 2.0, 1).unwrap().into();
    let config = SolverConfig {
        init: InitStrategy::Random(9),
        ..SolverConfig::default()
    };
    let a = solve_mcda(&d, 2, &config).unwrap();
    let b = solve_mcda(&d, 2, &config).unwrap();
    assert_eq!(a, b);
}

#[test]
fn one_hot_solve_matches_single_label() {
    let single = generate_gaussian_mixture(3, 12, 7, 2.5, 4).unwrap();
    let multi = single.to_one_hot();
    let config = SolverConfig::default();
    let (ga, ra) = solve_mcda(&single.into(), 2, &config).unwrap();
    let (gb, rb) = solve_mcda(&multi.into(), 2, &config).unwrap();
    assert!(rel(ra.final_objective, rb.final_objective) <= 1e-8);
    assert!(subspace_distance(ga.matrix(), gb.matrix()) <= 1e-8);
}

#[test]
fn config_validation() {
    let d: Dataset = generate_gaussian_mixture(3, 5, 4, 2.0, 1).unwrap().into();
    for bad in [
        SolverConfig::with_gamma(-1.0),
        SolverConfig {
            max_iterations: 0,
            ..SolverConfig::default()
        },
        SolverConfig {
            reorthonormalize_every: 0,
            ..SolverConfig::default()
        },
    ] {
        assert!(matches!(solve_mcda(&d, 1, &bad), Err(Error::InvalidConfig(_))));
    }
}
