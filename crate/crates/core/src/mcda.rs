//! Harmonic-mean pairwise discriminant analysis.
//!
//! Minimizes
//!
//! ```text
//! J(G) = gamma * Tr(G^T S_w G) + sum_{a<b} n_a n_b / Tr(G^T B_ab G),   G^T G = I
//! ```
//!
//! with `B_ab = (m_a - m_b)(m_a - m_b)^T`, by backtracking gradient descent
//! and a periodic polar-factor reorthonormalization. The multi-label variant
//! is the same objective over multi-label scatter and label-occurrence counts.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::baselines::{classical_lda_from_scatter, trace_ratio_from_scatter};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{projected_trace, RANK_TOLERANCE};
use crate::projection::{orthonormalize, Projection};
use crate::scatter::{analyze, pairwise_between_view, ClassStats, PairTrace, ScatterSet};

/// Relative floor for pair traces: `epsilon = PAIR_FLOOR_RELATIVE * Tr(S_t)`.
pub const PAIR_FLOOR_RELATIVE: f64 = 1e-12;

/// Objective terms at one `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValue {
    pub value: f64,
    pub within_trace: f64,
    pub harmonic_sum: f64,
    pub min_pair_trace: f64,
    /// Pairs whose projected trace fell below the floor.
    pub degenerate_pairs: Vec<(usize, usize)>,
}

/// Objective and gradient bound to one set of statistics.
#[derive(Debug, Clone, Copy)]
pub struct McdaProblem<'a> {
    stats: &'a ClassStats,
    scatter: &'a ScatterSet,
    gamma: f64,
    floor: f64,
}

pub fn default_pair_floor(scatter: &ScatterSet) -> f64 {
    (PAIR_FLOOR_RELATIVE * scatter.total.trace()).max(f64::MIN_POSITIVE)
}

impl<'a> McdaProblem<'a> {
    pub fn new(stats: &'a ClassStats, scatter: &'a ScatterSet, gamma: f64) -> Self {
        Self {
            stats,
            scatter,
            gamma,
            floor: default_pair_floor(scatter),
        }
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn pair_traces(&self, g: &DMatrix<f64>) -> Vec<PairTrace> {
        pairwise_between_view(self.stats).projected_traces(g)
    }

    pub fn evaluate(&self, g: &DMatrix<f64>) -> ObjectiveValue {
        let within_trace = projected_trace(g, &self.scatter.within);
        let mut harmonic_sum = 0.0;
        let mut min_pair_trace = f64::INFINITY;
        let mut degenerate_pairs = Vec::new();
        for pair in self.pair_traces(g) {
            min_pair_trace = min_pair_trace.min(pair.trace);
            let denom = if pair.trace < self.floor {
                degenerate_pairs.push((pair.first, pair.second));
                self.floor
            } else {
                pair.trace
            };
            harmonic_sum += pair.weight / denom;
        }
        ObjectiveValue {
            value: self.gamma * within_trace + harmonic_sum,
            within_trace,
            harmonic_sum,
            min_pair_trace,
            degenerate_pairs,
        }
    }

    pub fn objective(&self, g: &DMatrix<f64>) -> f64 {
        self.evaluate(g).value
    }

    /// `2 gamma S_w G - sum_{a<b} 2 n_a n_b d (d^T G) / Tr(G^T B_ab G)^2`.
    ///
    /// The pair sum is assembled as `M L (G^T M)^T`, where `M` holds the class
    /// means and `L = sum_ab c_ab (e_a - e_b)(e_a - e_b)^T` carries the pair
    /// coefficients; each pair term is exactly `c_ab d (d^T G)`.
    pub fn gradient(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        let means = self.stats.class_means();
        let k_count = means.ncols();
        let projected = g.transpose() * means;
        let mut laplacian = DMatrix::<f64>::zeros(k_count, k_count);
        for pair in self.pair_traces(g) {
            let t = pair.trace.max(self.floor);
            let c = 2.0 * pair.weight / (t * t);
            let (a, b) = (pair.first, pair.second);
            laplacian[(a, a)] += c;
            laplacian[(b, b)] += c;
            laplacian[(a, b)] -= c;
            laplacian[(b, a)] -= c;
        }
        let mut grad = &self.scatter.within * g * (2.0 * self.gamma);
        grad -= means * (laplacian * projected.transpose());
        grad
    }
}

pub fn mcda_objective(g: &DMatrix<f64>, stats: &ClassStats, scatter: &ScatterSet, gamma: f64) -> f64 {
    McdaProblem::new(stats, scatter, gamma).objective(g)
}

pub fn mcda_gradient(
    g: &DMatrix<f64>,
    stats: &ClassStats,
    scatter: &ScatterSet,
    gamma: f64,
) -> DMatrix<f64> {
    McdaProblem::new(stats, scatter, gamma).gradient(g)
}

/// The balancing weight that makes both objective parts equal at `G = I`:
/// `gamma = (1 / Tr S_w) * sum_{a<b} n_a n_b / Tr B_ab`.
pub fn default_gamma(stats: &ClassStats, scatter: &ScatterSet) -> Result<f64> {
    let total = scatter.total.trace();
    let within = scatter.within.trace();
    if within <= RANK_TOLERANCE * total || within <= 0.0 {
        return Err(Error::WithinScatterDegenerate);
    }
    let floor = default_pair_floor(scatter);
    let mut harmonic = 0.0;
    for pair in pairwise_between_view(stats).full_traces() {
        if pair.trace <= floor {
            return Err(Error::CoincidentClassMeans {
                first: pair.first,
                second: pair.second,
            });
        }
        harmonic += pair.weight / pair.trace;
    }
    Ok(harmonic / within)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitStrategy {
    /// Classical LDA when `k <= K - 1`, trace ratio otherwise.
    #[default]
    Auto,
    ClassicalLda,
    TraceRatio,
    Provided(DMatrix<f64>),
    Random(u64),
}

/// Starting point for the descent, from precomputed scatter.
pub fn initialize_from_scatter(
    scatter: &ScatterSet,
    class_count: usize,
    k: usize,
    strategy: &InitStrategy,
) -> Result<Projection> {
    let p = scatter.total.nrows();
    if k == 0 || k > p {
        return Err(Error::InvalidConfig(format!("k must be in 1..={p}, got {k}")));
    }
    let max_lda = class_count - 1;
    match strategy {
        InitStrategy::Auto => {
            if k <= max_lda {
                match classical_lda_from_scatter(scatter, class_count, k) {
                    Err(Error::SubspaceRankExceeded { .. }) => {}
                    other => return other,
                }
            }
            initialize_from_scatter(scatter, class_count, k, &InitStrategy::TraceRatio)
        }
        InitStrategy::ClassicalLda => {
            if k > max_lda {
                return Err(Error::InitRankExceeded { k, max: max_lda });
            }
            classical_lda_from_scatter(scatter, class_count, k)
        }
        InitStrategy::TraceRatio => Ok(trace_ratio_from_scatter(scatter, k, 1e-12, 200)?.0),
        InitStrategy::Provided(m) => {
            if m.shape() != (p, k) {
                return Err(Error::InvalidConfig(format!(
                    "provided initialization is {}x{}, expected {p}x{k}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            orthonormalize(m)
        }
        InitStrategy::Random(seed) => orthonormalize(&random_gaussian(p, k, *seed)),
    }
}

pub fn initialize_projection(dataset: &Dataset, k: usize, strategy: &InitStrategy) -> Result<Projection> {
    let (_, scatter) = analyze(dataset);
    initialize_from_scatter(&scatter, dataset.class_count(), k, strategy)
}

pub(crate) fn random_gaussian(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSearch {
    pub initial_step: f64,
    pub shrink: f64,
    pub sufficient_decrease: f64,
    pub max_backtracks: usize,
}

impl Default for LineSearch {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// `None` uses [`default_gamma`].
    pub gamma: Option<f64>,
    pub max_iterations: usize,
    pub objective_tolerance: f64,
    pub line_search: LineSearch,
    pub reorthonormalize_every: usize,
    /// `None` uses `1e-12 * Tr(S_t)`.
    pub pair_trace_floor: Option<f64>,
    pub init: InitStrategy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: None,
            max_iterations: 1000,
            objective_tolerance: 1e-6,
            line_search: LineSearch::default(),
            reorthonormalize_every: 5,
            pair_trace_floor: None,
            init: InitStrategy::Auto,
        }
    }
}

impl SolverConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        Self {
            gamma: Some(gamma),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ls = &self.line_search;
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if let Some(g) = self.gamma {
            if !(g > 0.0) || !g.is_finite() {
                return bad("gamma must be positive and finite");
            }
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.objective_tolerance > 0.0) {
            return bad("objective_tolerance must be positive");
        }
        if !(ls.initial_step > 0.0) {
            return bad("initial step must be positive");
        }
        if !(ls.shrink > 0.0 && ls.shrink < 1.0) {
            return bad("shrink factor must lie in (0, 1)");
        }
        if !(ls.sufficient_decrease > 0.0 && ls.sufficient_decrease < 1.0) {
            return bad("sufficient-decrease constant must lie in (0, 1)");
        }
        if self.reorthonormalize_every == 0 {
            return bad("reorthonormalize_every must be positive");
        }
        if let Some(f) = self.pair_trace_floor {
            if !(f > 0.0) {
                return bad("pair_trace_floor must be positive");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub gamma: f64,
    /// Objective at the start point followed by one value per accepted step,
    /// each taken at the polar factor of the iterate.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub final_objective: f64,
    pub final_within_trace: f64,
    pub final_min_pair_distance: f64,
    pub degenerate_pairs: Vec<(usize, usize)>,
}

/// Descent direction: the gradient with its component along `G sym(G^T grad)`
/// removed, so steps do not change `G^T G` to first order. Falls back to the
/// raw gradient when that is not a descent direction.
fn descent_direction(g: &DMatrix<f64>, grad: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let gtg = g.transpose() * grad;
    let sym = (&gtg + gtg.transpose()) * 0.5;
    let dir = grad - g * sym;
    let slope = grad.dot(&dir);
    if slope > 0.0 && slope.is_finite() {
        (dir, slope)
    } else {
        (grad.clone(), grad.norm_squared())
    }
}

/// Runs the descent on precomputed statistics.
pub fn solve_mcda_with(
    stats: &ClassStats,
    scatter: &ScatterSet,
    k: usize,
    config: &SolverConfig,
) -> Result<(Projection, SolverReport)> {
    config.validate()?;
    let gamma = match config.gamma {
        Some(g) => g,
        None => default_gamma(stats, scatter)?,
    };
    let init = initialize_from_scatter(scatter, stats.class_count(), k, &config.init)?;
    let mut problem = McdaProblem::new(stats, scatter, gamma);
    if let Some(floor) = config.pair_trace_floor {
        problem = problem.with_floor(floor);
    }
    descend(&problem, init, config)
}

/// Objective of the orthonormalized candidate, or `None` if it collapses.
fn retracted_value(problem: &McdaProblem<'_>, candidate: &DMatrix<f64>) -> Option<f64> {
    let q = orthonormalize(candidate).ok()?;
    Some(problem.objective(q.matrix())).filter(|v| v.is_finite())
}

/// Every objective value here is taken at the polar factor of the iterate.
/// Off the constraint set the raw objective can be lowered just by inflating
/// `G` (the pair traces grow with its scale), so comparing raw values would
/// reward drift. Snapping the stored iterate to its polar factor therefore
/// never changes the recorded value, which keeps the trace monotone while
/// the stored iterate is only re-orthonormalized every few steps.
fn descend(
    problem: &McdaProblem<'_>,
    init: Projection,
    config: &SolverConfig,
) -> Result<(Projection, SolverReport)> {
    let ls = config.line_search;
    let mut g = init.into_matrix();
    let mut value = problem.objective(&g);
    if !value.is_finite() {
        return Err(Error::NumericalBreakdown { iteration: 0 });
    }
    let mut trace = vec![value];
    let mut on_manifold = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let grad = problem.gradient(&g);
        if grad.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBreakdown { iteration: iterations });
        }
        let (dir, slope) = descent_direction(&g, &grad);
        let dir_norm = dir.norm();

        let mut accepted = None;
        if dir_norm > 0.0 {
            let unit = dir / dir_norm;
            let unit_slope = slope / dir_norm;
            let mut step = ls.initial_step;
            for _ in 0..ls.max_backtracks {
                let candidate = &g - &unit * step;
                if let Some(v) = retracted_value(problem, &candidate) {
                    if v <= value - ls.sufficient_decrease * step * unit_slope {
                        accepted = Some((candidate, v));
                        break;
                    }
                }
                step *= ls.shrink;
            }
        }

        let Some((candidate, next_value)) = accepted else {
            if on_manifold {
                // stationary: no tried step length decreases J, recorded as a
                // zero-length step
                trace.push(value);
                converged = true;
                break;
            }
            g = orthonormalize(&g)?.into_matrix();
            on_manifold = true;
            continue;
        };

        let relative = (value - next_value).abs() / value.abs().max(1e-30);
        let stalled = relative <= config.objective_tolerance;
        if stalled && !on_manifold {
            // a direction computed off the constraint set can be poor for the
            // retracted objective; only trust a stall measured from on it
            g = orthonormalize(&g)?.into_matrix();
            on_manifold = true;
            continue;
        }
        if iterations % config.reorthonormalize_every == 0 {
            g = orthonormalize(&candidate)?.into_matrix();
            on_manifold = true;
        } else {
            g = candidate;
            on_manifold = false;
        }
        value = next_value;
        trace.push(value);
        log::debug!("mcda iteration {iterations}: J = {value:.12e} (rel change {relative:.3e})");
        if stalled {
            converged = true;
            break;
        }
    }

    let projection = orthonormalize(&g)?;
    let eval = problem.evaluate(projection.matrix());
    if !eval.value.is_finite() {
        return Err(Error::NumericalBreakdown { iteration: iterations });
    }
    let report = SolverReport {
        gamma: problem.gamma(),
        objective_trace: trace,
        iterations,
        converged,
        final_objective: eval.value,
        final_within_trace: eval.within_trace,
        final_min_pair_distance: eval.min_pair_trace,
        degenerate_pairs: eval.degenerate_pairs,
    };
    Ok((projection, report))
}

pub fn solve_mcda(dataset: &Dataset, k: usize, config: &SolverConfig) -> Result<(Projection, SolverReport)> {
    let (stats, scatter) = analyze(dataset);
    solve_mcda_with(&stats, &scatter, k, config)
}
