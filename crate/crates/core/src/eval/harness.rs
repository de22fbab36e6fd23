//! Cross-validated evaluation of a dimensionality-reduction method followed
//! by KNN classification. Projections and tuned parameters are fitted on
//! training rows only: the fitting entry points receive a training `Dataset`
//! and never see test rows.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::folds::{split_folds, FoldPlan};
use super::knn::{knn_predict, knn_predict_multilabel};
use super::metrics::{compute_metrics, mean_metrics, Labels, Metrics};
use crate::baselines::{
    classical_lda_from_scatter, nlda_from_scatter, trace_ratio_from_scatter,
    unified_lda_from_scatter, TraceRatioReport, UnifiedLdaConfig, UnifiedVariant,
};
use crate::dataset::Dataset;
use crate::error::{Error, ErrorKind, Result};
use crate::mcda::{solve_mcda_with, SolverConfig, SolverReport};
use crate::projection::LinearMap;
use crate::scatter::analyze;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mcda,
    Lda,
    Nlda,
    TraceRatio,
    Rlda,
    Ulda,
    Olda,
    Ocm,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Mcda,
        Method::Lda,
        Method::Nlda,
        Method::TraceRatio,
        Method::Rlda,
        Method::Ulda,
        Method::Olda,
        Method::Ocm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Mcda => "mcda",
            Method::Lda => "lda",
            Method::Nlda => "nlda",
            Method::TraceRatio => "trace-ratio",
            Method::Rlda => "rlda",
            Method::Ulda => "ulda",
            Method::Olda => "olda",
            Method::Ocm => "ocm",
        }
    }

    fn unified_variant(&self) -> Option<UnifiedVariant> {
        match self {
            Method::Rlda => Some(UnifiedVariant::Rlda),
            Method::Ulda => Some(UnifiedVariant::Ulda),
            Method::Olda => Some(UnifiedVariant::Olda),
            Method::Ocm => Some(UnifiedVariant::Ocm),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method '{s}'")))
    }
}

/// Powers of ten from 1e-10 to 1e10.
pub fn default_gamma_grid() -> Vec<f64> {
    (-10..=10).map(|e| 10f64.powi(e)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamChoice {
    Fixed(f64),
    /// Method default: the balancing gamma for MCDA, the scale-aware mu for
    /// RLDA/OLDA.
    Auto,
    /// Inner cross-validation over the grid on training data.
    Tune(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    /// MCDA's gamma.
    pub gamma: ParamChoice,
    /// RLDA/OLDA's mu.
    pub mu: ParamChoice,
    pub solver: SolverConfig,
    pub trace_ratio_tolerance: f64,
    pub trace_ratio_max_iterations: usize,
    pub tune_folds: usize,
    pub tune_seed: u64,
}

impl MethodConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            gamma: ParamChoice::Auto,
            mu: ParamChoice::Auto,
            solver: SolverConfig::default(),
            trace_ratio_tolerance: 1e-12,
            trace_ratio_max_iterations: 200,
            tune_folds: 3,
            tune_seed: 0,
        }
    }

    pub fn with_gamma(mut self, gamma: ParamChoice) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_mu(mut self, mu: ParamChoice) -> Self {
        self.mu = mu;
        self
    }
}

/// A fitted map plus whatever the method reports about the fit.
#[derive(Debug, Clone)]
pub struct Fitted {
    pub map: LinearMap,
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub solver: Option<SolverReport>,
    pub trace_ratio: Option<TraceRatioReport>,
}

/// Fits `config.method` on `train` with fixed parameters. `Tune` choices are
/// not resolved here; see [`fit_tuned`].
pub fn fit_method(train: &Dataset, k: usize, config: &MethodConfig) -> Result<Fitted> {
    let (stats, scatter) = analyze(train);
    let classes = train.class_count();
    let plain = |map: LinearMap| Fitted {
        map,
        gamma: None,
        mu: None,
        solver: None,
        trace_ratio: None,
    };
    match config.method {
        Method::Mcda => {
            let mut solver = config.solver.clone();
            solver.gamma = match &config.gamma {
                ParamChoice::Fixed(g) => Some(*g),
                ParamChoice::Auto => None,
                ParamChoice::Tune(_) => {
                    return Err(Error::InvalidConfig("gamma must be resolved before fitting".into()))
                }
            };
            let (g, report) = solve_mcda_with(&stats, &scatter, k, &solver)?;
            Ok(Fitted {
                map: g.into(),
                gamma: Some(report.gamma),
                mu: None,
                solver: Some(report),
                trace_ratio: None,
            })
        }
        Method::Lda => Ok(plain(classical_lda_from_scatter(&scatter, classes, k)?.into())),
        Method::Nlda => Ok(plain(
            nlda_from_scatter(&scatter, train.n_points(), classes, k)?.into(),
        )),
        Method::TraceRatio => {
            let (g, report) = trace_ratio_from_scatter(
                &scatter,
                k,
                config.trace_ratio_tolerance,
                config.trace_ratio_max_iterations,
            )?;
            Ok(Fitted {
                trace_ratio: Some(report),
                ..plain(g.into())
            })
        }
        Method::Rlda | Method::Ulda | Method::Olda | Method::Ocm => {
            let variant = config.method.unified_variant().expect("unified method");
            let mut unified = UnifiedLdaConfig::new(variant);
            unified.mu = match &config.mu {
                ParamChoice::Fixed(m) => Some(*m),
                ParamChoice::Auto => None,
                ParamChoice::Tune(_) => {
                    return Err(Error::InvalidConfig("mu must be resolved before fitting".into()))
                }
            };
            let mu = matches!(variant, UnifiedVariant::Rlda | UnifiedVariant::Olda)
                .then(|| unified.resolved_mu(&scatter))
                .transpose()?;
            Ok(Fitted {
                mu,
                ..plain(unified_lda_from_scatter(&scatter, k, &unified)?)
            })
        }
    }
}

/// Labels of the given points, in order.
pub fn labels_of(dataset: &Dataset, indices: &[usize]) -> Labels {
    match dataset {
        Dataset::Single(d) => Labels::Single(indices.iter().map(|&i| d.labels()[i]).collect()),
        Dataset::Multi(d) => {
            Labels::Multi(indices.iter().map(|&i| d.indicator()[i].clone()).collect())
        }
    }
}

/// Projects training and test features through `map`, classifies the test
/// columns by KNN against the training columns, and scores them.
pub fn score_split(
    map: &LinearMap,
    train: &Dataset,
    test_features: &DMatrix<f64>,
    test_truth: &Labels,
    knn: usize,
) -> Result<Metrics> {
    let train_proj = map.project(train.features());
    let test_proj = map.project(test_features);
    let predicted = match (train, test_truth) {
        (Dataset::Single(d), Labels::Single(_)) => {
            Labels::Single(knn_predict(&train_proj, d.labels(), &test_proj, knn)?)
        }
        (Dataset::Multi(d), Labels::Multi(_)) => Labels::Multi(knn_predict_multilabel(
            &train_proj,
            d.indicator(),
            &test_proj,
            knn,
        )?),
        _ => return Err(Error::InvalidConfig("label flavors differ".into())),
    };
    compute_metrics(&predicted, test_truth, train.class_count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    pub value: f64,
    /// Mean inner-CV accuracy, or `None` when fitting failed.
    pub score: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub best: f64,
    pub grid: Vec<GridScore>,
}

/// Inner cross-validation over `grid` on `train` alone. `fit` builds a map for
/// one inner-training split and one grid value. Best mean accuracy wins; ties
/// go to the smaller value. Values whose fit fails are skipped.
pub fn tune_parameter<F>(
    train: &Dataset,
    grid: &[f64],
    folds: usize,
    seed: u64,
    knn: usize,
    fit: F,
) -> Result<TuneOutcome>
where
    F: Fn(&Dataset, f64) -> Result<LinearMap>,
{
    if grid.is_empty() {
        return Err(Error::InvalidConfig("tuning grid is empty".into()));
    }
    if grid.len() == 1 {
        return Ok(TuneOutcome {
            best: grid[0],
            grid: vec![GridScore {
                value: grid[0],
                score: None,
                error: None,
            }],
        });
    }
    let plan = split_folds(train, folds, seed)?;
    let mut splits = Vec::with_capacity(folds);
    for f in 0..folds {
        let inner_train = train.subset(&plan.train_indices(f))?;
        let test_idx = plan.test_indices(f);
        let test_features = train.features().select_columns(&test_idx);
        splits.push((inner_train, test_features, labels_of(train, &test_idx)));
    }

    let mut scores = Vec::with_capacity(grid.len());
    for &value in grid {
        let mut total = 0.0;
        let mut failure = None;
        for (inner_train, test_features, truth) in &splits {
            let outcome = fit(inner_train, value)
                .and_then(|map| score_split(&map, inner_train, test_features, truth, knn));
            match outcome {
                Ok(m) => total += m.accuracy,
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        scores.push(match failure {
            None => GridScore {
                value,
                score: Some(total / folds as f64),
                error: None,
            },
            Some(e) => {
                log::debug!("tuning value {value:e} skipped: {e}");
                GridScore {
                    value,
                    score: None,
                    error: Some(e),
                }
            }
        });
    }

    let best = scores
        .iter()
        .filter_map(|s| s.score.map(|sc| (sc, s.value)))
        .fold(None, |best: Option<(f64, f64)>, (sc, v)| match best {
            Some((bs, bv)) if bs > sc || (bs == sc && bv <= v) => Some((bs, bv)),
            _ => Some((sc, v)),
        });
    match best {
        Some((_, value)) => Ok(TuneOutcome {
            best: value,
            grid: scores,
        }),
        None => Err(Error::TuningFailed(
            scores
                .iter()
                .filter_map(|s| s.error.clone())
                .next()
                .unwrap_or_default(),
        )),
    }
}

/// Tunes MCDA's gamma on training data only.
pub fn tune_gamma(
    train: &Dataset,
    k: usize,
    config: &MethodConfig,
    grid: &[f64],
    knn: usize,
) -> Result<TuneOutcome> {
    tune_parameter(train, grid, config.tune_folds, config.tune_seed, knn, |inner, gamma| {
        let cfg = MethodConfig {
            method: Method::Mcda,
            gamma: ParamChoice::Fixed(gamma),
            ..config.clone()
        };
        fit_method(inner, k, &cfg).map(|f| f.map)
    })
}

/// Tunes RLDA/OLDA's mu on training data only.
pub fn tune_mu(
    train: &Dataset,
    k: usize,
    config: &MethodConfig,
    grid: &[f64],
    knn: usize,
) -> Result<TuneOutcome> {
    tune_parameter(train, grid, config.tune_folds, config.tune_seed, knn, |inner, mu| {
        let cfg = config.clone().with_mu(ParamChoice::Fixed(mu));
        fit_method(inner, k, &cfg).map(|f| f.map)
    })
}

/// Resolves any `Tune` choice on `train`, then fits.
pub fn fit_tuned(train: &Dataset, k: usize, config: &MethodConfig, knn: usize) -> Result<Fitted> {
    let mut resolved = config.clone();
    if config.method == Method::Mcda {
        if let ParamChoice::Tune(grid) = &config.gamma {
            resolved.gamma = ParamChoice::Fixed(tune_gamma(train, k, config, grid, knn)?.best);
        }
    }
    if matches!(config.method, Method::Rlda | Method::Olda) {
        if let ParamChoice::Tune(grid) = &config.mu {
            resolved.mu = ParamChoice::Fixed(tune_mu(train, k, config, grid, knn)?.best);
        }
    }
    fit_method(train, k, &resolved)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub iterations: usize,
    pub converged: bool,
    pub objective_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    #[serde(flatten)]
    pub metrics: Metrics,
    pub solver: Option<SolverSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub k: usize,
    pub knn: usize,
    pub fold_count: usize,
    pub seed: u64,
    /// Gamma used on each fold (MCDA only).
    pub gamma: Vec<Option<f64>>,
    /// Set when the method cannot be applied to this data.
    pub infeasible: Option<String>,
    pub folds: Vec<FoldResult>,
    pub mean: Option<Metrics>,
}

impl EvalReport {
    pub fn mean_accuracy(&self) -> Option<f64> {
        self.mean.as_ref().map(|m| m.accuracy)
    }
}

/// Default subspace dimension: `K - 1`.
pub fn default_k(dataset: &Dataset) -> usize {
    dataset.class_count() - 1
}

/// Per fold: fit on the training rows, project both sides, classify the
/// test rows, score. Infeasibility on any fold marks the whole report
/// infeasible instead of failing.
pub fn evaluate_method(
    dataset: &Dataset,
    config: &MethodConfig,
    k: usize,
    plan: &FoldPlan,
    knn: usize,
) -> Result<EvalReport> {
    if plan.assignments.len() != dataset.n_points() {
        return Err(Error::LengthMismatch {
            what: "fold plan vs points",
            left: plan.assignments.len(),
            right: dataset.n_points(),
        });
    }
    let mut report = EvalReport {
        method: config.method.name().to_string(),
        k,
        knn,
        fold_count: plan.fold_count,
        seed: plan.seed,
        gamma: Vec::new(),
        infeasible: None,
        folds: Vec::new(),
        mean: None,
    };
    for fold in 0..plan.fold_count {
        let train = dataset.subset(&plan.train_indices(fold))?;
        let test_idx = plan.test_indices(fold);
        let test_features = dataset.features().select_columns(&test_idx);
        let truth = labels_of(dataset, &test_idx);

        let fitted = match fit_tuned(&train, k, config, knn) {
            Ok(f) => f,
            Err(e) if e.kind() == ErrorKind::Infeasible => {
                report.infeasible = Some(e.to_string());
                report.folds.clear();
                report.gamma.clear();
                return Ok(report);
            }
            Err(e) => return Err(e),
        };
        let metrics = score_split(&fitted.map, &train, &test_features, &truth, knn)?;
        report.gamma.push(fitted.gamma);
        report.folds.push(FoldResult {
            gamma: fitted.gamma,
            mu: fitted.mu,
            metrics,
            solver: fitted.solver.map(|s| SolverSummary {
                iterations: s.iterations,
                converged: s.converged,
                objective_trace: s.objective_trace,
            }),
        });
    }
    let all: Vec<Metrics> = report.folds.iter().map(|f| f.metrics.clone()).collect();
    report.mean = mean_metrics(&all);
    Ok(report)
}

/// Evaluation of a method with its own default fold plan.
pub fn evaluate_default(
    dataset: &Dataset,
    config: &MethodConfig,
    folds: usize,
    seed: u64,
    knn: usize,
) -> Result<EvalReport> {
    let plan = split_folds(dataset, folds, seed)?;
    evaluate_method(dataset, config, default_k(dataset), &plan, knn)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub method: String,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub micro_f1: f64,
}

/// One independent evaluation per `(k, method)`; infeasible combinations
/// (for example classical LDA beyond `K - 1`) produce no row.
pub fn sweep_dimensions(
    dataset: &Dataset,
    configs: &[MethodConfig],
    dims: std::ops::RangeInclusive<usize>,
    plan: &FoldPlan,
    knn: usize,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for k in dims {
        for config in configs {
            let report = evaluate_method(dataset, config, k, plan, knn)?;
            if let Some(mean) = report.mean {
                rows.push(SweepRow {
                    k,
                    method: report.method,
                    accuracy: mean.accuracy,
                    macro_f1: mean.macro_f1,
                    micro_f1: mean.micro_f1,
                });
            }
        }
    }
    Ok(rows)
}
