//! Evaluation protocol: stratified folds, KNN in the projected space,
//! accuracy / F1, and training-only parameter tuning.

pub mod folds;
pub mod harness;
pub mod knn;
pub mod metrics;

pub use folds::{split_folds, FoldPlan};
pub use harness::{
    default_gamma_grid, default_k, evaluate_default, evaluate_method, fit_method, fit_tuned,
    labels_of, score_split, sweep_dimensions, tune_gamma, tune_mu, tune_parameter, EvalReport,
    Fitted, FoldResult, GridScore, Method, MethodConfig, ParamChoice, SolverSummary, SweepRow,
    TuneOutcome,
};
pub use knn::{knn_predict, knn_predict_multilabel, nearest_neighbors};
pub use metrics::{
    compute_metrics, mean_metrics, multi_label_metrics, single_label_metrics, ClassMetrics,
    Labels, Metrics,
};
