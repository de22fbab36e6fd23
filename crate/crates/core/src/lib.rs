//! Harmonic-mean pairwise discriminant analysis (MCDA) and the LDA family it
//! is benchmarked against.
//!
//! Data layout: features are `p x n` (one column per point). Class ids are
//! zero-based.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod mcda;
pub mod projection;
pub mod scatter;

pub use dataset::{Dataset, Flavor, LabeledDataset, MultiLabelDataset};
pub use error::{Error, ErrorKind, Result};
pub use mcda::{solve_mcda, InitStrategy, SolverConfig, SolverReport};
pub use projection::{orthonormalize, LinearMap, Projection};
pub use scatter::{
    analyze, compute_class_stats, compute_scatter, projected_separation, ClassStats, ProjectedSeparation,
    ScatterSet,
};
