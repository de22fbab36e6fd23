//! The comparison family: classical LDA, null-space LDA, iterative trace
//! ratio, and the four-step generalized LDA framework (RLDA / ULDA / OLDA / OCM).
//!
//! Every solver has a `*_from_scatter` form that works on precomputed scatter
//! matrices, and a dataset form that computes them first.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{projected_trace, sym_eigen_desc, SortedEigen, RANK_TOLERANCE};
use crate::projection::{orthonormalize, LinearMap, Projection};
use crate::scatter::{analyze, ScatterSet};

/// Top-`k` eigenvectors of `eig`. If the `k`-th eigenvalue is tied with its
/// neighbours, the tied block is resolved by ascending eigenvalue of
/// `secondary` restricted to that block.
pub fn top_k_tie_broken(eig: &SortedEigen, k: usize, secondary: &DMatrix<f64>) -> DMatrix<f64> {
    let scale = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let tol = RANK_TOLERANCE * scale;
    let pivot = eig.values[k - 1];
    let tied: Vec<usize> = (0..eig.values.len())
        .filter(|&i| (eig.values[i] - pivot).abs() <= tol)
        .collect();
    let start = tied[0];
    let end = tied[tied.len() - 1] + 1;
    if end - start <= 1 || end == k {
        return eig.top(k);
    }
    let block = eig.vectors.columns(start, end - start).into_owned();
    let restricted = block.transpose() * secondary * &block;
    let inner = sym_eigen_desc(&restricted);
    let need = k - start;
    let width = end - start;
    let mut out = DMatrix::zeros(eig.vectors.nrows(), k);
    for j in 0..start {
        out.set_column(j, &eig.vectors.column(j));
    }
    for j in 0..need {
        // ascending order = reverse of the descending decomposition
        let z = inner.vectors.column(width - 1 - j);
        out.set_column(start + j, &(&block * z));
    }
    out
}

fn within_is_zero(scatter: &ScatterSet) -> bool {
    let tw = scatter.within.trace();
    tw <= RANK_TOLERANCE * scatter.total.trace().max(0.0) || tw == 0.0
}

/// Classical LDA from scatter: top-`k` eigenvectors of `S_w^+ S_b`,
/// orthonormalized. `k` may not exceed `class_count - 1`.
pub fn classical_lda_from_scatter(
    scatter: &ScatterSet,
    class_count: usize,
    k: usize,
) -> Result<Projection> {
    let max = class_count.saturating_sub(1).min(scatter.between.nrows());
    if k == 0 || k > max {
        return Err(Error::SubspaceRankExceeded { k, max });
    }
    if within_is_zero(scatter) {
        log::warn!("within-class scatter is numerically zero; using top eigenvectors of S_b");
        let eig = sym_eigen_desc(&scatter.between);
        return orthonormalize(&top_k_tie_broken(&eig, k, &scatter.total));
    }
    // S_w^+ = W W^T with W = V_r diag(lambda_r^{-1/2}); the eigenvectors of
    // S_w^+ S_b are W z for the eigenvectors z of W^T S_b W.
    let within = sym_eigen_desc(&scatter.within);
    let r = within.rank();
    if r < k {
        return Err(Error::SubspaceRankExceeded { k, max: r });
    }
    let mut whiten = within.top(r);
    for (j, mut col) in whiten.column_iter_mut().enumerate() {
        col /= within.values[j].sqrt();
    }
    let reduced = whiten.transpose() * &scatter.between * &whiten;
    let inner = sym_eigen_desc(&reduced);
    orthonormalize(&(&whiten * inner.top(k)))
}

pub fn solve_classical_lda(dataset: &Dataset, k: usize) -> Result<Projection> {
    let (_, scatter) = analyze(dataset);
    classical_lda_from_scatter(&scatter, dataset.class_count(), k)
}

/// Null-space LDA from scatter. `n_points` and `class_count` only feed the
/// diagnostic carried by `NullSpaceAbsent`.
pub fn nlda_from_scatter(
    scatter: &ScatterSet,
    n_points: usize,
    class_count: usize,
    k: usize,
) -> Result<Projection> {
    let p = scatter.within.nrows();
    if k == 0 || k > p {
        return Err(Error::InvalidConfig(format!("k must be in 1..={p}, got {k}")));
    }
    let within = sym_eigen_desc(&scatter.within);
    let null_dim = p - within.rank();
    if null_dim == 0 {
        return Err(Error::NullSpaceAbsent {
            null_dim,
            n: n_points,
            classes: class_count,
            dim: p,
            bound: p as i64 - (n_points as i64 - class_count as i64),
        });
    }
    if null_dim < k {
        return Err(Error::NullSpaceTooSmall { null_dim, k });
    }
    let null_basis = within.vectors.columns(p - null_dim, null_dim).into_owned();
    let restricted = null_basis.transpose() * &scatter.between * &null_basis;
    let inner = sym_eigen_desc(&restricted);
    let g = &null_basis * inner.top(k);
    // N and W are both orthonormal; the polar step only removes rounding.
    orthonormalize(&g)
}

pub fn solve_nlda(dataset: &Dataset, k: usize) -> Result<Projection> {
    let (_, scatter) = analyze(dataset);
    nlda_from_scatter(&scatter, dataset.n_points(), dataset.class_count(), k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRatioReport {
    pub lambda_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl TraceRatioReport {
    pub fn final_ratio(&self) -> f64 {
        self.lambda_trace.last().copied().unwrap_or(0.0)
    }
}

pub fn trace_ratio_value(g: &DMatrix<f64>, scatter: &ScatterSet) -> f64 {
    let num = projected_trace(g, &scatter.between);
    let den = projected_trace(g, &scatter.total);
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Iterative trace ratio: `G <- top_k(S_b - lambda S_t)`, `lambda <- ratio(G)`,
/// starting from `lambda = 0`. A step that would lower `lambda` is refused and
/// ends the iteration at the current fixed point.
pub fn trace_ratio_from_scatter(
    scatter: &ScatterSet,
    k: usize,
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Projection, TraceRatioReport)> {
    let p = scatter.total.nrows();
    if k == 0 || k > p {
        return Err(Error::InvalidConfig(format!("k must be in 1..={p}, got {k}")));
    }
    if scatter.total.trace() <= 0.0 {
        return Err(Error::InvalidDataset("total scatter is zero".into()));
    }
    let step = |lambda: f64| -> Result<(Projection, f64)> {
        let m = &scatter.between - &scatter.total * lambda;
        let eig = sym_eigen_desc(&m);
        let g = orthonormalize(&top_k_tie_broken(&eig, k, &scatter.total))?;
        let ratio = trace_ratio_value(g.matrix(), scatter);
        Ok((g, ratio))
    };

    let (mut g, mut lambda) = step(0.0)?;
    let mut lambda_trace = vec![lambda];
    let mut converged = false;
    let mut iterations = 1;
    while iterations < max_iterations {
        let (next_g, next_lambda) = step(lambda)?;
        iterations += 1;
        if !next_lambda.is_finite() {
            return Err(Error::NumericalBreakdown { iteration: iterations });
        }
        if next_lambda < lambda {
            converged = true;
            break;
        }
        let change = next_lambda - lambda;
        g = next_g;
        lambda = next_lambda;
        lambda_trace.push(lambda);
        if change <= tolerance {
            converged = true;
            break;
        }
    }
    Ok((
        g,
        TraceRatioReport {
            lambda_trace,
            iterations,
            converged,
        },
    ))
}

pub fn solve_trace_ratio(
    dataset: &Dataset,
    k: usize,
    tolerance: f64,
    max_iterations: usize,
) -> Result<(Projection, TraceRatioReport)> {
    let (_, scatter) = analyze(dataset);
    trace_ratio_from_scatter(&scatter, k, tolerance, max_iterations)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnifiedVariant {
    Rlda,
    Ulda,
    Olda,
    Ocm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnifiedLdaConfig {
    pub variant: UnifiedVariant,
    /// Regularizer added to the total-scatter spectrum. `None` selects
    /// `1e-3 * Tr(S_t) / p` for RLDA and OLDA; ignored by ULDA and OCM.
    pub mu: Option<f64>,
}

impl UnifiedLdaConfig {
    pub fn new(variant: UnifiedVariant) -> Self {
        Self { variant, mu: None }
    }

    pub fn with_mu(variant: UnifiedVariant, mu: f64) -> Self {
        Self {
            variant,
            mu: Some(mu),
        }
    }

    pub fn apply_qr(&self) -> bool {
        matches!(self.variant, UnifiedVariant::Olda)
    }

    pub fn resolved_mu(&self, scatter: &ScatterSet) -> Result<f64> {
        match self.variant {
            UnifiedVariant::Rlda | UnifiedVariant::Olda => {
                let mu = self
                    .mu
                    .unwrap_or_else(|| 1e-3 * scatter.total.trace() / scatter.total.nrows() as f64);
                if !(mu > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "mu must be positive for {:?}, got {mu}",
                        self.variant
                    )));
                }
                Ok(mu)
            }
            UnifiedVariant::Ulda | UnifiedVariant::Ocm => Ok(0.0),
        }
    }
}

/// Generalized LDA: eigendecompose `S_t`, apply the variant's transfer
/// function to its spectrum, take the top eigenvectors of `S~_t^+ S_b`, and
/// optionally orthogonalize with QR. Returns the first `k` columns.
pub fn unified_lda_from_scatter(
    scatter: &ScatterSet,
    k: usize,
    config: &UnifiedLdaConfig,
) -> Result<LinearMap> {
    let between = sym_eigen_desc(&scatter.between);
    let q = between.rank();
    if k == 0 || k > q {
        return Err(Error::SubspaceRankExceeded { k, max: q });
    }
    if config.variant == UnifiedVariant::Ocm {
        return Ok(LinearMap::new(between.top(k)));
    }
    let mu = config.resolved_mu(scatter)?;

    let total = sym_eigen_desc(&scatter.total);
    let transferred: Vec<f64> = total.values.iter().map(|&l| l.max(0.0) + mu).collect();
    let largest = transferred.iter().copied().fold(0.0, f64::max);
    let kept: Vec<usize> = (0..transferred.len())
        .filter(|&i| transferred[i] > RANK_TOLERANCE * largest)
        .collect();
    let mut whiten = DMatrix::zeros(scatter.total.nrows(), kept.len());
    for (j, &i) in kept.iter().enumerate() {
        whiten.set_column(j, &(total.vectors.column(i) / transferred[i].sqrt()));
    }
    let reduced = whiten.transpose() * &scatter.between * &whiten;
    let inner = sym_eigen_desc(&reduced);
    let g = &whiten * inner.top(q);

    let g = if config.apply_qr() {
        g.qr().q()
    } else {
        g
    };
    Ok(LinearMap::new(g.columns(0, k).into_owned()))
}

pub fn solve_unified_lda(
    dataset: &Dataset,
    k: usize,
    config: &UnifiedLdaConfig,
) -> Result<LinearMap> {
    let (_, scatter) = analyze(dataset);
    unified_lda_from_scatter(&scatter, k, config)
}
