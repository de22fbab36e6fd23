use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Orthonormality tolerance accepted on a `Projection`.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-8;

/// Singular-value ratio below which `orthonormalize` reports a collapse.
pub const RANK_COLLAPSE_RATIO: f64 = 1e-12;

/// A `p x k` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    matrix: DMatrix<f64>,
}

impl Projection {
    /// Wraps a matrix that is already column-orthonormal.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let k = matrix.ncols();
        if k == 0 || k > matrix.nrows() {
            return Err(Error::InvalidConfig(format!(
                "projection must have 1 <= k <= p, got {}x{}",
                matrix.nrows(),
                k
            )));
        }
        let drift = orthonormality_error(&matrix);
        if drift > ORTHONORMAL_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "columns are not orthonormal (|G^T G - I|_F = {drift:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn subspace_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `G^T X`: one projected column per input column.
    pub fn project(&self, features: &DMatrix<f64>) -> DMatrix<f64> {
        self.matrix.transpose() * features
    }
}

pub fn orthonormality_error(m: &DMatrix<f64>) -> f64 {
    let k = m.ncols();
    (m.transpose() * m - DMatrix::identity(k, k)).norm()
}

/// Nearest column-orthonormal matrix in Frobenius norm: the polar factor
/// `U V^T` of the thin SVD `M = U S V^T`.
pub fn orthonormalize(m: &DMatrix<f64>) -> Result<Projection> {
    let (p, k) = m.shape();
    if k == 0 || k > p {
        return Err(Error::InvalidConfig(format!(
            "cannot orthonormalize a {p}x{k} matrix"
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::RankCollapse { k, ratio: f64::NAN });
    }
    let svd = m.clone().svd(true, true);
    let s = &svd.singular_values;
    let max = s.max();
    let min = s.min();
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if ratio < RANK_COLLAPSE_RATIO {
        return Err(Error::RankCollapse { k, ratio });
    }
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    Ok(Projection { matrix: u * v_t })
}

/// A general linear map `x -> W^T x` without the orthonormality guarantee
/// (uncorrelated and regularized LDA return these).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn project(&self, features: &DMatrix<f64>) -> DMatrix<f64> {
        self.matrix.transpose() * features
    }
}

impl From<Projection> for LinearMap {
    fn from(p: Projection) -> Self {
        LinearMap { matrix: p.matrix }
    }
}
