//! Dense symmetric eigensolvers, numerical rank and subspace comparison.

use nalgebra::{DMatrix, SymmetricEigen};

/// Eigenvalues below `RANK_TOLERANCE * lambda_max` count as zero, for null
/// spaces and pseudo-inverses alike.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: Vec<f64>,
    /// Column `i` pairs with `values[i]`.
    pub vectors: DMatrix<f64>,
}

impl SortedEigen {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Values at or below this count as numerically zero.
    pub fn zero_cutoff(&self) -> f64 {
        RANK_TOLERANCE * self.largest().max(0.0)
    }

    pub fn rank(&self) -> usize {
        let cut = self.zero_cutoff();
        if self.largest() <= 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&v| v > cut).count()
    }

    pub fn top(&self, k: usize) -> DMatrix<f64> {
        self.vectors.columns(0, k).into_owned()
    }
}

/// Symmetric eigen-decomposition with descending eigenvalues and a fixed sign
/// convention (largest-magnitude entry of each eigenvector positive).
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> SortedEigen {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let n = m.nrows();
    let mut vectors = DMatrix::zeros(n, order.len());
    let mut values = Vec::with_capacity(order.len());
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        let pivot = v.iter().copied().fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            v.neg_mut();
        }
        vectors.set_column(dst, &v);
        values.push(eig.eigenvalues[src]);
    }
    SortedEigen { values, vectors }
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix via its eigenbasis.
pub fn sym_pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = sym_eigen_desc(m);
    let r = eig.rank();
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..r {
        let v = eig.vectors.column(i);
        out += (v * v.transpose()) / eig.values[i];
    }
    out
}

/// Orthonormal basis of the column space (thin QR).
pub fn column_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().qr().q()
}

/// Principal angles (radians, ascending) between the column spaces of `a` and
/// `b`. Computed from sines so that tiny angles keep their precision.
pub fn principal_angles(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    assert_eq!(a.nrows(), b.nrows(), "subspaces live in different spaces");
    let qa = column_basis(a);
    let qb = column_basis(b);
    let residual = &qb - &qa * (qa.transpose() * &qb);
    let mut sines: Vec<f64> = residual
        .svd(false, false)
        .singular_values
        .iter()
        .map(|s| s.min(1.0).asin())
        .collect();
    sines.sort_by(f64::total_cmp);
    sines
}

/// Largest principal angle; 0 for identical subspaces.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    principal_angles(a, b).last().copied().unwrap_or(0.0)
}

pub fn frobenius_relative(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// `Tr(G^T S G)` without forming the `k x k` product.
pub fn projected_trace(g: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
    (s * g).component_mul(g).sum()
}
