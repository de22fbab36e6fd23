//! Seeded synthetic datasets. Every generator is a pure function of its
//! arguments; the same seed always yields the same data.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{LabeledDataset, MultiLabelDataset};
use crate::error::{Error, Result};

fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Small-sample toy where class structure lives in a low-dimensional subspace
/// of a larger ambient space, so the within-class scatter has a null space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyGenSpec {
    pub class_count: usize,
    pub points_per_class: usize,
    pub ambient_dim: usize,
    pub intrinsic_dim: usize,
    pub class_center_scale: f64,
    /// Isotropic ambient noise; 0 puts every point exactly on its class center.
    pub noise_scale: f64,
    pub seed: u64,
}

impl Default for ToyGenSpec {
    fn default() -> Self {
        Self {
            class_count: 3,
            points_per_class: 10,
            ambient_dim: 40,
            intrinsic_dim: 3,
            class_center_scale: 1.0,
            noise_scale: 0.1,
            seed: 0,
        }
    }
}

impl ToyGenSpec {
    /// Lower bound on the null-space dimension of `S_w`: `p - (n - K)`.
    pub fn null_space_bound(&self) -> i64 {
        let n = (self.points_per_class * self.class_count) as i64;
        self.ambient_dim as i64 - (n - self.class_count as i64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.class_count < 2 || self.points_per_class == 0 {
            return Err(Error::InvalidConfig(
                "toy needs at least 2 classes with at least one point each".into(),
            ));
        }
        if self.intrinsic_dim == 0 || self.intrinsic_dim > self.ambient_dim {
            return Err(Error::InvalidConfig(format!(
                "intrinsic_dim must be in 1..={}, got {}",
                self.ambient_dim, self.intrinsic_dim
            )));
        }
        if !(self.noise_scale >= 0.0) || !(self.class_center_scale > 0.0) {
            return Err(Error::InvalidConfig(
                "noise_scale must be >= 0 and class_center_scale > 0".into(),
            ));
        }
        if self.noise_scale == 0.0 && self.null_space_bound() <= 0 {
            return Err(Error::InvalidConfig(format!(
                "n - K must be below p for a guaranteed null space: p - (n - K) = {}",
                self.null_space_bound()
            )));
        }
        Ok(())
    }
}

pub fn generate_nullspace_toy(spec: &ToyGenSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let basis = normal_matrix(&mut rng, spec.ambient_dim, spec.intrinsic_dim)
        .qr()
        .q();
    let n = spec.class_count * spec.points_per_class;
    let mut features = DMatrix::zeros(spec.ambient_dim, n);
    let mut labels = Vec::with_capacity(n);
    for class in 0..spec.class_count {
        let coords = normal_matrix(&mut rng, spec.intrinsic_dim, 1) * spec.class_center_scale;
        let center = &basis * coords;
        for _ in 0..spec.points_per_class {
            let col = labels.len();
            let mut x = center.column(0).into_owned();
            if spec.noise_scale > 0.0 {
                x += normal_matrix(&mut rng, spec.ambient_dim, 1).column(0) * spec.noise_scale;
            }
            features.set_column(col, &x);
            labels.push(class);
        }
    }
    LabeledDataset::new(features, labels, spec.class_count)
}

/// Isotropic unit-variance Gaussian classes whose centers are pairwise at
/// least `separation` apart. Points are grouped by class.
pub fn generate_gaussian_mixture(
    class_count: usize,
    points_per_class: usize,
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if class_count < 2 || points_per_class == 0 || dim == 0 {
        return Err(Error::InvalidConfig(
            "mixture needs class_count >= 2, points_per_class >= 1 and dim >= 1".into(),
        ));
    }
    if !(separation >= 0.0) {
        return Err(Error::InvalidConfig("separation must be >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = normal_matrix(&mut rng, dim, class_count);
    let mut min_dist = f64::INFINITY;
    for a in 0..class_count {
        for b in (a + 1)..class_count {
            min_dist = min_dist.min((centers.column(a) - centers.column(b)).norm());
        }
    }
    centers *= if min_dist > 0.0 { separation / min_dist } else { 0.0 };

    let n = class_count * points_per_class;
    let noise = normal_matrix(&mut rng, dim, n);
    let mut features = DMatrix::zeros(dim, n);
    let mut labels = Vec::with_capacity(n);
    for class in 0..class_count {
        for j in 0..points_per_class {
            let col = class * points_per_class + j;
            features.set_column(col, &(centers.column(class) + noise.column(col)));
            labels.push(class);
        }
    }
    LabeledDataset::new(features, labels, class_count)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiLabelSpec {
    pub label_count: usize,
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
    /// Fraction of rows that receive extra labels (rounded up).
    pub multi_fraction: f64,
    pub prototype_scale: f64,
    pub noise_scale: f64,
}

impl MultiLabelSpec {
    pub fn new(label_count: usize, n: usize, dim: usize, seed: u64) -> Self {
        Self {
            label_count,
            n,
            dim,
            seed,
            multi_fraction: 0.4,
            prototype_scale: 3.0,
            noise_scale: 0.5,
        }
    }
}

pub fn generate_multilabel_synthetic(label_count: usize, n: usize, dim: usize, seed: u64) -> Result<MultiLabelDataset> {
    generate_multilabel(&MultiLabelSpec::new(label_count, n, dim, seed))
}

/// Each point is the sum of its labels' prototype vectors plus noise. The
/// first `label_count` rows of a shuffled order cover every label once.
pub fn generate_multilabel(spec: &MultiLabelSpec) -> Result<MultiLabelDataset> {
    let k = spec.label_count;
    if k < 2 || spec.dim == 0 {
        return Err(Error::InvalidConfig("need label_count >= 2 and dim >= 1".into()));
    }
    if spec.n < k {
        return Err(Error::InvalidConfig(format!(
            "n = {} cannot cover {k} labels",
            spec.n
        )));
    }
    if !(0.0..=1.0).contains(&spec.multi_fraction) {
        return Err(Error::InvalidConfig("multi_fraction must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let prototypes = normal_matrix(&mut rng, spec.dim, k) * spec.prototype_scale;

    let mut order: Vec<usize> = (0..spec.n).collect();
    order.shuffle(&mut rng);
    let mut indicator = vec![vec![false; k]; spec.n];
    for (pos, &row) in order.iter().enumerate() {
        let primary = if pos < k { pos } else { rng.random_range(0..k) };
        indicator[row][primary] = true;
    }
    let multi_rows = (spec.multi_fraction * spec.n as f64).ceil() as usize;
    order.shuffle(&mut rng);
    for &row in order.iter().take(multi_rows) {
        let extra = if k > 2 && rng.random_bool(0.3) { 2 } else { 1 };
        let mut free: Vec<usize> = (0..k).filter(|&l| !indicator[row][l]).collect();
        free.shuffle(&mut rng);
        for &l in free.iter().take(extra) {
            indicator[row][l] = true;
        }
    }

    let mut features = DMatrix::zeros(spec.dim, spec.n);
    for (i, labels) in indicator.iter().enumerate() {
        let mut x = DVector::zeros(spec.dim);
        for (l, _) in labels.iter().enumerate().filter(|(_, &b)| b) {
            x += prototypes.column(l);
        }
        x += normal_matrix(&mut rng, spec.dim, 1).column(0) * spec.noise_scale;
        features.set_column(i, &x);
    }
    MultiLabelDataset::new(features, indicator)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_toy_sits_on_centers() {
        let spec = ToyGenSpec {
            noise_scale: 0.0,
            ..ToyGenSpec::default()
        };
        let d = generate_nullspace_toy(&spec).unwrap();
        let x = d.features();
        for j in 1..10 {
            assert_eq!(x.column(0), x.column(j));
        }
        assert_eq!(spec.null_space_bound(), 13);
    }

    #[test]
    fn toy_bound_violation_is_reported() {
        let spec = ToyGenSpec {
            noise_scale: 0.0,
            ambient_dim: 10,
            ..ToyGenSpec::default()
        };
        let err = generate_nullspace_toy(&spec).unwrap_err();
        assert!(err.to_string().contains("p - (n - K) = -17"));
    }

    #[test]
    fn mixture_separation_and_determinism() {
        let a = generate_gaussian_mixture(4, 5, 6, 7.0, 3).unwrap();
        let b = generate_gaussian_mixture(4, 5, 6, 7.0, 3).unwrap();
        assert_eq!(a, b);
        let c = generate_gaussian_mixture(4, 5, 6, 7.0, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn multilabel_has_enough_overlap() {
        let d = generate_multilabel_synthetic(5, 60, 8, 1).unwrap();
        assert!(d.multi_labeled_rows() as f64 >= 0.3 * 60.0);
        for k in 0..5 {
            assert!(d.indicator().iter().any(|r| r[k]));
        }
        assert_eq!(d, generate_multilabel_synthetic(5, 60, 8, 1).unwrap());
    }
}
