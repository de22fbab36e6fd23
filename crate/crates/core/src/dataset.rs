//! Labelled feature matrices.
//!
//! Features are stored column-per-point: a `p x n` matrix whose column `i` is
//! point `i`. Class ids are zero-based in the Rust API (`0..K`); the CSV
//! format writes them one-based.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    SingleLabel,
    MultiLabel,
}

/// Single-label data: every point belongs to exactly one of `K` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: DMatrix<f64>,
    labels: Vec<usize>,
    class_count: usize,
}

/// Multi-label data: a binary `n x K` indicator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLabelDataset {
    features: DMatrix<f64>,
    indicator: Vec<Vec<bool>>,
    class_count: usize,
}

/// Either flavor; solvers and the harness are written against this.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Single(LabeledDataset),
    Multi(MultiLabelDataset),
}

fn check_features(features: &DMatrix<f64>) -> Result<()> {
    if features.nrows() == 0 {
        return Err(Error::InvalidDataset("feature dimension p must be >= 1".into()));
    }
    if features.ncols() < 2 {
        return Err(Error::InvalidDataset(format!(
            "need at least 2 points, got {}",
            features.ncols()
        )));
    }
    for (point, col) in features.column_iter().enumerate() {
        if let Some(dim) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature { point, dim });
        }
    }
    Ok(())
}

impl LabeledDataset {
    /// `labels[i]` is the class of column `i`, in `0..class_count`.
    pub fn new(features: DMatrix<f64>, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        check_features(&features)?;
        if labels.len() != features.ncols() {
            return Err(Error::LengthMismatch {
                what: "labels vs points",
                left: labels.len(),
                right: features.ncols(),
            });
        }
        if class_count < 2 {
            return Err(Error::InvalidDataset(format!(
                "need at least 2 classes, got {class_count}"
            )));
        }
        let mut seen = vec![false; class_count];
        for (i, &l) in labels.iter().enumerate() {
            if l >= class_count {
                return Err(Error::InvalidDataset(format!(
                    "point {i} has class {l}, outside 0..{class_count}"
                )));
            }
            seen[l] = true;
        }
        if let Some(class) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyClass {
                class: (class + 1).to_string(),
            });
        }
        Ok(Self {
            features,
            labels,
            class_count,
        })
    }

    /// Infers `K` as `max(label) + 1`.
    pub fn from_labels(features: DMatrix<f64>, labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        Self::new(features, labels, k)
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Equivalent multi-label dataset with a one-hot indicator.
    pub fn to_one_hot(&self) -> MultiLabelDataset {
        let indicator = self
            .labels
            .iter()
            .map(|&l| (0..self.class_count).map(|k| k == l).collect())
            .collect();
        MultiLabelDataset {
            features: self.features.clone(),
            indicator,
            class_count: self.class_count,
        }
    }
}

impl MultiLabelDataset {
    pub fn new(features: DMatrix<f64>, indicator: Vec<Vec<bool>>) -> Result<Self> {
        check_features(&features)?;
        if indicator.len() != features.ncols() {
            return Err(Error::LengthMismatch {
                what: "indicator rows vs points",
                left: indicator.len(),
                right: features.ncols(),
            });
        }
        let class_count = indicator.first().map_or(0, Vec::len);
        if class_count < 2 {
            return Err(Error::InvalidDataset(format!(
                "need at least 2 labels, got {class_count}"
            )));
        }
        let mut column_used = vec![false; class_count];
        for (row, labels) in indicator.iter().enumerate() {
            if labels.len() != class_count {
                return Err(Error::LengthMismatch {
                    what: "indicator row width",
                    left: labels.len(),
                    right: class_count,
                });
            }
            if !labels.iter().any(|&b| b) {
                return Err(Error::UnlabeledRow { row });
            }
            for (k, &b) in labels.iter().enumerate() {
                column_used[k] |= b;
            }
        }
        if let Some(k) = column_used.iter().position(|u| !u) {
            return Err(Error::EmptyClass {
                class: format!("label_{}", k + 1),
            });
        }
        Ok(Self {
            features,
            indicator,
            class_count,
        })
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn indicator(&self) -> &[Vec<bool>] {
        &self.indicator
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    /// Number of rows carrying two or more labels. Informational only.
    pub fn multi_labeled_rows(&self) -> usize {
        self.indicator
            .iter()
            .filter(|row| row.iter().filter(|&&b| b).count() >= 2)
            .count()
    }
}

impl Dataset {
    pub fn features(&self) -> &DMatrix<f64> {
        match self {
            Dataset::Single(d) => d.features(),
            Dataset::Multi(d) => d.features(),
        }
    }

    pub fn class_count(&self) -> usize {
        match self {
            Dataset::Single(d) => d.class_count(),
            Dataset::Multi(d) => d.class_count(),
        }
    }

    pub fn n_points(&self) -> usize {
        self.features().ncols()
    }

    pub fn dim(&self) -> usize {
        self.features().nrows()
    }

    pub fn flavor(&self) -> Flavor {
        match self {
            Dataset::Single(_) => Flavor::SingleLabel,
            Dataset::Multi(_) => Flavor::MultiLabel,
        }
    }

    /// Points belonging to class `k`, ascending by index.
    pub fn class_members(&self, k: usize) -> Vec<usize> {
        match self {
            Dataset::Single(d) => (0..d.labels.len()).filter(|&i| d.labels[i] == k).collect(),
            Dataset::Multi(d) => (0..d.indicator.len())
                .filter(|&i| d.indicator[i][k])
                .collect(),
        }
    }

    /// New dataset made of the given points, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let features = self.features().select_columns(indices);
        match self {
            Dataset::Single(d) => {
                let labels = indices.iter().map(|&i| d.labels[i]).collect();
                LabeledDataset::new(features, labels, d.class_count).map(Dataset::Single)
            }
            Dataset::Multi(d) => {
                let indicator = indices.iter().map(|&i| d.indicator[i].clone()).collect();
                MultiLabelDataset::new(features, indicator).map(Dataset::Multi)
            }
        }
    }

    /// Same labels, replaced features. Used to shift/rotate data in tests and
    /// to build projected datasets.
    pub fn with_features(&self, features: DMatrix<f64>) -> Result<Dataset> {
        match self {
            Dataset::Single(d) => {
                LabeledDataset::new(features, d.labels.clone(), d.class_count).map(Dataset::Single)
            }
            Dataset::Multi(d) => {
                MultiLabelDataset::new(features, d.indicator.clone()).map(Dataset::Multi)
            }
        }
    }
}

impl From<LabeledDataset> for Dataset {
    fn from(d: LabeledDataset) -> Self {
        Dataset::Single(d)
    }
}

impl From<MultiLabelDataset> for Dataset {
    fn from(d: MultiLabelDataset) -> Self {
        Dataset::Multi(d)
    }
}
