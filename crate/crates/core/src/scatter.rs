//! Class statistics and scatter matrices.
//!
//! Both flavors go through one accumulation path: a class is a list of member
//! points (ascending index), and a multi-label point contributes to every class
//! whose indicator bit is set. A one-hot indicator therefore reproduces the
//! single-label statistics exactly.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Flavor};

/// Per-class effective sizes, class means and the label-weighted global mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    counts: Vec<f64>,
    /// `p x K`, column `k` is the mean of class `k`.
    class_means: DMatrix<f64>,
    global_mean: DVector<f64>,
    flavor: Flavor,
}

impl ClassStats {
    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn class_means(&self) -> &DMatrix<f64> {
        &self.class_means
    }

    pub fn class_mean(&self, k: usize) -> DVector<f64> {
        self.class_means.column(k).into_owned()
    }

    pub fn global_mean(&self) -> &DVector<f64> {
        &self.global_mean
    }

    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    pub fn dim(&self) -> usize {
        self.class_means.nrows()
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Sum of the class counts (label occurrences for multi-label data).
    pub fn total_count(&self) -> f64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSet {
    pub between: DMatrix<f64>,
    pub within: DMatrix<f64>,
    pub total: DMatrix<f64>,
    pub flavor: Flavor,
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn memberships(dataset: &Dataset) -> Vec<Vec<usize>> {
    (0..dataset.class_count())
        .map(|k| dataset.class_members(k))
        .collect()
}

/// Statistics from an explicit membership list. Classes may not be empty.
pub fn class_stats_from_members(
    features: &DMatrix<f64>,
    members: &[Vec<usize>],
    flavor: Flavor,
) -> ClassStats {
    let p = features.nrows();
    let k_count = members.len();
    let mut class_means = DMatrix::zeros(p, k_count);
    let mut weighted_sum = DVector::zeros(p);
    let mut counts = Vec::with_capacity(k_count);
    for (k, points) in members.iter().enumerate() {
        assert!(!points.is_empty(), "class {k} has no members");
        let mut sum = DVector::zeros(p);
        for &i in points {
            sum += features.column(i);
        }
        weighted_sum += &sum;
        let nk = points.len() as f64;
        class_means.set_column(k, &(sum / nk));
        counts.push(nk);
    }
    let total: f64 = counts.iter().sum();
    ClassStats {
        counts,
        class_means,
        global_mean: weighted_sum / total,
        flavor,
    }
}

pub fn compute_class_stats(dataset: &Dataset) -> ClassStats {
    class_stats_from_members(dataset.features(), &memberships(dataset), dataset.flavor())
}

/// Scatter matrices from an explicit membership list (a single class is allowed).
pub fn scatter_from_members(
    features: &DMatrix<f64>,
    members: &[Vec<usize>],
    stats: &ClassStats,
) -> ScatterSet {
    let p = features.nrows();
    let k_count = members.len();

    let mut centered_means = DMatrix::zeros(p, k_count);
    for k in 0..k_count {
        let d = (stats.class_means.column(k) - &stats.global_mean) * stats.counts[k].sqrt();
        centered_means.set_column(k, &d);
    }
    let mut between = &centered_means * centered_means.transpose();

    let occurrences: usize = members.iter().map(Vec::len).sum();
    let mut deviations = DMatrix::zeros(p, occurrences);
    let mut col = 0;
    for (k, points) in members.iter().enumerate() {
        for &i in points {
            deviations.set_column(col, &(features.column(i) - stats.class_means.column(k)));
            col += 1;
        }
    }
    let mut within = &deviations * deviations.transpose();

    symmetrize(&mut between);
    symmetrize(&mut within);
    let total = &between + &within;
    ScatterSet {
        between,
        within,
        total,
        flavor: stats.flavor,
    }
}

pub fn compute_scatter(stats: &ClassStats, dataset: &Dataset) -> ScatterSet {
    scatter_from_members(dataset.features(), &memberships(dataset), stats)
}

/// Convenience: statistics and scatter in one call.
pub fn analyze(dataset: &Dataset) -> (ClassStats, ScatterSet) {
    let members = memberships(dataset);
    let stats = class_stats_from_members(dataset.features(), &members, dataset.flavor());
    let scatter = scatter_from_members(dataset.features(), &members, &stats);
    (stats, scatter)
}

/// Projected trace of one class pair, `Tr(G^T B G) = |G^T (m_a - m_b)|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTrace {
    pub first: usize,
    pub second: usize,
    pub weight: f64,
    pub trace: f64,
}

/// Rank-one pairwise between-class terms `B = d d^T`, `d = m_a - m_b`,
/// weighted by `n_a n_b`. Nothing `p x p` is stored.
#[derive(Debug, Clone, Copy)]
pub struct PairwiseBetweenView<'a> {
    stats: &'a ClassStats,
}

pub fn pairwise_between_view(stats: &ClassStats) -> PairwiseBetweenView<'_> {
    PairwiseBetweenView { stats }
}

impl<'a> PairwiseBetweenView<'a> {
    pub fn stats(&self) -> &'a ClassStats {
        self.stats
    }

    /// All pairs `(a, b)` with `a < b`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let k = self.stats.class_count();
        (0..k).flat_map(move |a| ((a + 1)..k).map(move |b| (a, b)))
    }

    pub fn pair_count(&self) -> usize {
        let k = self.stats.class_count();
        k * k.saturating_sub(1) / 2
    }

    pub fn diff(&self, a: usize, b: usize) -> DVector<f64> {
        self.stats.class_means.column(a) - self.stats.class_means.column(b)
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.stats.counts[a] * self.stats.counts[b]
    }

    /// Dense `d d^T`; for checks and small problems only.
    pub fn materialize(&self, a: usize, b: usize) -> DMatrix<f64> {
        let d = self.diff(a, b);
        &d * d.transpose()
    }

    pub fn projected_trace(&self, g: &DMatrix<f64>, a: usize, b: usize) -> f64 {
        (g.transpose() * self.diff(a, b)).norm_squared()
    }

    /// Every pair's projected trace, via the projected class means `G^T M`.
    pub fn projected_traces(&self, g: &DMatrix<f64>) -> Vec<PairTrace> {
        let projected = g.transpose() * &self.stats.class_means;
        self.pairs()
            .map(|(a, b)| PairTrace {
                first: a,
                second: b,
                weight: self.weight(a, b),
                trace: (projected.column(a) - projected.column(b)).norm_squared(),
            })
            .collect()
    }

    /// Unprojected traces `|m_a - m_b|^2`.
    pub fn full_traces(&self) -> Vec<PairTrace> {
        self.pairs()
            .map(|(a, b)| PairTrace {
                first: a,
                second: b,
                weight: self.weight(a, b),
                trace: self.diff(a, b).norm_squared(),
            })
            .collect()
    }
}

/// How well a projection separates the classes: projected between and
/// within traces plus the smallest projected pairwise mean distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedSeparation {
    pub between_trace: f64,
    pub within_trace: f64,
    /// `Tr(G^T S_w G) / Tr(S_w)`; zero when `S_w` itself is zero.
    pub within_ratio: f64,
    pub min_pair_distance: f64,
}

pub fn projected_separation(
    g: &DMatrix<f64>,
    stats: &ClassStats,
    scatter: &ScatterSet,
) -> ProjectedSeparation {
    let within_trace = crate::linalg::projected_trace(g, &scatter.within);
    let full = scatter.within.trace();
    ProjectedSeparation {
        between_trace: crate::linalg::projected_trace(g, &scatter.between),
        within_trace,
        within_ratio: if full > 0.0 { within_trace / full } else { 0.0 },
        min_pair_distance: pairwise_between_view(stats)
            .projected_traces(g)
            .iter()
            .map(|t| t.trace)
            .fold(f64::INFINITY, f64::min),
    }
}
