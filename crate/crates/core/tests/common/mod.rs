//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's numerical code paths.
#![allow(dead_code)]

use mcda::{LabeledDataset, MultiLabelDataset};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// First `k` points cover every class; the rest are uniform. Class `c` is
/// shifted by a random offset of scale `spread`.
pub fn random_labeled(rng: &mut ChaCha8Rng, n: usize, p: usize, k: usize, spread: f64) -> LabeledDataset {
    let offsets = normal(rng, p, k) * spread;
    let labels: Vec<usize> = (0..n)
        .map(|i| if i < k { i } else { rng.random_range(0..k) })
        .collect();
    let noise = normal(rng, p, n);
    let x = DMatrix::from_fn(p, n, |r, c| noise[(r, c)] + offsets[(r, labels[c])]);
    LabeledDataset::new(x, labels, k).unwrap()
}

pub fn random_multilabel(rng: &mut ChaCha8Rng, n: usize, p: usize, k: usize) -> MultiLabelDataset {
    let mut ind = vec![vec![false; k]; n];
    for (i, row) in ind.iter_mut().enumerate() {
        if i < k {
            row[i] = true;
        }
        for bit in row.iter_mut() {
            if rng.random_bool(0.35) {
                *bit = true;
            }
        }
        if !row.iter().any(|&b| b) {
            row[rng.random_range(0..k)] = true;
        }
    }
    let x = normal(rng, p, n) + DMatrix::from_fn(p, n, |r, c| {
        ind[c].iter().enumerate().filter(|(_, &b)| b).map(|(l, _)| ((r + 3 * l) % 5) as f64).sum::<f64>()
    });
    MultiLabelDataset::new(x, ind).unwrap()
}

/// Orthonormal `p x k` via modified Gram-Schmidt on a Gaussian matrix.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, p: usize, k: usize) -> DMatrix<f64> {
    gram_schmidt(&normal(rng, p, k))
}

pub fn gram_schmidt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).into_owned();
                let mut cj = q.column_mut(j);
                cj -= qi * proj;
            }
        }
        let norm = q.column(j).norm();
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    q
}

/// Scatter computed with explicit loops straight from the definitions.
pub struct NaiveScatter {
    pub counts: Vec<f64>,
    pub means: Vec<DVector<f64>>,
    pub global: DVector<f64>,
    pub between: DMatrix<f64>,
    pub within: DMatrix<f64>,
    /// Single-label: `sum_i (x_i - m)(x_i - m)^T`. Multi-label: between + within.
    pub total: DMatrix<f64>,
}

pub fn naive_multilabel(x: &DMatrix<f64>, y: &[Vec<bool>]) -> NaiveScatter {
    let (p, n) = x.shape();
    let k = y[0].len();
    let weight = |i: usize, c: usize| if y[i][c] { 1.0 } else { 0.0 };
    let mut counts = vec![0.0; k];
    let mut means = vec![DVector::zeros(p); k];
    let mut global = DVector::zeros(p);
    let mut total_weight = 0.0;
    for i in 0..n {
        for c in 0..k {
            let w = weight(i, c);
            counts[c] += w;
            for r in 0..p {
                means[c][r] += w * x[(r, i)];
                global[r] += w * x[(r, i)];
            }
            total_weight += w;
        }
    }
    for c in 0..k {
        means[c] /= counts[c];
    }
    global /= total_weight;
    let mut between = DMatrix::zeros(p, p);
    let mut within = DMatrix::zeros(p, p);
    for c in 0..k {
        let d = &means[c] - &global;
        between += &d * d.transpose() * counts[c];
        for i in 0..n {
            let w = weight(i, c);
            if w != 0.0 {
                let e = x.column(i) - &means[c];
                within += &e * e.transpose() * w;
            }
        }
    }
    let total = &between + &within;
    NaiveScatter {
        counts,
        means,
        global,
        between,
        within,
        total,
    }
}

pub fn naive_single(x: &DMatrix<f64>, labels: &[usize], k: usize) -> NaiveScatter {
    let y: Vec<Vec<bool>> = labels.iter().map(|&l| (0..k).map(|c| c == l).collect()).collect();
    let mut s = naive_multilabel(x, &y);
    let p = x.nrows();
    let mut total = DMatrix::zeros(p, p);
    for i in 0..x.ncols() {
        let e = x.column(i) - &s.global;
        total += &e * e.transpose();
    }
    s.total = total;
    s
}

/// The objective with every pair matrix materialized densely.
pub fn dense_objective(g: &DMatrix<f64>, s: &NaiveScatter, gamma: f64) -> f64 {
    let mut value = gamma * (g.transpose() * &s.within * g).trace();
    for a in 0..s.means.len() {
        for b in (a + 1)..s.means.len() {
            let d = &s.means[a] - &s.means[b];
            let pair = &d * d.transpose();
            value += s.counts[a] * s.counts[b] / (g.transpose() * pair * g).trace();
        }
    }
    value
}

pub fn rel_fro(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Sine of the largest principal angle between the column spaces of `a` and
/// `b`, via the spectral norm of the difference of orthogonal projectors.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = gram_schmidt(a);
    let qb = gram_schmidt(b);
    let diff = &qa * qa.transpose() - &qb * qb.transpose();
    diff.singular_values().max()
}

/// `(cos t, sin t)` for `steps` angles evenly covering `[0, pi)`.
pub fn angle_grid(steps: usize) -> impl Iterator<Item = DMatrix<f64>> {
    (0..steps).map(move |i| {
        let t = std::f64::consts::PI * i as f64 / steps as f64;
        DMatrix::from_column_slice(2, 1, &[t.cos(), t.sin()])
    })
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Exhaustive distance sort, vote, and the documented tie rules.
pub fn knn_oracle(train: &DMatrix<f64>, labels: &[usize], query: &[f64], knn: usize) -> usize {
    let mut all: Vec<(f64, usize)> = (0..train.ncols())
        .map(|i| {
            let d2: f64 = (0..train.nrows()).map(|r| (train[(r, i)] - query[r]).powi(2)).sum();
            (d2.sqrt(), i)
        })
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let classes = labels.iter().max().unwrap() + 1;
    let mut votes = vec![0; classes];
    let mut nearest = vec![f64::INFINITY; classes];
    for &(d, i) in &all[..knn] {
        votes[labels[i]] += 1;
        if d < nearest[labels[i]] {
            nearest[labels[i]] = d;
        }
    }
    let top = *votes.iter().max().unwrap();
    let mut best: Option<usize> = None;
    for c in 0..classes {
        if votes[c] != top {
            continue;
        }
        best = match best {
            None => Some(c),
            Some(b) if nearest[c] < nearest[b] - 1e-12 * nearest[b].max(1.0) => Some(c),
            keep => keep,
        };
    }
    best.unwrap()
}
