mod common;

use common::{naive_multilabel, naive_single, random_labeled, random_multilabel, rel_fro, rng};
use mcda::dataset::Dataset;
use mcda::scatter::{analyze, pairwise_between_view};
use mcda::{LabeledDataset, MultiLabelDataset};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

#[test]
fn hand_example_means() {
    let x = DMatrix::from_column_slice(2, 3, &[0.0, 0.0, 2.0, 0.0, 0.0, 2.0]);
    let d: Dataset = LabeledDataset::new(x, vec![0, 0, 1], 2).unwrap().into();
    let (stats, _) = analyze(&d);
    assert_eq!(stats.counts(), &[2.0, 1.0]);
    assert_eq!(stats.class_mean(0), DVector::from_vec(vec![1.0, 0.0]));
    assert_eq!(stats.class_mean(1), DVector::from_vec(vec![0.0, 2.0]));
    let m = stats.global_mean();
    assert!((m[0] - 2.0 / 3.0).abs() < 1e-15 && (m[1] - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn additivity_against_independent_total() {
    let mut r = rng(11);
    for _ in 0..5 {
        let d = random_labeled(&mut r, 50, 8, 3, 2.0);
        let naive = naive_single(d.features(), d.labels(), 3);
        let (_, s) = analyze(&d.clone().into());
        assert!(rel_fro(&(&s.between + &s.within), &naive.total) <= 1e-12);
        assert!(rel_fro(&s.between, &naive.between) <= 1e-12);
        assert!(rel_fro(&s.within, &naive.within) <= 1e-12);
    }
}

#[test]
fn symmetric_and_psd() {
    let mut r = rng(12);
    let d: Dataset = random_labeled(&mut r, 40, 6, 4, 1.5).into();
    let (_, s) = analyze(&d);
    for m in [&s.between, &s.within, &s.total] {
        assert!(rel_fro(m, &m.transpose()) <= 1e-10);
        let eig = m.clone().symmetric_eigen();
        let max = eig.eigenvalues.max();
        assert!(eig.eigenvalues.min() >= -1e-8 * max);
    }
}

#[test]
fn multilabel_means_match_brute_force() {
    let mut r = rng(13);
    let d = random_multilabel(&mut r, 20, 5, 4);
    let naive = naive_multilabel(d.features(), d.indicator());
    let (stats, s) = analyze(&d.clone().into());
    for k in 0..4 {
        assert_eq!(stats.counts()[k], naive.counts[k]);
        assert!((stats.class_mean(k) - &naive.means[k]).norm() <= 1e-12 * naive.means[k].norm());
    }
    assert!((stats.global_mean() - &naive.global).norm() <= 1e-12 * naive.global.norm());
    assert!(rel_fro(&s.between, &naive.between) <= 1e-12);
    assert!(rel_fro(&s.within, &naive.within) <= 1e-12);
    assert!(rel_fro(&s.total, &(&s.between + &s.within)) <= 1e-15);
}

#[test]
fn pairwise_identity_by_summation() {
    let mut r = rng(14);
    let d = random_labeled(&mut r, 60, 7, 5, 2.0);
    let n = d.labels().len() as f64;
    let (stats, s) = analyze(&d.into());
    let view = pairwise_between_view(&stats);
    let mut sum = DMatrix::zeros(7, 7);
    for (a, b) in view.pairs() {
        sum += view.materialize(a, b) * view.weight(a, b);
    }
    assert_eq!(view.pair_count(), 10);
    assert!(rel_fro(&sum, &(&s.between * n)) <= 1e-8);
}

#[test]
fn pair_materialization_and_trace_form() {
    let x = DMatrix::from_column_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let d: Dataset = LabeledDataset::new(x, vec![0, 1], 2).unwrap().into();
    let (stats, _) = analyze(&d);
    let view = pairwise_between_view(&stats);
    assert_eq!(view.materialize(0, 1), DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));

    let mut r = rng(15);
    let d = random_labeled(&mut r, 30, 6, 4, 1.0);
    let (stats, _) = analyze(&d.into());
    let view = pairwise_between_view(&stats);
    let g = common::normal(&mut r, 6, 2);
    let traces = view.projected_traces(&g);
    for t in traces {
        let b = view.materialize(t.first, t.second);
        let dense = (g.transpose() * &b * &g).trace();
        assert!(common::rel(dense, t.trace) <= 1e-12);
        let eig = b.symmetric_eigen().eigenvalues;
        assert!(eig.iter().filter(|v| v.abs() > 1e-12 * eig.amax()).count() <= 1);
    }
}

#[test]
fn coincident_means_give_zero_pair() {
    let x = DMatrix::from_column_slice(1, 4, &[0.0, 2.0, 1.0, 1.0]);
    let d: Dataset = LabeledDataset::new(x, vec![0, 0, 1, 1], 2).unwrap().into();
    let (stats, _) = analyze(&d);
    let view = pairwise_between_view(&stats);
    assert_eq!(view.materialize(0, 1), DMatrix::zeros(1, 1));
}

#[test]
fn one_hot_reduces_to_single_label() {
    let mut r = rng(16);
    let single = random_labeled(&mut r, 45, 6, 3, 2.0);
    let multi: MultiLabelDataset = single.to_one_hot();
    let (s_stats, s) = analyze(&single.into());
    let (m_stats, m) = analyze(&multi.into());
    assert_eq!(s_stats.counts(), m_stats.counts());
    assert!(rel_fro(s_stats.class_means(), m_stats.class_means()) <= 1e-12);
    assert!(rel_fro(&s.between, &m.between) <= 1e-12);
    assert!(rel_fro(&s.within, &m.within) <= 1e-12);
    assert!(rel_fro(&s.total, &m.total) <= 1e-12);
}

#[test]
fn every_point_at_its_mean_has_zero_within() {
    let x = DMatrix::from_column_slice(2, 4, &[1.0, 1.0, 1.0, 1.0, 3.0, 0.0, 3.0, 0.0]);
    let d: Dataset = LabeledDataset::new(x, vec![0, 0, 1, 1], 2).unwrap().into();
    let (_, s) = analyze(&d);
    assert_eq!(s.within, DMatrix::zeros(2, 2));
    assert_eq!(s.total, s.between);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn additivity_holds(seed in any::<u64>(), n in 10usize..80, p in 1usize..12, k in 2usize..6) {
        let mut r = rng(seed);
        let d = random_labeled(&mut r, n.max(k), p, k, 1.0);
        let (_, s) = analyze(&d.clone().into());
        let naive = naive_single(d.features(), d.labels(), k);
        prop_assert!(rel_fro(&s.total, &naive.total) <= 1e-10);
    }

    #[test]
    fn translation_invariance(seed in any::<u64>(), shift in -100.0f64..100.0) {
        let mut r = rng(seed);
        let d = random_labeled(&mut r, 30, 5, 3, 1.0);
        let c = common::normal(&mut r, 5, 1) * shift;
        let moved_x = DMatrix::from_fn(5, 30, |i, j| d.features()[(i, j)] + c[(i, 0)]);
        let moved = LabeledDataset::new(moved_x, d.labels().to_vec(), 3).unwrap();
        let (sa, a) = analyze(&d.into());
        let (sb, b) = analyze(&moved.into());
        prop_assert!(rel_fro(&a.between, &b.between) <= 1e-10);
        prop_assert!(rel_fro(&a.within, &b.within) <= 1e-10);
        prop_assert!(rel_fro(&a.total, &b.total) <= 1e-10);
        let (va, vb) = (pairwise_between_view(&sa), pairwise_between_view(&sb));
        for (x, y) in va.pairs() {
            prop_assert!(rel_fro(&va.materialize(x, y), &vb.materialize(x, y)) <= 1e-10);
        }
    }
}
