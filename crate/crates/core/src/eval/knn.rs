//! Brute-force k-nearest-neighbour classification in the projected space.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Distances closer than this are treated as equal when breaking vote ties.
const DISTANCE_TIE: f64 = 1e-12;

fn check(train: &DMatrix<f64>, n_labels: usize, test: &DMatrix<f64>, knn: usize) -> Result<()> {
    if train.ncols() == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if n_labels != train.ncols() {
        return Err(Error::LengthMismatch {
            what: "training labels vs training points",
            left: n_labels,
            right: train.ncols(),
        });
    }
    if train.nrows() != test.nrows() {
        return Err(Error::LengthMismatch {
            what: "training vs test dimension",
            left: train.nrows(),
            right: test.nrows(),
        });
    }
    if knn == 0 || knn > train.ncols() {
        return Err(Error::InvalidConfig(format!(
            "knn must be in 1..={}, got {knn}",
            train.ncols()
        )));
    }
    Ok(())
}

/// The `knn` nearest training columns as `(distance, index)`, ordered by
/// distance then index.
pub fn nearest_neighbors(train: &DMatrix<f64>, query: &[f64], knn: usize) -> Vec<(f64, usize)> {
    let mut dists: Vec<(f64, usize)> = train
        .column_iter()
        .enumerate()
        .map(|(i, col)| {
            let d2: f64 = col.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2.sqrt(), i)
        })
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    dists.truncate(knn);
    dists
}

/// Among `candidates`, the class whose nearest neighbour is closest; exact
/// (within 1e-12) distance ties go to the smallest class id.
fn break_tie(candidates: &[usize], nearest: &[f64]) -> usize {
    let best = candidates
        .iter()
        .map(|&c| nearest[c])
        .fold(f64::INFINITY, f64::min);
    candidates
        .iter()
        .copied()
        .filter(|&c| nearest[c] - best <= DISTANCE_TIE * best.max(1.0))
        .min()
        .expect("at least one candidate")
}

/// Majority vote among the `knn` nearest training points. Vote ties go to the
/// tied class with the nearest member, then to the smallest class id.
pub fn knn_predict(
    train: &DMatrix<f64>,
    train_labels: &[usize],
    test: &DMatrix<f64>,
    knn: usize,
) -> Result<Vec<usize>> {
    check(train, train_labels.len(), test, knn)?;
    let class_count = train_labels.iter().copied().max().unwrap_or(0) + 1;
    let mut out = Vec::with_capacity(test.ncols());
    for col in test.column_iter() {
        let query: Vec<f64> = col.iter().copied().collect();
        let mut votes = vec![0usize; class_count];
        let mut nearest = vec![f64::INFINITY; class_count];
        for (d, i) in nearest_neighbors(train, &query, knn) {
            let c = train_labels[i];
            votes[c] += 1;
            nearest[c] = nearest[c].min(d);
        }
        let top = *votes.iter().max().expect("non-empty votes");
        let tied: Vec<usize> = (0..class_count).filter(|&c| votes[c] == top).collect();
        out.push(break_tie(&tied, &nearest));
    }
    Ok(out)
}

/// Label `l` is predicted when more than half of the `knn` neighbours carry
/// it. If no label clears that bar, the most frequent neighbour label is
/// predicted alone (ties as in [`knn_predict`]).
pub fn knn_predict_multilabel(
    train: &DMatrix<f64>,
    train_indicator: &[Vec<bool>],
    test: &DMatrix<f64>,
    knn: usize,
) -> Result<Vec<Vec<bool>>> {
    check(train, train_indicator.len(), test, knn)?;
    let label_count = train_indicator[0].len();
    let mut out = Vec::with_capacity(test.ncols());
    for col in test.column_iter() {
        let query: Vec<f64> = col.iter().copied().collect();
        let mut votes = vec![0usize; label_count];
        let mut nearest = vec![f64::INFINITY; label_count];
        for (d, i) in nearest_neighbors(train, &query, knn) {
            for (l, &on) in train_indicator[i].iter().enumerate() {
                if on {
                    votes[l] += 1;
                    nearest[l] = nearest[l].min(d);
                }
            }
        }
        let mut row: Vec<bool> = votes.iter().map(|&v| 2 * v > knn).collect();
        if !row.iter().any(|&b| b) {
            let top = *votes.iter().max().expect("non-empty votes");
            let tied: Vec<usize> = (0..label_count).filter(|&l| votes[l] == top).collect();
            row[break_tie(&tied, &nearest)] = true;
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_nearest_neighbour() {
        let train = DMatrix::from_row_slice(1, 3, &[0.0, 5.0, 10.0]);
        let test = DMatrix::from_row_slice(1, 2, &[4.0, 9.0]);
        assert_eq!(knn_predict(&train, &[0, 1, 2], &test, 1).unwrap(), vec![1, 2]);
    }

    #[test]
    fn equidistant_tie_goes_to_smallest_class() {
        let train = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let test = DMatrix::from_row_slice(1, 1, &[0.0]);
        assert_eq!(knn_predict(&train, &[1, 0], &test, 2).unwrap(), vec![0]);
        assert_eq!(knn_predict(&train, &[0, 1], &test, 2).unwrap(), vec![0]);
    }

    #[test]
    fn vote_tie_goes_to_nearest_class() {
        let train = DMatrix::from_row_slice(1, 2, &[1.0, -2.0]);
        let test = DMatrix::from_row_slice(1, 1, &[0.0]);
        assert_eq!(knn_predict(&train, &[1, 0], &test, 2).unwrap(), vec![1]);
    }

    #[test]
    fn errors() {
        let empty = DMatrix::<f64>::zeros(1, 0);
        let test = DMatrix::from_row_slice(1, 1, &[0.0]);
        assert!(matches!(knn_predict(&empty, &[], &test, 1), Err(Error::EmptyTrainingSet)));
        let train = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        assert!(knn_predict(&train, &[0, 1], &test, 3).is_err());
    }

    #[test]
    fn multilabel_majority_and_fallback() {
        let train = DMatrix::from_row_slice(1, 3, &[0.0, 1.0, 2.0]);
        let test = DMatrix::from_row_slice(1, 1, &[0.0]);
        let ind = vec![vec![true, false], vec![true, false], vec![false, true]];
        assert_eq!(
            knn_predict_multilabel(&train, &ind, &test, 3).unwrap(),
            vec![vec![true, false]]
        );
        let same = vec![vec![true, true, false]; 3];
        assert_eq!(
            knn_predict_multilabel(&train, &same, &test, 3).unwrap(),
            vec![vec![true, true, false]]
        );
        let split = vec![vec![false, true, false], vec![true, false, false], vec![false, false, true]];
        assert_eq!(
            knn_predict_multilabel(&train, &split, &test, 3).unwrap(),
            vec![vec![false, true, false]]
        );
    }
}
