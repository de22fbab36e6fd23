use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Assignment of every point to one of `fold_count` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub fold_count: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    /// The plan for a permuted dataset whose point `j` is old point `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> FoldPlan {
        FoldPlan {
            fold_count: self.fold_count,
            assignments: perm.iter().map(|&i| self.assignments[i]).collect(),
            seed: self.seed,
        }
    }
}

/// Stratified for single-label data (each class dealt round-robin after a
/// seeded shuffle, continuing the deal across classes), plain shuffled
/// round-robin for multi-label data.
pub fn split_folds(dataset: &Dataset, fold_count: usize, seed: u64) -> Result<FoldPlan> {
    if fold_count < 2 {
        return Err(Error::InvalidConfig(format!(
            "fold_count must be >= 2, got {fold_count}"
        )));
    }
    let n = dataset.n_points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; n];
    match dataset {
        Dataset::Single(d) => {
            let mut next = 0;
            for class in 0..d.class_count() {
                let mut members = dataset.class_members(class);
                if members.len() < fold_count {
                    return Err(Error::ClassTooSmallForFolds {
                        class,
                        size: members.len(),
                        folds: fold_count,
                    });
                }
                members.shuffle(&mut rng);
                for i in members {
                    assignments[i] = next % fold_count;
                    next += 1;
                }
            }
        }
        Dataset::Multi(_) => {
            if n < fold_count {
                return Err(Error::InvalidConfig(format!(
                    "{n} points cannot fill {fold_count} folds"
                )));
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            for (pos, i) in order.into_iter().enumerate() {
                assignments[i] = pos % fold_count;
            }
        }
    }
    Ok(FoldPlan {
        fold_count,
        assignments,
        seed,
    })
}
