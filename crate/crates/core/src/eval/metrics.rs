//! Accuracy and F1 scores.
//!
//! Macro F1 is the unweighted mean of per-class F1 over classes that occur in
//! either the predictions or the truth; micro F1 is the F1 of the pooled
//! TP/FP/FN counts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub micro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
}

/// Predicted or true labels for a batch of points.
#[derive(Debug, Clone, PartialEq)]
pub enum Labels {
    Single(Vec<usize>),
    Multi(Vec<Vec<bool>>),
}

impl Labels {
    pub fn len(&self) -> usize {
        match self {
            Labels::Single(v) => v.len(),
            Labels::Multi(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    tp: u64,
    fp: u64,
    fn_: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Counts {
    /// `2TP / (2TP + FP + FN)`, identical to `2PR / (P + R)`.
    fn f1(&self) -> f64 {
        ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }

    fn class_metrics(&self) -> ClassMetrics {
        ClassMetrics {
            precision: ratio(self.tp, self.tp + self.fp),
            recall: ratio(self.tp, self.tp + self.fn_),
            f1: self.f1(),
            support: (self.tp + self.fn_) as f64,
        }
    }

    fn occurs(&self) -> bool {
        self.tp + self.fp + self.fn_ > 0
    }
}

fn summarize(accuracy: f64, per_class_counts: &[Counts]) -> Metrics {
    let present: Vec<f64> = per_class_counts
        .iter()
        .filter(|c| c.occurs())
        .map(Counts::f1)
        .collect();
    let macro_f1 = if present.is_empty() {
        0.0
    } else {
        present.iter().sum::<f64>() / present.len() as f64
    };
    let pooled = per_class_counts.iter().fold(Counts::default(), |acc, c| Counts {
        tp: acc.tp + c.tp,
        fp: acc.fp + c.fp,
        fn_: acc.fn_ + c.fn_,
    });
    Metrics {
        accuracy,
        macro_f1,
        micro_f1: pooled.f1(),
        per_class: per_class_counts.iter().map(Counts::class_metrics).collect(),
    }
}

pub fn single_label_metrics(predicted: &[usize], truth: &[usize], class_count: usize) -> Result<Metrics> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            what: "predicted vs true labels",
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let mut counts = vec![Counts::default(); class_count];
    let mut correct = 0u64;
    for (&p, &t) in predicted.iter().zip(truth) {
        if p >= class_count || t >= class_count {
            return Err(Error::InvalidConfig(format!(
                "label outside 0..{class_count}"
            )));
        }
        if p == t {
            counts[t].tp += 1;
            correct += 1;
        } else {
            counts[p].fp += 1;
            counts[t].fn_ += 1;
        }
    }
    Ok(summarize(ratio(correct, truth.len() as u64), &counts))
}

/// Accuracy is the mean over labels of per-label binary accuracy.
pub fn multi_label_metrics(predicted: &[Vec<bool>], truth: &[Vec<bool>]) -> Result<Metrics> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            what: "predicted vs true label rows",
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let label_count = truth.first().map_or(0, Vec::len);
    let mut counts = vec![Counts::default(); label_count];
    let mut agree = vec![0u64; label_count];
    for (p_row, t_row) in predicted.iter().zip(truth) {
        if p_row.len() != label_count || t_row.len() != label_count {
            return Err(Error::LengthMismatch {
                what: "label row width",
                left: p_row.len(),
                right: label_count,
            });
        }
        for l in 0..label_count {
            match (p_row[l], t_row[l]) {
                (true, true) => counts[l].tp += 1,
                (true, false) => counts[l].fp += 1,
                (false, true) => counts[l].fn_ += 1,
                (false, false) => {}
            }
            if p_row[l] == t_row[l] {
                agree[l] += 1;
            }
        }
    }
    let n = truth.len() as u64;
    let accuracy = if label_count == 0 {
        0.0
    } else {
        agree.iter().map(|&a| ratio(a, n)).sum::<f64>() / label_count as f64
    };
    Ok(summarize(accuracy, &counts))
}

pub fn compute_metrics(predicted: &Labels, truth: &Labels, class_count: usize) -> Result<Metrics> {
    match (predicted, truth) {
        (Labels::Single(p), Labels::Single(t)) => single_label_metrics(p, t, class_count),
        (Labels::Multi(p), Labels::Multi(t)) => multi_label_metrics(p, t),
        _ => Err(Error::InvalidConfig(
            "predicted and true labels have different flavors".into(),
        )),
    }
}

/// Field-wise arithmetic mean.
pub fn mean_metrics(all: &[Metrics]) -> Option<Metrics> {
    let first = all.first()?;
    let n = all.len() as f64;
    let mean = |f: &dyn Fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
    let per_class = (0..first.per_class.len())
        .map(|c| ClassMetrics {
            precision: mean(&|m| m.per_class[c].precision),
            recall: mean(&|m| m.per_class[c].recall),
            f1: mean(&|m| m.per_class[c].f1),
            support: mean(&|m| m.per_class[c].support),
        })
        .collect();
    Some(Metrics {
        accuracy: mean(&|m| m.accuracy),
        macro_f1: mean(&|m| m.macro_f1),
        micro_f1: mean(&|m| m.micro_f1),
        per_class,
    })
}
