use serde::Serialize;

use super::{EvalError, PredictionRecord};
use crate::scalar::Scalar;

/// 2x2 contingency table, `counts[actual][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[u64; 2]; 2],
    class_names: [String; 2],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; 2]; 2], class_names: [&str; 2]) -> Self {
        Self {
            counts,
            class_names: class_names.map(str::to_string),
        }
    }

    /// Predicted class is the argmax of each distribution, ties to the
    /// lower class index.
    pub fn from_predictions<F: Scalar>(records: &[PredictionRecord<F>], class_names: [&str; 2]) -> Result<Self, EvalError> {
        if records.is_empty() {
            return Err(EvalError::Empty);
        }
        let mut counts = [[0u64; 2]; 2];
        for r in records {
            counts[r.actual][r.distribution.argmax()] += 1;
        }
        Ok(Self::from_counts(counts, class_names))
    }

    pub fn counts(&self) -> [[u64; 2]; 2] {
        self.counts
    }

    pub fn get(&self, actual: usize, predicted: usize) -> u64 {
        self.counts[actual][predicted]
    }

    pub fn class_names(&self) -> [&str; 2] {
        [&self.class_names[0], &self.class_names[1]]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        self.counts[0][0] + self.counts[1][1]
    }

    pub fn incorrect(&self) -> u64 {
        self.counts[0][1] + self.counts[1][0]
    }

    /// Actual-class supports.
    pub fn row_sums(&self) -> [u64; 2] {
        [self.counts[0][0] + self.counts[0][1], self.counts[1][0] + self.counts[1][1]]
    }

    /// Predicted-class totals.
    pub fn col_sums(&self) -> [u64; 2] {
        [self.counts[0][0] + self.counts[1][0], self.counts[0][1] + self.counts[1][1]]
    }
}

/// Percentage of correctly classified instances.
pub fn accuracy<F: Scalar>(cm: &ConfusionMatrix) -> Result<F, EvalError> {
    let n = cm.total();
    if n == 0 {
        return Err(EvalError::Empty);
    }
    Ok(F::lit(100.0) * F::from_count(cm.correct()) / F::from_count(n))
}

pub fn error_rate<F: Scalar>(cm: &ConfusionMatrix) -> Result<F, EvalError> {
    let n = cm.total();
    if n == 0 {
        return Err(EvalError::Empty);
    }
    Ok(F::lit(100.0) * F::from_count(cm.incorrect()) / F::from_count(n))
}

/// Cohen's kappa with chance agreement from the marginals. A table whose
/// chance agreement is 1 has kappa 0.
pub fn kappa<F: Scalar>(cm: &ConfusionMatrix) -> Result<F, EvalError> {
    let n = cm.total();
    if n == 0 {
        return Err(EvalError::Empty);
    }
    let n = F::from_count(n);
    let rows = cm.row_sums();
    let cols = cm.col_sums();
    let observed = F::from_count(cm.correct()) / n;
    let chance = (0..2).map(|c| F::from_count(rows[c]) * F::from_count(cols[c])).sum::<F>() / (n * n);
    if chance == F::one() {
        return Ok(F::zero());
    }
    Ok((observed - chance) / (F::one() - chance))
}

/// One row of the "detailed accuracy by class" table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassStats<F> {
    pub tp_rate: F,
    pub fp_rate: F,
    pub precision: F,
    pub recall: F,
    pub f_measure: F,
    pub mcc: F,
    pub roc_area: F,
    pub prc_area: F,
}

fn ratio<F: Scalar>(num: u64, den: u64) -> F {
    if den == 0 {
        F::zero()
    } else {
        F::from_count(num) / F::from_count(den)
    }
}

/// Threshold statistics of `class` treated as positive. Curve areas are left
/// at zero; see [`super::roc_auc`] and [`super::prc_auc`].
pub fn class_stats<F: Scalar>(cm: &ConfusionMatrix, class: usize) -> ClassStats<F> {
    let other = 1 - class;
    let tp = cm.get(class, class);
    let fn_ = cm.get(class, other);
    let fp = cm.get(other, class);
    let tn = cm.get(other, other);

    let recall: F = ratio(tp, tp + fn_);
    let precision: F = ratio(tp, tp + fp);
    let f_measure = if precision + recall == F::zero() {
        F::zero()
    } else {
        F::lit(2.0) * precision * recall / (precision + recall)
    };
    // Both factors of the denominator are symmetric in the class roles, so
    // the two rows of a binary table get bit-identical MCC.
    let pred_pos = F::from_count(tp + fp);
    let pred_neg = F::from_count(tn + fn_);
    let act_pos = F::from_count(tp + fn_);
    let act_neg = F::from_count(tn + fp);
    let denom = ((pred_pos * pred_neg) * (act_pos * act_neg)).sqrt();
    let mcc = if denom == F::zero() {
        F::zero()
    } else {
        (F::from_count(tp) * F::from_count(tn) - F::from_count(fp) * F::from_count(fn_)) / denom
    };

    ClassStats {
        tp_rate: recall,
        fp_rate: ratio(fp, fp + tn),
        precision,
        recall,
        f_measure,
        mcc,
        roc_area: F::zero(),
        prc_area: F::zero(),
    }
}

/// Support-weighted average of per-class rows.
pub fn weighted_average<F: Scalar>(cm: &ConfusionMatrix, rows: &[ClassStats<F>; 2]) -> ClassStats<F> {
    let support = cm.row_sums();
    let n = F::from_count(cm.total().max(1));
    let w = support.map(|s| F::from_count(s) / n);
    let avg = |f: fn(&ClassStats<F>) -> F| w[0] * f(&rows[0]) + w[1] * f(&rows[1]);
    ClassStats {
        tp_rate: avg(|r| r.tp_rate),
        fp_rate: avg(|r| r.fp_rate),
        precision: avg(|r| r.precision),
        recall: avg(|r| r.recall),
        f_measure: avg(|r| r.f_measure),
        mcc: avg(|r| r.mcc),
        roc_area: avg(|r| r.roc_area),
        prc_area: avg(|r| r.prc_area),
    }
}

/// Per-class rows plus their weighted average.
pub fn per_class_stats<F: Scalar>(cm: &ConfusionMatrix) -> Result<([ClassStats<F>; 2], ClassStats<F>), EvalError> {
    if cm.total() == 0 {
        return Err(EvalError::Empty);
    }
    let rows = [class_stats(cm, 0), class_stats(cm, 1)];
    let avg = weighted_average(cm, &rows);
    Ok((rows, avg))
}
