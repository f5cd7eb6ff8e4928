use super::{EvalError, PredictionRecord};
use crate::scalar::Scalar;

/// `(score, is_positive)` sorted by descending score.
fn ranked<F: Scalar>(records: &[PredictionRecord<F>], positive_class: usize) -> Vec<(F, bool)> {
    let mut v: Vec<(F, bool)> = records
        .iter()
        .map(|r| (r.distribution.prob(positive_class), r.actual == positive_class))
        .collect();
    v.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Groups of equal scores, as `(positives, negatives)` per group, highest
/// score first.
fn tie_groups<F: Scalar>(ranked: &[(F, bool)]) -> Vec<(u64, u64)> {
    let mut groups: Vec<(u64, u64)> = Vec::new();
    let mut last: Option<F> = None;
    for &(score, pos) in ranked {
        if last != Some(score) {
            groups.push((0, 0));
            last = Some(score);
        }
        let g = groups.last_mut().expect("group pushed");
        if pos {
            g.0 += 1;
        } else {
            g.1 += 1;
        }
    }
    groups
}

/// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
/// (positive, negative) pairs where the positive scores higher, ties
/// counting one half. Scores are `P(positive_class)`.
pub fn roc_auc<F: Scalar>(records: &[PredictionRecord<F>], positive_class: usize) -> Result<F, EvalError> {
    let groups = tie_groups(&ranked(records, positive_class));
    let n_pos: u64 = groups.iter().map(|g| g.0).sum();
    let n_neg: u64 = groups.iter().map(|g| g.1).sum();
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::OneClass {
            positives: n_pos,
            negatives: n_neg,
        });
    }
    // Walking from the top, each positive beats every negative below its group.
    let mut negatives_above = 0u64;
    let mut twice_wins = 0u128;
    for &(p, n) in &groups {
        let below = n_neg - negatives_above - n;
        twice_wins += 2 * p as u128 * below as u128 + p as u128 * n as u128;
        negatives_above += n;
    }
    Ok(F::lit(twice_wins as f64) / F::lit(2.0 * n_pos as f64 * n_neg as f64))
}

/// Area under the non-interpolated precision-recall step curve, sweeping
/// thresholds over the distinct scores from high to low.
pub fn prc_auc<F: Scalar>(records: &[PredictionRecord<F>], positive_class: usize) -> Result<F, EvalError> {
    let groups = tie_groups(&ranked(records, positive_class));
    let n_pos: u64 = groups.iter().map(|g| g.0).sum();
    if n_pos == 0 {
        return Err(EvalError::NoPositives);
    }
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut area = F::zero();
    for &(p, n) in &groups {
        tp += p;
        fp += n;
        if p > 0 {
            let precision = F::from_count(tp) / F::from_count(tp + fp);
            area += F::from_count(p) / F::from_count(n_pos) * precision;
        }
    }
    Ok(area)
}
