//! Metrics on predicted probabilities: absolute/squared error against the
//! prior baseline, and Kononenko-Bratko information scores in bits.

use serde::Serialize;

use super::{EvalError, PredictionRecord};
use crate::scalar::Scalar;

/// Class probabilities of the baseline predictor (ZeroR): usually the
/// training-split class distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriorModel<F> {
    probs: [F; 2],
}

impl<F: Scalar> PriorModel<F> {
    pub fn from_counts(counts: [u64; 2]) -> Result<Self, EvalError> {
        let n = counts[0] + counts[1];
        if n == 0 {
            return Err(EvalError::Empty);
        }
        let n = F::from_count(n);
        Ok(Self {
            probs: counts.map(|c| F::from_count(c) / n),
        })
    }

    /// Empirical class distribution of the records themselves.
    pub fn empirical(records: &[PredictionRecord<F>]) -> Result<Self, EvalError> {
        let mut counts = [0u64; 2];
        for r in records {
            counts[r.actual] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn from_probs(probs: [F; 2]) -> Result<Self, EvalError> {
        let ok =
            probs.iter().all(|p| *p >= F::zero() && *p <= F::one()) && (probs[0] + probs[1] - F::one()).abs() <= F::lit(1e-9);
        if !ok {
            return Err(EvalError::InvalidPrior);
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> [F; 2] {
        self.probs
    }

    pub fn prob(&self, class: usize) -> F {
        self.probs[class]
    }

    /// Entropy of the prior in bits.
    pub fn entropy_bits(&self) -> F {
        self.probs.iter().filter(|&&q| q > F::zero()).map(|&q| -q * q.log2()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorMetrics<F> {
    pub mean_absolute_error: F,
    pub root_mean_squared_error: F,
    pub relative_absolute_error_pct: F,
    pub root_relative_squared_error_pct: F,
}

/// Sums of absolute and squared residuals over instances x classes.
fn residual_sums<F: Scalar>(rows: impl Iterator<Item = ([F; 2], usize)>) -> (F, F, u64) {
    let (mut abs, mut sq, mut n) = (F::zero(), F::zero(), 0u64);
    for (probs, actual) in rows {
        for (c, &p) in probs.iter().enumerate() {
            let target = if c == actual { F::one() } else { F::zero() };
            let r = (p - target).abs();
            abs += r;
            sq += r * r;
        }
        n += 1;
    }
    (abs, sq, n)
}

pub fn error_metrics<F: Scalar>(records: &[PredictionRecord<F>], prior: &PriorModel<F>) -> Result<ErrorMetrics<F>, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    let (abs, sq, n) = residual_sums(records.iter().map(|r| (r.distribution.probs(), r.actual)));
    let (base_abs, base_sq, _) = residual_sums(records.iter().map(|r| (prior.probs(), r.actual)));
    let cells = F::from_count(2 * n);
    let mae = abs / cells;
    let rmse = (sq / cells).sqrt();
    let base_mae = base_abs / cells;
    let base_rmse = (base_sq / cells).sqrt();
    if base_mae == F::zero() || base_rmse == F::zero() {
        return Err(EvalError::ZeroBaseline);
    }
    let hundred = F::lit(100.0);
    Ok(ErrorMetrics {
        mean_absolute_error: mae,
        root_mean_squared_error: rmse,
        relative_absolute_error_pct: hundred * (mae / base_mae),
        root_relative_squared_error_pct: hundred * (rmse / base_rmse),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoMetrics<F> {
    pub kb_relative_info_pct: F,
    pub kb_info_bits: F,
    pub kb_info_bits_per_instance: F,
    pub complexity_order0_bits: F,
    pub complexity_order0_bits_per_instance: F,
    pub complexity_scheme_bits: F,
    pub complexity_scheme_bits_per_instance: F,
    pub complexity_improvement_bits: F,
    pub complexity_improvement_bits_per_instance: F,
}

/// Kononenko-Bratko information of one prediction: `p` is the predicted and
/// `q` the prior probability of the actual class.
pub fn kb_information<F: Scalar>(p: F, q: F) -> F {
    if p >= q {
        p.log2() - q.log2()
    } else {
        -((F::one() - p).log2() - (F::one() - q).log2())
    }
}

pub fn info_metrics<F: Scalar>(records: &[PredictionRecord<F>], prior: &PriorModel<F>) -> Result<InfoMetrics<F>, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    if prior.probs().iter().any(|&q| q <= F::zero()) {
        return Err(EvalError::ZeroPrior);
    }
    let entropy = prior.entropy_bits();
    let hundred = F::lit(100.0);
    let floor = F::prob_floor();
    let (mut kb, mut kb_rel, mut order0, mut scheme) = (F::zero(), F::zero(), F::zero(), F::zero());
    for r in records {
        let p = r.distribution.prob(r.actual);
        let q = prior.prob(r.actual);
        let info = kb_information(p, q);
        kb += info;
        kb_rel += hundred * info / entropy;
        order0 += -q.log2();
        scheme += -p.max(floor).log2();
    }
    let n = F::from_count(records.len() as u64);
    Ok(InfoMetrics {
        kb_relative_info_pct: kb_rel,
        kb_info_bits: kb,
        kb_info_bits_per_instance: kb / n,
        complexity_order0_bits: order0,
        complexity_order0_bits_per_instance: order0 / n,
        complexity_scheme_bits: scheme,
        complexity_scheme_bits_per_instance: scheme / n,
        complexity_improvement_bits: order0 - scheme,
        complexity_improvement_bits_per_instance: (order0 - scheme) / n,
    })
}
