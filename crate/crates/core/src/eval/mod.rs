//! Evaluation of binary predictions: confusion-matrix statistics, ranking
//! areas, error metrics and information scores, assembled into a
//! WEKA-style summary report.

mod confusion;
mod probabilistic;
mod ranking;
mod report;

pub use confusion::{accuracy, class_stats, error_rate, kappa, per_class_stats, weighted_average, ClassStats, ConfusionMatrix};
pub use probabilistic::{error_metrics, info_metrics, kb_information, ErrorMetrics, InfoMetrics, PriorModel};
pub use ranking::{prc_auc, roc_auc};
pub use report::{full_report, EvaluationReport};

use thiserror::Error;

use crate::distribution::ClassDistribution;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no predictions to evaluate")]
    Empty,
    #[error("ROC area needs both classes present (got {positives} positive, {negatives} negative)")]
    OneClass { positives: u64, negatives: u64 },
    #[error("precision-recall area needs at least one positive instance")]
    NoPositives,
    #[error("the prior predictor makes no errors on this data; relative errors are undefined")]
    ZeroBaseline,
    #[error("information scores need strictly positive prior probabilities")]
    ZeroPrior,
    #[error("prior probabilities must be in [0, 1] and sum to 1")]
    InvalidPrior,
}

/// The true class of one instance and the distribution predicted for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRecord<F> {
    pub actual: usize,
    pub distribution: ClassDistribution<F>,
}

impl<F> PredictionRecord<F> {
    pub fn new(actual: usize, distribution: ClassDistribution<F>) -> Self {
        assert!(actual < 2, "class index {actual} out of range");
        Self { actual, distribution }
    }
}
