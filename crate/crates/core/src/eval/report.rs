use std::fmt::{self, Write as _};

use serde::Serialize;

use super::{
    accuracy, error_metrics, error_rate, info_metrics, kappa, per_class_stats, prc_auc, roc_auc, weighted_average, ClassStats,
    ConfusionMatrix, ErrorMetrics, EvalError, InfoMetrics, PredictionRecord, PriorModel,
};
use crate::scalar::Scalar;

/// Every quantity of the evaluation summary, keyed by stable field names.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport<F> {
    pub class_names: [String; 2],
    pub total_instances: u64,
    pub correct_instances: u64,
    pub incorrect_instances: u64,
    pub accuracy_pct: F,
    pub error_pct: F,
    pub kappa: F,
    #[serde(flatten)]
    pub info: InfoMetrics<F>,
    #[serde(flatten)]
    pub errors: ErrorMetrics<F>,
    pub per_class: [ClassStats<F>; 2],
    pub weighted_avg: ClassStats<F>,
    pub confusion_matrix: [[u64; 2]; 2],
    pub prior: PriorModel<F>,
}

pub fn full_report<F: Scalar>(
    records: &[PredictionRecord<F>],
    prior: &PriorModel<F>,
    class_names: [&str; 2],
) -> Result<EvaluationReport<F>, EvalError> {
    let cm = ConfusionMatrix::from_predictions(records, class_names)?;
    let (mut rows, _) = per_class_stats::<F>(&cm)?;
    for (c, row) in rows.iter_mut().enumerate() {
        row.roc_area = roc_auc(records, c)?;
        row.prc_area = prc_auc(records, c)?;
    }
    let weighted_avg = weighted_average(&cm, &rows);
    Ok(EvaluationReport {
        class_names: class_names.map(str::to_string),
        total_instances: cm.total(),
        correct_instances: cm.correct(),
        incorrect_instances: cm.incorrect(),
        accuracy_pct: accuracy(&cm)?,
        error_pct: error_rate(&cm)?,
        kappa: kappa(&cm)?,
        info: info_metrics(records, prior)?,
        errors: error_metrics(records, prior)?,
        per_class: rows,
        weighted_avg,
        confusion_matrix: cm.counts(),
        prior: *prior,
    })
}

fn f4<F: Scalar>(x: F) -> String {
    format!("{:.4}", x.to_f64_lossy())
}

fn f3<F: Scalar>(x: F) -> String {
    format!("{:.3}", x.to_f64_lossy())
}

impl<F: Scalar> EvaluationReport<F> {
    /// Human-readable block in the layout of WEKA's evaluation output.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let line = |s: &mut String, label: &str, value: String, tail: &str| {
            let _ = writeln!(s, "{label:<36}{value:>16}{tail}");
        };
        let pair = |s: &mut String, label: &str, total: F, per: F| {
            let _ = writeln!(s, "{label:<36}{:>16} bits{:>14} bits/instance", f4(total), f4(per));
        };
        s.push_str("=== Summary ===\n\n");
        let _ = writeln!(
            s,
            "{:<36}{:>16}{:>18} %",
            "Correctly Classified Instances",
            self.correct_instances,
            f4(self.accuracy_pct)
        );
        let _ = writeln!(
            s,
            "{:<36}{:>16}{:>18} %",
            "Incorrectly Classified Instances",
            self.incorrect_instances,
            f4(self.error_pct)
        );
        line(&mut s, "Kappa statistic", f4(self.kappa), "");
        line(&mut s, "K&B Relative Info Score", f4(self.info.kb_relative_info_pct), " %");
        pair(
            &mut s,
            "K&B Information Score",
            self.info.kb_info_bits,
            self.info.kb_info_bits_per_instance,
        );
        pair(
            &mut s,
            "Class complexity | order 0",
            self.info.complexity_order0_bits,
            self.info.complexity_order0_bits_per_instance,
        );
        pair(
            &mut s,
            "Class complexity | scheme",
            self.info.complexity_scheme_bits,
            self.info.complexity_scheme_bits_per_instance,
        );
        pair(
            &mut s,
            "Complexity improvement     (Sf)",
            self.info.complexity_improvement_bits,
            self.info.complexity_improvement_bits_per_instance,
        );
        line(&mut s, "Mean absolute error", f4(self.errors.mean_absolute_error), "");
        line(&mut s, "Root mean squared error", f4(self.errors.root_mean_squared_error), "");
        line(
            &mut s,
            "Relative absolute error",
            f4(self.errors.relative_absolute_error_pct),
            " %",
        );
        line(
            &mut s,
            "Root relative squared error",
            f4(self.errors.root_relative_squared_error_pct),
            " %",
        );
        line(&mut s, "Total Number of Instances", self.total_instances.to_string(), "");

        s.push_str("\n=== Detailed Accuracy By Class ===\n\n");
        let _ = writeln!(
            s,
            "{:<14}{:>9}{:>9}{:>11}{:>9}{:>11}{:>9}{:>10}{:>10}  Class",
            "", "TP Rate", "FP Rate", "Precision", "Recall", "F-Measure", "MCC", "ROC Area", "PRC Area"
        );
        let row = |s: &mut String, label: &str, r: &ClassStats<F>, class: &str| {
            let _ = writeln!(
                s,
                "{label:<14}{:>9}{:>9}{:>11}{:>9}{:>11}{:>9}{:>10}{:>10}  {class}",
                f3(r.tp_rate),
                f3(r.fp_rate),
                f3(r.precision),
                f3(r.recall),
                f3(r.f_measure),
                f3(r.mcc),
                f3(r.roc_area),
                f3(r.prc_area)
            );
        };
        row(&mut s, "", &self.per_class[0], &self.class_names[0]);
        row(&mut s, "", &self.per_class[1], &self.class_names[1]);
        row(&mut s, "Weighted Avg.", &self.weighted_avg, "");

        s.push_str("\n=== Confusion Matrix ===\n\n");
        let m = self.confusion_matrix;
        let width = m.iter().flatten().map(|c| c.to_string().len()).max().unwrap_or(1).max(4) + 1;
        let _ = writeln!(s, "{:>w$}{:>w$}   <-- classified as", "a", "b", w = width);
        for (c, letter) in ["a", "b"].iter().enumerate() {
            let _ = writeln!(
                s,
                "{:>w$}{:>w$} | {} = {}",
                m[c][0],
                m[c][1],
                letter,
                self.class_names[c],
                w = width
            );
        }
        s
    }
}

impl<F: Scalar> fmt::Display for EvaluationReport<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}
