//! Machine-readable (JSON) and text renderings of command results.

use std::fmt::Write as _;

use hybridtext::pipeline::{Comparison, ComparisonRow, Prediction, TrainDiagnostics};
use hybridtext::{Dataset, FusionPolicy, Model, ModelKind, Report};
use serde::Serialize;

use crate::model_file::{fusion_file, FusionFile};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct InstanceRow {
    pub index: usize,
    pub id: usize,
    pub actual: String,
    pub predicted: String,
    pub probabilities: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nb: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svm: Option<[f64; 2]>,
}

pub fn instance_rows(model: &Model, data: &Dataset, predictions: &[(usize, Prediction<f64>)]) -> Vec<InstanceRow> {
    let labels = model.labels();
    data.documents()
        .iter()
        .zip(predictions)
        .enumerate()
        .map(|(index, (doc, (actual, p)))| InstanceRow {
            index,
            id: doc.id,
            actual: labels[*actual].clone(),
            predicted: labels[p.label()].clone(),
            probabilities: p.distribution.probs(),
            nb: p.nb.map(|d| d.probs()),
            svm: p.svm.map(|d| d.probs()),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct EvaluationDocument {
    pub format: &'static str,
    pub format_version: u32,
    pub model_kind: ModelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fusion: Option<FusionFile>,
    pub prior_source: &'static str,
    pub test_sha256: String,
    pub metrics: Report,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances: Option<Vec<InstanceRow>>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn model_policy(model: &Model) -> Option<FusionPolicy<f64>> {
    match model.classifier() {
        hybridtext::pipeline::Classifier::Hybrid(h) => Some(*h.policy()),
        _ => None,
    }
}

pub fn render_instances(rows: &[InstanceRow]) -> String {
    let mut s = String::from("\n=== Predictions on test data ===\n\n");
    let _ = writeln!(
        s,
        "{:>6}  {:<20}{:<20}{:>10}{:>10}{:>20}{:>20}",
        "inst#", "actual", "predicted", "p(a)", "p(b)", "nb p(a),p(b)", "svm p(a),p(b)"
    );
    let pair = |p: Option<[f64; 2]>| p.map(|p| format!("{:.4},{:.4}", p[0], p[1])).unwrap_or_else(|| "-".into());
    for r in rows {
        let _ = writeln!(
            s,
            "{:>6}  {:<20}{:<20}{:>10.4}{:>10.4}{:>20}{:>20}",
            r.index + 1,
            r.actual,
            r.predicted,
            r.probabilities[0],
            r.probabilities[1],
            pair(r.nb),
            pair(r.svm)
        );
    }
    s
}

fn display_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Nb => "Naive Bayes",
        ModelKind::Svm => "SVM",
        ModelKind::Hybrid => "SVM + Naive Bayes",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub fit_size: usize,
    pub validation_size: usize,
    pub fallback_to_training_data: bool,
    pub nb_accuracy: Option<f64>,
    pub svm_accuracy: Option<f64>,
}

impl From<&TrainDiagnostics<f64>> for ValidationSummary {
    fn from(d: &TrainDiagnostics<f64>) -> Self {
        Self {
            fit_size: d.fit_size,
            validation_size: d.validation_size,
            fallback_to_training_data: d.validation_fallback,
            nb_accuracy: d.nb_validation_accuracy,
            svm_accuracy: d.svm_validation_accuracy,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonDocument {
    pub format: &'static str,
    pub format_version: u32,
    pub train_sha256: String,
    pub test_sha256: String,
    pub train_instances: usize,
    pub test_instances: usize,
    pub fusion: FusionFile,
    pub validation: ValidationSummary,
    pub rows: Vec<ComparisonRow<f64>>,
}

impl ComparisonDocument {
    pub fn new(c: &Comparison<f64>, train: (&Dataset, &[u8]), test: (&Dataset, &[u8])) -> Self {
        let policy = model_policy(&c.suite.hybrid).expect("hybrid model has a policy");
        Self {
            format: "hybridtext-comparison",
            format_version: REPORT_VERSION,
            train_sha256: crate::model_file::fingerprint(train.1),
            test_sha256: crate::model_file::fingerprint(test.1),
            train_instances: train.0.len(),
            test_instances: test.0.len(),
            fusion: fusion_file(&policy),
            validation: (&c.suite.diagnostics).into(),
            rows: c.rows.clone(),
        }
    }

    /// Accuracy table with training-set and test-set column groups.
    pub fn render_text(&self) -> String {
        let mut s = String::from("=== Accuracy by classifier ===\n\n");
        let _ = writeln!(s, "{:<20}{:>24}{:>24}", "", "Training Set", "Test Set");
        let _ = writeln!(
            s,
            "{:<20}{:>14}{:>10}{:>14}{:>10}",
            "Classifier", "Accuracy %", "Kappa", "Accuracy %", "Kappa"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<20}{:>14.4}{:>10.4}{:>14.4}{:>10.4}",
                display_name(r.model),
                r.train_accuracy_pct,
                r.train_kappa,
                r.test_accuracy_pct,
                r.test_kappa
            );
        }
        let _ = writeln!(
            s,
            "\nInstances: {} training, {} test",
            self.train_instances, self.test_instances
        );
        let f = &self.fusion;
        let weights = match (f.w_nb, f.w_svm, f.tau) {
            (Some(a), Some(b), _) => format!(" (w_nb = {a:.4}, w_svm = {b:.4})"),
            (_, _, Some(t)) => format!(" (tau = {t})"),
            _ => String::new(),
        };
        let _ = writeln!(s, "Fusion: {}{weights}", f.strategy);
        let v = &self.validation;
        if let (Some(a), Some(b)) = (v.nb_accuracy, v.svm_accuracy) {
            let note = if v.fallback_to_training_data {
                " (training split reused; too small to hold out)"
            } else {
                ""
            };
            let _ = writeln!(
                s,
                "Validation accuracy on {} documents: naive Bayes {:.4}, SVM {:.4}{note}",
                v.validation_size, a, b
            );
        }
        s
    }
}
