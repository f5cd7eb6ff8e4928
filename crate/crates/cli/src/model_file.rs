//! Versioned JSON model file: featurization, sub-model parameters, fusion
//! policy and training metadata in one document.

use std::path::Path;

use hybridtext::hybrid::{FusionPolicy, FusionStrategy, HybridModel};
use hybridtext::pipeline::{Classifier, FeatureConfig, Featurizer, TrainDiagnostics};
use hybridtext::svm::PlattParams;
use hybridtext::{LinearSvm, Model, ModelKind, NbModel, PreprocessConfig, SvmParams, Vocabulary};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Hex SHA-256 of raw file contents.
pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub kind: ModelKind,
    pub labels: [String; 2],
    pub preprocess: PreprocessConfig,
    pub features: FeatureConfig,
    pub vocabulary: VocabularyFile,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub naive_bayes: Option<NbFile>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub svm: Option<SvmFile>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fusion: Option<FusionFile>,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabularyFile {
    pub n_docs: u64,
    pub terms: Vec<String>,
    pub doc_freqs: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NbFile {
    pub alpha: f64,
    pub doc_counts: [u64; 2],
    pub mass: [f64; 2],
    /// Non-zero `(term index, count)` pairs per class.
    pub term_counts: [Vec<(usize, f64)>; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvmFile {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    pub bias: f64,
    pub weights: Vec<f64>,
    pub platt_a: f64,
    pub platt_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionFile {
    pub strategy: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub w_nb: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub w_svm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationFile {
    pub fit_size: usize,
    pub validation_size: usize,
    pub fallback_to_training_data: bool,
    pub nb_accuracy: Option<f64>,
    pub svm_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub seed: u64,
    pub trained_at_unix: u64,
    pub dataset_sha256: String,
    pub dataset_rows: usize,
    pub train_class_counts: [u64; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub validation: Option<ValidationFile>,
}

impl Metadata {
    pub fn new(seed: u64, trained_at_unix: u64, dataset: &[u8], model: &Model, diag: Option<&TrainDiagnostics<f64>>) -> Self {
        let counts = model.train_class_counts();
        Self {
            seed,
            trained_at_unix,
            dataset_sha256: fingerprint(dataset),
            dataset_rows: (counts[0] + counts[1]) as usize,
            train_class_counts: counts,
            validation: diag.filter(|d| d.validation_size > 0).map(|d| ValidationFile {
                fit_size: d.fit_size,
                validation_size: d.validation_size,
                fallback_to_training_data: d.validation_fallback,
                nb_accuracy: d.nb_validation_accuracy,
                svm_accuracy: d.svm_validation_accuracy,
            }),
        }
    }
}

fn nb_file(nb: &NbModel) -> NbFile {
    let sparse = |c: usize| {
        nb.term_counts(c)
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0.0)
            .map(|(i, &x)| (i, x))
            .collect()
    };
    NbFile {
        alpha: nb.alpha(),
        doc_counts: nb.doc_counts(),
        mass: nb.mass(),
        term_counts: [sparse(0), sparse(1)],
    }
}

fn svm_file(svm: &LinearSvm<f64>) -> SvmFile {
    let p = svm.params();
    let cal = svm.calibration().expect("persisted SVMs are calibrated");
    SvmFile {
        lambda: p.lambda,
        epochs: p.epochs,
        seed: p.seed,
        bias: svm.bias(),
        weights: svm.weights().to_vec(),
        platt_a: cal.a,
        platt_b: cal.b,
    }
}

pub fn fusion_file(policy: &FusionPolicy<f64>) -> FusionFile {
    let strategy = policy.strategy().to_string();
    match *policy {
        FusionPolicy::SoftVote { w_nb, w_svm } => FusionFile {
            strategy,
            w_nb: Some(w_nb),
            w_svm: Some(w_svm),
            tau: None,
        },
        FusionPolicy::MaxConfidence => FusionFile {
            strategy,
            w_nb: None,
            w_svm: None,
            tau: None,
        },
        FusionPolicy::Cascade { tau } => FusionFile {
            strategy,
            w_nb: None,
            w_svm: None,
            tau: Some(tau),
        },
    }
}

fn incompatible(what: impl std::fmt::Display) -> CliError {
    CliError::Model(format!("incompatible model file: {what}"))
}

impl ModelFile {
    pub fn from_model(model: &Model, metadata: Metadata) -> Self {
        let f = model.featurizer();
        let vocab = f.vocabulary();
        let (naive_bayes, svm, fusion) = match model.classifier() {
            Classifier::NaiveBayes(nb) => (Some(nb_file(nb)), None, None),
            Classifier::Svm(s) => (None, Some(svm_file(s)), None),
            Classifier::Hybrid(h) => (Some(nb_file(h.nb())), Some(svm_file(h.svm())), Some(fusion_file(h.policy()))),
        };
        Self {
            format_version: FORMAT_VERSION,
            kind: model.kind(),
            labels: model.labels().clone(),
            preprocess: f.preprocess_config().clone(),
            features: *f.features(),
            vocabulary: VocabularyFile {
                n_docs: vocab.n_docs(),
                terms: vocab.terms().to_vec(),
                doc_freqs: vocab.doc_freqs().to_vec(),
            },
            naive_bayes,
            svm,
            fusion,
            metadata,
        }
    }

    pub fn to_model(&self) -> Result<Model, CliError> {
        let vocab = Vocabulary::from_parts(
            self.vocabulary.terms.clone(),
            self.vocabulary.doc_freqs.clone(),
            self.vocabulary.n_docs,
        )?;
        let v = vocab.len();
        let featurizer = Featurizer::from_parts(self.preprocess.clone(), vocab, self.features);
        let nb = || -> Result<NbModel, CliError> {
            let nb = self
                .naive_bayes
                .as_ref()
                .ok_or_else(|| incompatible("missing naive_bayes section"))?;
            let mut dense = [vec![0.0; v], vec![0.0; v]];
            for (row, pairs) in dense.iter_mut().zip(&nb.term_counts) {
                for &(i, x) in pairs {
                    *row.get_mut(i)
                        .ok_or_else(|| incompatible(format!("term index {i} beyond vocabulary of {v}")))? = x;
                }
            }
            NbModel::from_counts(nb.alpha, nb.doc_counts, dense, nb.mass).map_err(incompatible)
        };
        let svm = || -> Result<LinearSvm<f64>, CliError> {
            let s = self.svm.as_ref().ok_or_else(|| incompatible("missing svm section"))?;
            let params = SvmParams {
                lambda: s.lambda,
                epochs: s.epochs,
                seed: s.seed,
            };
            let cal = PlattParams {
                a: s.platt_a,
                b: s.platt_b,
            };
            LinearSvm::from_parts(s.weights.clone(), s.bias, params, Some(cal)).map_err(incompatible)
        };
        let classifier = match self.kind {
            ModelKind::Nb => Classifier::NaiveBayes(nb()?),
            ModelKind::Svm => Classifier::Svm(svm()?),
            ModelKind::Hybrid => {
                let f = self.fusion.as_ref().ok_or_else(|| incompatible("missing fusion section"))?;
                let policy = match f.strategy.parse::<FusionStrategy>().map_err(incompatible)? {
                    FusionStrategy::SoftVote => match (f.w_nb, f.w_svm) {
                        (Some(a), Some(b)) => FusionPolicy::soft_vote(a, b).map_err(incompatible)?,
                        _ => return Err(incompatible("soft-vote policy without weights")),
                    },
                    FusionStrategy::MaxConfidence => FusionPolicy::MaxConfidence,
                    FusionStrategy::Cascade => {
                        FusionPolicy::cascade(f.tau.ok_or_else(|| incompatible("cascade policy without tau"))?)
                            .map_err(incompatible)?
                    }
                };
                Classifier::Hybrid(HybridModel::new(nb()?, svm()?, policy).map_err(incompatible)?)
            }
        };
        Model::new(self.labels.clone(), featurizer, classifier, self.metadata.train_class_counts).map_err(incompatible)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| incompatible(format!("not JSON ({e})")))?;
        match value.get("format_version").and_then(|v| v.as_u64()) {
            Some(v) if v == FORMAT_VERSION as u64 => {}
            Some(v) => {
                return Err(incompatible(format!(
                    "format version {v}, this build reads version {FORMAT_VERSION}"
                )))
            }
            None => return Err(incompatible("no format_version field")),
        }
        serde_json::from_value(value).map_err(incompatible)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }
}
