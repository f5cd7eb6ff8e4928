//! End-to-end training and prediction: preprocessing, one shared vocabulary,
//! tf vectors for naive Bayes and l2-normalized tf-idf vectors for the SVM.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{split_positions, CorpusError, Dataset, SplitSpec};
use crate::distribution::ClassDistribution;
use crate::eval::{full_report, EvalError, EvaluationReport, PredictionRecord, PriorModel};
use crate::features::{l2_normalize, vectorize, FeatureError, SparseVector, Vocabulary, WeightingScheme};
use crate::hybrid::{FusionError, FusionPolicy, HybridModel};
use crate::naive_bayes::{MultinomialNb, NbError};
use crate::preprocess::{preprocess, PreprocessConfig, TokenList};
use crate::scalar::Scalar;
use crate::svm::{class_sign, LinearSvm, SvmError, SvmParams};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    NaiveBayes(#[from] NbError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("training data contains a single class (`{label}` has every one of {count} documents)")]
    SingleClass { label: String, count: usize },
    #[error("no term survives preprocessing and min_df; the vocabulary is empty")]
    EmptyVocabulary,
    #[error("dataset labels ({found:?}) do not match the model labels ({expected:?})")]
    LabelMismatch { expected: [String; 2], found: [String; 2] },
    #[error("inconsistent model: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Nb,
    Svm,
    Hybrid,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Nb, ModelKind::Svm, ModelKind::Hybrid];
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Nb => "nb",
            Self::Svm => "svm",
            Self::Hybrid => "hybrid",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nb" => Ok(Self::Nb),
            "svm" => Ok(Self::Svm),
            "hybrid" => Ok(Self::Hybrid),
            other => Err(format!("unknown model kind `{other}` (expected nb, svm or hybrid)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub min_df: u64,
    pub max_features: Option<usize>,
    pub nb_scheme: WeightingScheme,
    pub svm_scheme: WeightingScheme,
    pub svm_l2_normalize: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            min_df: 1,
            max_features: None,
            nb_scheme: WeightingScheme::Tf,
            svm_scheme: WeightingScheme::TfIdf,
            svm_l2_normalize: true,
        }
    }
}

/// Preprocessing plus vocabulary: everything needed to turn raw text into
/// the two feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Featurizer {
    preprocess: PreprocessConfig,
    vocabulary: Vocabulary,
    features: FeatureConfig,
}

impl Featurizer {
    /// Build the vocabulary from `texts`; also returns their token lists.
    pub fn fit<'a>(
        texts: impl IntoIterator<Item = &'a str>,
        preprocess_config: PreprocessConfig,
        features: FeatureConfig,
    ) -> Result<(Self, Vec<TokenList>), PipelineError> {
        let tokens: Vec<TokenList> = texts.into_iter().map(|t| preprocess(t, &preprocess_config)).collect();
        let vocabulary = Vocabulary::build(&tokens, features.min_df, features.max_features)?;
        if vocabulary.is_empty() {
            return Err(PipelineError::EmptyVocabulary);
        }
        Ok((
            Self {
                preprocess: preprocess_config,
                vocabulary,
                features,
            },
            tokens,
        ))
    }

    pub fn from_parts(preprocess: PreprocessConfig, vocabulary: Vocabulary, features: FeatureConfig) -> Self {
        Self {
            preprocess,
            vocabulary,
            features,
        }
    }

    pub fn preprocess_config(&self) -> &PreprocessConfig {
        &self.preprocess
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn features(&self) -> &FeatureConfig {
        &self.features
    }

    pub fn tokens(&self, text: &str) -> TokenList {
        preprocess(text, &self.preprocess)
    }

    pub fn nb_vector<F: Scalar>(&self, tokens: &TokenList) -> SparseVector<F> {
        vectorize(tokens, &self.vocabulary, self.features.nb_scheme)
    }

    pub fn svm_vector<F: Scalar>(&self, tokens: &TokenList) -> SparseVector<F> {
        let v = vectorize(tokens, &self.vocabulary, self.features.svm_scheme);
        if self.features.svm_l2_normalize {
            l2_normalize(&v)
        } else {
            v
        }
    }
}

/// Every training tunable.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<F> {
    pub preprocess: PreprocessConfig,
    pub features: FeatureConfig,
    pub alpha: F,
    pub lambda: F,
    pub epochs: usize,
    pub seed: u64,
    /// Share of the training split held out for calibration and fusion weights.
    pub validation_fraction: f64,
    /// `None` learns soft-vote weights from validation accuracy.
    pub fusion: Option<FusionPolicy<F>>,
}

impl<F: Scalar> Default for TrainConfig<F> {
    fn default() -> Self {
        let svm = SvmParams::<F>::default();
        Self {
            preprocess: PreprocessConfig::default(),
            features: FeatureConfig::default(),
            alpha: F::one(),
            lambda: svm.lambda,
            epochs: svm.epochs,
            seed: 0,
            validation_fraction: 0.2,
            fusion: None,
        }
    }
}

impl<F: Scalar> TrainConfig<F> {
    pub fn svm_params(&self) -> SvmParams<F> {
        SvmParams {
            lambda: self.lambda,
            epochs: self.epochs,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier<F> {
    NaiveBayes(MultinomialNb<F>),
    Svm(LinearSvm<F>),
    Hybrid(HybridModel<F>),
}

impl<F: Scalar> Classifier<F> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Self::NaiveBayes(_) => ModelKind::Nb,
            Self::Svm(_) => ModelKind::Svm,
            Self::Hybrid(_) => ModelKind::Hybrid,
        }
    }
}

/// The fused (or single-model) distribution plus the member distributions
/// that went into it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction<F> {
    pub distribution: ClassDistribution<F>,
    pub nb: Option<ClassDistribution<F>>,
    pub svm: Option<ClassDistribution<F>>,
}

impl<F: Scalar> Prediction<F> {
    pub fn label(&self) -> usize {
        self.distribution.argmax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorSource {
    Train,
    Test,
}

impl FromStr for PriorSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Self::Train),
            "test" => Ok(Self::Test),
            other => Err(format!("unknown prior source `{other}` (expected train or test)")),
        }
    }
}

/// A trained classifier together with its featurization.
#[derive(Debug, Clone, PartialEq)]
pub struct TextModel<F> {
    labels: [String; 2],
    featurizer: Featurizer,
    classifier: Classifier<F>,
    train_class_counts: [u64; 2],
}

impl<F: Scalar> TextModel<F> {
    pub fn new(
        labels: [String; 2],
        featurizer: Featurizer,
        classifier: Classifier<F>,
        train_class_counts: [u64; 2],
    ) -> Result<Self, PipelineError> {
        let v = featurizer.vocabulary().len();
        let dims: Vec<usize> = match &classifier {
            Classifier::NaiveBayes(nb) => vec![nb.vocab_size()],
            Classifier::Svm(svm) => {
                if svm.calibration().is_none() {
                    return Err(SvmError::Uncalibrated.into());
                }
                vec![svm.dim()]
            }
            Classifier::Hybrid(h) => vec![h.nb().vocab_size(), h.svm().dim()],
        };
        if dims.iter().any(|&d| d != v) {
            return Err(PipelineError::Inconsistent(format!(
                "vocabulary has {v} terms but the classifier expects {dims:?}"
            )));
        }
        if labels[0] == labels[1] {
            return Err(CorpusError::DuplicateLabel(labels[0].clone()).into());
        }
        Ok(Self {
            labels,
            featurizer,
            classifier,
            train_class_counts,
        })
    }

    pub fn labels(&self) -> &[String; 2] {
        &self.labels
    }

    pub fn featurizer(&self) -> &Featurizer {
        &self.featurizer
    }

    pub fn classifier(&self) -> &Classifier<F> {
        &self.classifier
    }

    pub fn kind(&self) -> ModelKind {
        self.classifier.kind()
    }

    pub fn train_class_counts(&self) -> [u64; 2] {
        self.train_class_counts
    }

    pub fn predict_tokens(&self, tokens: &TokenList) -> Prediction<F> {
        let f = &self.featurizer;
        match &self.classifier {
            Classifier::NaiveBayes(nb) => {
                let d = nb.predict(&f.nb_vector(tokens));
                Prediction {
                    distribution: d,
                    nb: Some(d),
                    svm: None,
                }
            }
            Classifier::Svm(svm) => {
                let d = svm.predict(&f.svm_vector(tokens)).expect("calibrated at construction");
                Prediction {
                    distribution: d,
                    nb: None,
                    svm: Some(d),
                }
            }
            Classifier::Hybrid(h) => {
                let (fused, nb, svm) = h.predict_vectors(&f.nb_vector(tokens), &f.svm_vector(tokens));
                Prediction {
                    distribution: fused,
                    nb: Some(nb),
                    svm: Some(svm),
                }
            }
        }
    }

    pub fn predict_text(&self, text: &str) -> Prediction<F> {
        self.predict_tokens(&self.featurizer.tokens(text))
    }

    /// Predictions for every document, after checking the label names agree.
    pub fn predict_dataset(&self, dataset: &Dataset) -> Result<Vec<(usize, Prediction<F>)>, PipelineError> {
        let found = dataset.label_names().map(str::to_string);
        if found != self.labels {
            return Err(PipelineError::LabelMismatch {
                expected: self.labels.clone(),
                found,
            });
        }
        Ok(dataset
            .documents()
            .iter()
            .map(|d| (d.label, self.predict_text(&d.text)))
            .collect())
    }

    pub fn prior(&self, dataset: &Dataset, source: PriorSource) -> Result<PriorModel<F>, PipelineError> {
        let counts = match source {
            PriorSource::Train => self.train_class_counts,
            PriorSource::Test => dataset.class_counts().map(|c| c as u64),
        };
        Ok(PriorModel::from_counts(counts)?)
    }

    pub fn evaluate(&self, dataset: &Dataset, source: PriorSource) -> Result<EvaluationReport<F>, PipelineError> {
        let records: Vec<PredictionRecord<F>> = self
            .predict_dataset(dataset)?
            .into_iter()
            .map(|(actual, p)| PredictionRecord::new(actual, p.distribution))
            .collect();
        let prior = self.prior(dataset, source)?;
        let names = [self.labels[0].as_str(), self.labels[1].as_str()];
        Ok(full_report(&records, &prior, names)?)
    }
}

/// What happened on the validation slice during training.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainDiagnostics<F> {
    pub fit_size: usize,
    pub validation_size: usize,
    /// True when the training split was too small to hold out a stratified
    /// slice and the whole split served as validation data.
    pub validation_fallback: bool,
    pub nb_validation_accuracy: Option<F>,
    pub svm_validation_accuracy: Option<F>,
    pub svm_objectives: Vec<F>,
    pub platt_iterations: Option<usize>,
    pub policy: Option<FusionPolicy<F>>,
}

struct Prepared<F> {
    labels: [String; 2],
    featurizer: Featurizer,
    nb_vectors: Vec<SparseVector<F>>,
    svm_vectors: Vec<SparseVector<F>>,
    targets: Vec<usize>,
    class_counts: [u64; 2],
}

impl<F: Scalar> Prepared<F> {
    fn new(dataset: &Dataset, cfg: &TrainConfig<F>) -> Result<Self, PipelineError> {
        let counts = dataset.class_counts();
        for (c, &count) in counts.iter().enumerate() {
            if count == dataset.len() {
                return Err(PipelineError::SingleClass {
                    label: dataset.label_names()[c].to_string(),
                    count,
                });
            }
        }
        let (featurizer, tokens) = Featurizer::fit(dataset.texts(), cfg.preprocess.clone(), cfg.features)?;
        Ok(Self {
            labels: dataset.label_names().map(str::to_string),
            nb_vectors: tokens.iter().map(|t| featurizer.nb_vector(t)).collect(),
            svm_vectors: tokens.iter().map(|t| featurizer.svm_vector(t)).collect(),
            featurizer,
            targets: dataset.label_indices(),
            class_counts: counts.map(|c| c as u64),
        })
    }

    fn dim(&self) -> usize {
        self.featurizer.vocabulary().len()
    }

    fn model(&self, classifier: Classifier<F>) -> Result<TextModel<F>, PipelineError> {
        TextModel::new(self.labels.clone(), self.featurizer.clone(), classifier, self.class_counts)
    }
}

fn pick<T: Clone>(items: &[T], positions: &[usize]) -> Vec<T> {
    positions.iter().map(|&p| items[p].clone()).collect()
}

fn accuracy_of<F: Scalar>(predicted: impl Iterator<Item = usize>, actual: &[usize]) -> F {
    let correct = predicted.zip(actual).filter(|(p, a)| p == *a).count();
    F::from_count(correct as u64) / F::from_count(actual.len() as u64)
}

/// All three models trained from one featurization, with the NB and SVM
/// members of the hybrid identical to the standalone models.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedSuite<F> {
    pub nb: TextModel<F>,
    pub svm: TextModel<F>,
    pub hybrid: TextModel<F>,
    pub diagnostics: TrainDiagnostics<F>,
}

impl<F: Scalar> TrainedSuite<F> {
    pub fn get(&self, kind: ModelKind) -> &TextModel<F> {
        match kind {
            ModelKind::Nb => &self.nb,
            ModelKind::Svm => &self.svm,
            ModelKind::Hybrid => &self.hybrid,
        }
    }
}

type Parts<F> = (MultinomialNb<F>, LinearSvm<F>, FusionPolicy<F>, TrainDiagnostics<F>);

fn train_parts<F: Scalar>(prep: &Prepared<F>, cfg: &TrainConfig<F>) -> Result<Parts<F>, PipelineError> {
    let nb = MultinomialNb::train(&prep.nb_vectors, &prep.targets, prep.dim(), cfg.alpha)?;
    let names = [prep.labels[0].as_str(), prep.labels[1].as_str()];
    let spec = SplitSpec::new(cfg.validation_fraction, cfg.seed);
    let (fit, holdout, fallback) = match split_positions(&prep.targets, names, &spec) {
        Ok((fit, holdout)) => (fit, holdout, false),
        Err(CorpusError::InfeasibleSplit { .. }) => {
            let all: Vec<usize> = (0..prep.targets.len()).collect();
            (all.clone(), all, true)
        }
        Err(e) => return Err(e.into()),
    };

    let fit_targets = pick(&prep.targets, &fit);
    let fit_signs: Vec<i8> = fit_targets.iter().map(|&c| class_sign(c)).collect();
    let (mut svm, log) = LinearSvm::train(&pick(&prep.svm_vectors, &fit), &fit_signs, prep.dim(), cfg.svm_params())?;

    let hold_targets = pick(&prep.targets, &holdout);
    let hold_svm = pick(&prep.svm_vectors, &holdout);
    let hold_signs: Vec<i8> = hold_targets.iter().map(|&c| class_sign(c)).collect();
    let platt = svm.calibrate(&hold_svm, &hold_signs)?;

    let nb_fit = MultinomialNb::train(&pick(&prep.nb_vectors, &fit), &fit_targets, prep.dim(), cfg.alpha)?;
    let acc_nb: F = accuracy_of(
        holdout.iter().map(|&p| nb_fit.predict(&prep.nb_vectors[p]).argmax()),
        &hold_targets,
    );
    let acc_svm: F = accuracy_of(
        hold_svm.iter().map(|x| svm.predict(x).expect("calibrated above").argmax()),
        &hold_targets,
    );
    let policy = match cfg.fusion {
        Some(p) => {
            p.validate()?;
            p
        }
        None => FusionPolicy::from_accuracies(acc_nb, acc_svm),
    };
    let diagnostics = TrainDiagnostics {
        fit_size: fit.len(),
        validation_size: holdout.len(),
        validation_fallback: fallback,
        nb_validation_accuracy: Some(acc_nb),
        svm_validation_accuracy: Some(acc_svm),
        svm_objectives: log.objectives,
        platt_iterations: Some(platt.iterations),
        policy: Some(policy),
    };
    Ok((nb, svm, policy, diagnostics))
}

pub fn train_suite<F: Scalar>(dataset: &Dataset, cfg: &TrainConfig<F>) -> Result<TrainedSuite<F>, PipelineError> {
    let prep = Prepared::new(dataset, cfg)?;
    let (nb, svm, policy, diagnostics) = train_parts(&prep, cfg)?;
    let hybrid = HybridModel::new(nb.clone(), svm.clone(), policy)?;
    Ok(TrainedSuite {
        nb: prep.model(Classifier::NaiveBayes(nb))?,
        svm: prep.model(Classifier::Svm(svm))?,
        hybrid: prep.model(Classifier::Hybrid(hybrid))?,
        diagnostics,
    })
}

/// Train one model kind. The NB model sees the whole training split; the SVM
/// (alone or as a hybrid member) is fitted on the non-validation part and
/// calibrated on the validation slice.
pub fn train_model<F: Scalar>(
    dataset: &Dataset,
    cfg: &TrainConfig<F>,
    kind: ModelKind,
) -> Result<(TextModel<F>, TrainDiagnostics<F>), PipelineError> {
    let prep = Prepared::new(dataset, cfg)?;
    if kind == ModelKind::Nb {
        let nb = MultinomialNb::train(&prep.nb_vectors, &prep.targets, prep.dim(), cfg.alpha)?;
        let diagnostics = TrainDiagnostics {
            fit_size: prep.targets.len(),
            validation_size: 0,
            validation_fallback: false,
            nb_validation_accuracy: None,
            svm_validation_accuracy: None,
            svm_objectives: Vec::new(),
            platt_iterations: None,
            policy: None,
        };
        return Ok((prep.model(Classifier::NaiveBayes(nb))?, diagnostics));
    }
    let (nb, svm, policy, diagnostics) = train_parts(&prep, cfg)?;
    let classifier = match kind {
        ModelKind::Svm => Classifier::Svm(svm),
        _ => Classifier::Hybrid(HybridModel::new(nb, svm, policy)?),
    };
    Ok((prep.model(classifier)?, diagnostics))
}

/// Accuracy and kappa of one model on the training and test splits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow<F> {
    pub model: ModelKind,
    pub train_accuracy_pct: F,
    pub train_kappa: F,
    pub test_accuracy_pct: F,
    pub test_kappa: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison<F> {
    pub rows: Vec<ComparisonRow<F>>,
    pub suite: TrainedSuite<F>,
}

impl<F: Scalar> Comparison<F> {
    pub fn row(&self, kind: ModelKind) -> &ComparisonRow<F> {
        self.rows.iter().find(|r| r.model == kind).expect("all kinds present")
    }
}

fn accuracy_and_kappa<F: Scalar>(model: &TextModel<F>, data: &Dataset) -> Result<(F, F), PipelineError> {
    let records: Vec<PredictionRecord<F>> = model
        .predict_dataset(data)?
        .into_iter()
        .map(|(a, p)| PredictionRecord::new(a, p.distribution))
        .collect();
    let cm = crate::eval::ConfusionMatrix::from_predictions(&records, data.label_names())?;
    Ok((crate::eval::accuracy(&cm)?, crate::eval::kappa(&cm)?))
}

/// Train NB, SVM and the hybrid on `train` and score all three on both
/// splits.
pub fn compare<F: Scalar>(train: &Dataset, test: &Dataset, cfg: &TrainConfig<F>) -> Result<Comparison<F>, PipelineError> {
    let suite = train_suite(train, cfg)?;
    let mut rows = Vec::with_capacity(3);
    for kind in ModelKind::ALL {
        let model = suite.get(kind);
        let (train_accuracy_pct, train_kappa) = accuracy_and_kappa(model, train)?;
        let (test_accuracy_pct, test_kappa) = accuracy_and_kappa(model, test)?;
        rows.push(ComparisonRow {
            model: kind,
            train_accuracy_pct,
            train_kappa,
            test_accuracy_pct,
            test_kappa,
        });
    }
    Ok(Comparison { rows, suite })
}
