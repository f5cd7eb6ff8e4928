//! Binary text classification with multinomial naive Bayes, a Pegasos
//! linear SVM and their fusion, plus WEKA-style evaluation.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choices.

pub mod corpus;
pub mod distribution;
pub mod eval;
pub mod features;
pub mod hybrid;
pub mod naive_bayes;
pub mod pipeline;
pub mod preprocess;
pub mod scalar;
pub mod svm;
pub mod synthetic;

pub use corpus::{CsvSchema, Dataset, SplitSpec};
pub use distribution::ClassDistribution;
pub use eval::{EvaluationReport, PredictionRecord, PriorModel};
pub use features::{SparseVector, Vocabulary, WeightingScheme};
pub use hybrid::{FusionPolicy, FusionStrategy, HybridModel};
pub use naive_bayes::MultinomialNb;
pub use pipeline::{ModelKind, PipelineError, TextModel, TrainConfig};
pub use preprocess::{PreprocessConfig, TokenList};
pub use scalar::Scalar;
pub use svm::{LinearSvm, SvmParams};

pub type NbModel = MultinomialNb<f64>;
pub type SvmModel = LinearSvm<f64>;
pub type Hybrid = HybridModel<f64>;
pub type Model = TextModel<f64>;
pub type Distribution = ClassDistribution<f64>;
pub type Report = EvaluationReport<f64>;
pub type Config = TrainConfig<f64>;

pub type NbModel32 = MultinomialNb<f32>;
pub type SvmModel32 = LinearSvm<f32>;
pub type Hybrid32 = HybridModel<f32>;
pub type Model32 = TextModel<f32>;
pub type Distribution32 = ClassDistribution<f32>;
pub type Report32 = EvaluationReport<f32>;
pub type Config32 = TrainConfig<f32>;
