use std::path::Path;

use hybridtext::corpus::CorpusError;
use hybridtext::eval::EvalError;
use hybridtext::features::FeatureError;
use hybridtext::hybrid::FusionError;
use hybridtext::naive_bayes::NbError;
use hybridtext::svm::SvmError;
use hybridtext::PipelineError;
use thiserror::Error;

/// Failure of a command, classified by process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Argument(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Model(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Argument(_) => 2,
            Self::Io(_) => 3,
            Self::Data(_) => 4,
            Self::Model(_) => 5,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::Io(format!("{}: {err}", path.display()))
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } => Self::Io(e.to_string()),
            CorpusError::InvalidFraction(f) => {
                Self::Argument(format!("--test-fraction must lie strictly between 0 and 1, got {f}"))
            }
            CorpusError::DuplicateLabel(_) => Self::Argument(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        match e {
            FeatureError::InvalidMinDf | FeatureError::InvalidMaxFeatures | FeatureError::UnknownScheme(_) => {
                Self::Argument(e.to_string())
            }
            FeatureError::EmptyCorpus => Self::Data(e.to_string()),
            FeatureError::Inconsistent(_) => Self::Model(e.to_string()),
        }
    }
}

impl From<NbError> for CliError {
    fn from(e: NbError) -> Self {
        match e {
            NbError::InvalidAlpha => Self::Argument(e.to_string()),
            NbError::Inconsistent(_) => Self::Model(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

impl From<SvmError> for CliError {
    fn from(e: SvmError) -> Self {
        match e {
            SvmError::InvalidLambda | SvmError::InvalidEpochs => Self::Argument(e.to_string()),
            SvmError::Inconsistent(_) | SvmError::Uncalibrated | SvmError::IndexOutOfRange { .. } => Self::Model(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

impl From<FusionError> for CliError {
    fn from(e: FusionError) -> Self {
        match e {
            FusionError::VocabularyMismatch { .. } | FusionError::Uncalibrated => Self::Model(e.to_string()),
            _ => Self::Argument(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        Self::Data(e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Corpus(e) => e.into(),
            PipelineError::Features(e) => e.into(),
            PipelineError::NaiveBayes(e) => e.into(),
            PipelineError::Svm(e) => e.into(),
            PipelineError::Fusion(e) => e.into(),
            PipelineError::Eval(e) => e.into(),
            PipelineError::SingleClass { .. } | PipelineError::EmptyVocabulary => Self::Data(e.to_string()),
            PipelineError::LabelMismatch { .. } | PipelineError::Inconsistent(_) => Self::Model(e.to_string()),
        }
    }
}
