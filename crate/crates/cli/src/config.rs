//! Run configuration: a TOML file of tunables, overridable from the command
//! line.

use std::path::{Path, PathBuf};

use clap::Args;
use hybridtext::hybrid::{FusionPolicy, FusionStrategy};
use hybridtext::pipeline::FeatureConfig;
use hybridtext::{Config, CsvSchema, PreprocessConfig, WeightingScheme};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    pub min_df: u64,
    pub max_features: Option<usize>,
    pub nb_scheme: WeightingScheme,
    pub svm_scheme: WeightingScheme,
    pub svm_l2_normalize: bool,
    pub fusion: String,
    pub w_nb: Option<f64>,
    pub w_svm: Option<f64>,
    pub tau: f64,
    pub test_fraction: f64,
    pub validation_fraction: f64,
    pub lowercase: bool,
    pub remove_stopwords: bool,
    pub stopword_file: Option<PathBuf>,
    pub min_token_length: usize,
    pub strip_plural_s: bool,
    pub label_column: String,
    pub text_column: String,
    pub labels: Option<[String; 2]>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            lambda: 1e-4,
            epochs: 20,
            seed: 0,
            min_df: 1,
            max_features: None,
            nb_scheme: WeightingScheme::Tf,
            svm_scheme: WeightingScheme::TfIdf,
            svm_l2_normalize: true,
            fusion: "soft-vote".to_string(),
            w_nb: None,
            w_svm: None,
            tau: 0.9,
            test_fraction: 0.2,
            validation_fraction: 0.2,
            lowercase: true,
            remove_stopwords: true,
            stopword_file: None,
            min_token_length: 2,
            strip_plural_s: false,
            label_column: "label".to_string(),
            text_column: "text".to_string(),
            labels: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Argument(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| CliError::Argument(format!("{}: {e}", path.display())))
    }

    /// Defaults, then the file named by `--config`, then explicit flags.
    pub fn resolve(config: Option<&Path>, overrides: &TuningArgs) -> Result<Self, CliError> {
        let mut cfg = match config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        overrides.apply(&mut cfg);
        Ok(cfg)
    }

    pub fn schema(&self) -> CsvSchema {
        CsvSchema {
            label_column: self.label_column.clone(),
            text_column: self.text_column.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn fusion_policy(&self) -> Result<Option<FusionPolicy<f64>>, CliError> {
        let strategy: FusionStrategy = self.fusion.parse()?;
        Ok(match strategy {
            FusionStrategy::SoftVote => match (self.w_nb, self.w_svm) {
                (None, None) => None,
                (Some(a), Some(b)) => Some(FusionPolicy::soft_vote(a, b)?),
                _ => return Err(CliError::Argument("--w-nb and --w-svm must be given together".into())),
            },
            FusionStrategy::MaxConfidence => Some(FusionPolicy::MaxConfidence),
            FusionStrategy::Cascade => Some(FusionPolicy::cascade(self.tau)?),
        })
    }

    pub fn preprocess(&self) -> Result<PreprocessConfig, CliError> {
        let mut p = PreprocessConfig {
            lowercase: self.lowercase,
            min_token_length: self.min_token_length,
            strip_plural_s: self.strip_plural_s,
            ..PreprocessConfig::default()
        };
        if p.min_token_length == 0 {
            return Err(CliError::Argument("--min-token-length must be at least 1".into()));
        }
        if !self.remove_stopwords {
            p = p.without_stopwords();
        } else if let Some(path) = &self.stopword_file {
            p = p.with_stopword_file(path).map_err(|e| CliError::io(path, e))?;
        }
        Ok(p)
    }

    pub fn train_config(&self) -> Result<Config, CliError> {
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(CliError::Argument(format!(
                "--validation-fraction must lie strictly between 0 and 1, got {}",
                self.validation_fraction
            )));
        }
        Ok(Config {
            preprocess: self.preprocess()?,
            features: FeatureConfig {
                min_df: self.min_df,
                max_features: self.max_features,
                nb_scheme: self.nb_scheme,
                svm_scheme: self.svm_scheme,
                svm_l2_normalize: self.svm_l2_normalize,
            },
            alpha: self.alpha,
            lambda: self.lambda,
            epochs: self.epochs,
            seed: self.seed,
            validation_fraction: self.validation_fraction,
            fusion: self.fusion_policy()?,
        })
    }
}

fn parse_labels(s: &str) -> Result<[String; 2], String> {
    match s.split(',').map(str::trim).collect::<Vec<_>>().as_slice() {
        [a, b] if !a.is_empty() && !b.is_empty() => Ok([a.to_string(), b.to_string()]),
        _ => Err(format!("expected two comma-separated labels, got `{s}`")),
    }
}

/// Command-line overrides for [`RunConfig`] keys.
#[derive(Debug, Clone, Default, Args)]
pub struct TuningArgs {
    /// Laplace smoothing for naive Bayes.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// SVM regularization strength.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Seed for the validation slice and SVM shuffling.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub min_df: Option<u64>,
    #[arg(long)]
    pub max_features: Option<usize>,
    /// binary, tf or tfidf.
    #[arg(long)]
    pub nb_scheme: Option<WeightingScheme>,
    /// binary, tf or tfidf.
    #[arg(long)]
    pub svm_scheme: Option<WeightingScheme>,
    /// soft-vote, max-confidence or cascade.
    #[arg(long)]
    pub fusion: Option<String>,
    /// Fixed soft-vote weight of naive Bayes (with --w-svm).
    #[arg(long)]
    pub w_nb: Option<f64>,
    /// Fixed soft-vote weight of the SVM (with --w-nb).
    #[arg(long)]
    pub w_svm: Option<f64>,
    /// Cascade confidence threshold.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    #[arg(long)]
    pub stopword_file: Option<PathBuf>,
    /// Keep stopwords.
    #[arg(long)]
    pub keep_stopwords: bool,
    #[arg(long)]
    pub min_token_length: Option<usize>,
    #[arg(long)]
    pub strip_plural_s: bool,
    #[arg(long)]
    pub label_column: Option<String>,
    #[arg(long)]
    pub text_column: Option<String>,
    /// Declared label order, e.g. `spam,ham`.
    #[arg(long, value_parser = parse_labels)]
    pub labels: Option<[String; 2]>,
}

impl TuningArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { cfg.$field = v.clone(); })*
            };
        }
        set!(
            alpha,
            lambda,
            epochs,
            seed,
            min_df,
            nb_scheme,
            svm_scheme,
            fusion,
            tau,
            validation_fraction,
            min_token_length,
            label_column,
            text_column
        );
        if self.max_features.is_some() {
            cfg.max_features = self.max_features;
        }
        if self.w_nb.is_some() {
            cfg.w_nb = self.w_nb;
        }
        if self.w_svm.is_some() {
            cfg.w_svm = self.w_svm;
        }
        if self.stopword_file.is_some() {
            cfg.stopword_file = self.stopword_file.clone();
        }
        if self.labels.is_some() {
            cfg.labels = self.labels.clone();
        }
        if self.keep_stopwords {
            cfg.remove_stopwords = false;
        }
        if self.strip_plural_s {
            cfg.strip_plural_s = true;
        }
    }
}
