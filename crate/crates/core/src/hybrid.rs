//! Fusion of naive Bayes and SVM class distributions.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::distribution::ClassDistribution;
use crate::naive_bayes::MultinomialNb;
use crate::scalar::Scalar;
use crate::svm::LinearSvm;

#[derive(Debug, Error, PartialEq)]
pub enum FusionError {
    #[error("soft-vote weights must be non-negative and sum to 1, got ({0}, {1})")]
    InvalidWeights(f64, f64),
    #[error("cascade threshold must lie in [0.5, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("unknown fusion strategy `{0}` (expected soft-vote, max-confidence or cascade)")]
    UnknownStrategy(String),
    #[error("sub-models disagree on vocabulary size ({nb} vs {svm})")]
    VocabularyMismatch { nb: usize, svm: usize },
    #[error("the SVM member must be calibrated")]
    Uncalibrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionStrategy {
    SoftVote,
    MaxConfidence,
    Cascade,
}

impl fmt::Display for FusionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SoftVote => "soft-vote",
            Self::MaxConfidence => "max-confidence",
            Self::Cascade => "cascade",
        })
    }
}

impl FromStr for FusionStrategy {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "soft-vote" | "soft_vote" | "softvote" => Ok(Self::SoftVote),
            "max-confidence" | "max_confidence" => Ok(Self::MaxConfidence),
            "cascade" => Ok(Self::Cascade),
            other => Err(FusionError::UnknownStrategy(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FusionPolicy<F> {
    /// Weighted average `w_nb * d_nb + w_svm * d_svm`.
    SoftVote { w_nb: F, w_svm: F },
    /// Whichever member is more confident; ties go to the SVM.
    MaxConfidence,
    /// The SVM answer when its top probability reaches `tau`, else NB.
    Cascade { tau: F },
}

impl<F: Scalar> FusionPolicy<F> {
    pub fn soft_vote(w_nb: F, w_svm: F) -> Result<Self, FusionError> {
        let p = Self::SoftVote { w_nb, w_svm };
        p.validate()?;
        Ok(p)
    }

    pub fn cascade(tau: F) -> Result<Self, FusionError> {
        let p = Self::Cascade { tau };
        p.validate()?;
        Ok(p)
    }

    /// Soft vote with weights proportional to validation accuracies. Two zero
    /// accuracies give equal weights.
    pub fn from_accuracies(acc_nb: F, acc_svm: F) -> Self {
        let total = acc_nb + acc_svm;
        if total <= F::zero() {
            let half = F::lit(0.5);
            return Self::SoftVote { w_nb: half, w_svm: half };
        }
        Self::SoftVote {
            w_nb: acc_nb / total,
            w_svm: acc_svm / total,
        }
    }

    pub fn strategy(&self) -> FusionStrategy {
        match self {
            Self::SoftVote { .. } => FusionStrategy::SoftVote,
            Self::MaxConfidence => FusionStrategy::MaxConfidence,
            Self::Cascade { .. } => FusionStrategy::Cascade,
        }
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        match *self {
            Self::SoftVote { w_nb, w_svm } => {
                let ok = w_nb >= F::zero()
                    && w_svm >= F::zero()
                    && w_nb.is_finite()
                    && w_svm.is_finite()
                    && (w_nb + w_svm - F::one()).abs() <= F::lit(1e-12).max(F::epsilon() * F::lit(4.0));
                if !ok {
                    return Err(FusionError::InvalidWeights(w_nb.to_f64_lossy(), w_svm.to_f64_lossy()));
                }
            }
            Self::Cascade { tau } => {
                if !(tau >= F::lit(0.5) && tau <= F::one()) {
                    return Err(FusionError::InvalidThreshold(tau.to_f64_lossy()));
                }
            }
            Self::MaxConfidence => {}
        }
        Ok(())
    }
}

impl<F: Scalar> fmt::Display for FusionPolicy<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SoftVote { w_nb, w_svm } => write!(f, "soft-vote (w_nb = {w_nb:.4}, w_svm = {w_svm:.4})"),
            Self::MaxConfidence => f.write_str("max-confidence"),
            Self::Cascade { tau } => write!(f, "cascade (tau = {tau})"),
        }
    }
}

/// Combine the two member distributions under `policy`.
pub fn fuse<F: Scalar>(
    nb: &ClassDistribution<F>,
    svm: &ClassDistribution<F>,
    policy: &FusionPolicy<F>,
) -> Result<ClassDistribution<F>, FusionError> {
    policy.validate()?;
    Ok(match *policy {
        FusionPolicy::SoftVote { w_nb, w_svm } => {
            let (a, b) = (nb.probs(), svm.probs());
            ClassDistribution::new([w_nb * a[0] + w_svm * b[0], w_nb * a[1] + w_svm * b[1]])
        }
        FusionPolicy::MaxConfidence => {
            if nb.max_prob() > svm.max_prob() {
                *nb
            } else {
                *svm
            }
        }
        FusionPolicy::Cascade { tau } => {
            if svm.max_prob() >= tau {
                *svm
            } else {
                *nb
            }
        }
    })
}

/// Naive Bayes and a calibrated SVM over one shared vocabulary, plus the
/// rule that combines them.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridModel<F> {
    nb: MultinomialNb<F>,
    svm: LinearSvm<F>,
    policy: FusionPolicy<F>,
}

impl<F: Scalar> HybridModel<F> {
    pub fn new(nb: MultinomialNb<F>, svm: LinearSvm<F>, policy: FusionPolicy<F>) -> Result<Self, FusionError> {
        policy.validate()?;
        if nb.vocab_size() != svm.dim() {
            return Err(FusionError::VocabularyMismatch {
                nb: nb.vocab_size(),
                svm: svm.dim(),
            });
        }
        if svm.calibration().is_none() {
            return Err(FusionError::Uncalibrated);
        }
        Ok(Self { nb, svm, policy })
    }

    pub fn nb(&self) -> &MultinomialNb<F> {
        &self.nb
    }

    pub fn svm(&self) -> &LinearSvm<F> {
        &self.svm
    }

    pub fn policy(&self) -> &FusionPolicy<F> {
        &self.policy
    }

    pub fn with_policy(mut self, policy: FusionPolicy<F>) -> Result<Self, FusionError> {
        policy.validate()?;
        self.policy = policy;
        Ok(self)
    }

    /// Fused distribution followed by the NB and SVM member distributions.
    pub fn predict_vectors(
        &self,
        nb_vector: &crate::features::SparseVector<F>,
        svm_vector: &crate::features::SparseVector<F>,
    ) -> (ClassDistribution<F>, ClassDistribution<F>, ClassDistribution<F>) {
        let d_nb = self.nb.predict(nb_vector);
        let d_svm = self
            .svm
            .predict(svm_vector)
            .expect("hybrid SVM is calibrated at construction");
        let fused = fuse(&d_nb, &d_svm, &self.policy).expect("policy validated at construction");
        (fused, d_nb, d_svm)
    }
}
