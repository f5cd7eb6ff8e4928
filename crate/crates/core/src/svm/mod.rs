//! Linear soft-margin SVM trained by stochastic subgradient descent on the
//! L2-regularized hinge loss (Pegasos step schedule), with sigmoid
//! calibration for probability output.
//!
//! Class index 0 is the positive (+1) side of the margin.

mod platt;

pub use platt::{platt_fit, PlattError, PlattFit, PlattParams, GRADIENT_TOLERANCE, MAX_ITERATIONS};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::distribution::ClassDistribution;
use crate::features::SparseVector;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum SvmError {
    #[error("regularization lambda must be positive and finite")]
    InvalidLambda,
    #[error("at least one training epoch is required")]
    InvalidEpochs,
    #[error("training data needs both signs (got {positives} positive, {negatives} negative)")]
    OneClass { positives: usize, negatives: usize },
    #[error("{vectors} vectors but {labels} labels")]
    LengthMismatch { vectors: usize, labels: usize },
    #[error("example {example} has a non-finite feature value")]
    NonFiniteFeature { example: usize },
    #[error("example {example} uses feature {index}, beyond dimension {dim}")]
    IndexOutOfRange { example: usize, index: usize, dim: usize },
    #[error("weights became non-finite during epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("model is not calibrated; fit sigmoid parameters with `calibrate` before requesting probabilities")]
    Uncalibrated,
    #[error("inconsistent model parameters: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Calibration(#[from] PlattError),
}

/// Map a class index to its margin sign.
pub fn class_sign(class: usize) -> i8 {
    if class == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmParams<F> {
    pub lambda: F,
    pub epochs: usize,
    pub seed: u64,
}

impl<F: Scalar> Default for SvmParams<F> {
    fn default() -> Self {
        Self {
            lambda: F::lit(1e-4),
            epochs: 20,
            seed: 0,
        }
    }
}

/// Regularized objective after each epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog<F> {
    pub objectives: Vec<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm<F> {
    weights: Vec<F>,
    bias: F,
    params: SvmParams<F>,
    calibration: Option<PlattParams<F>>,
}

/// `(lambda/2) ||w||^2 + mean hinge loss` over the given examples.
pub fn regularized_hinge<F: Scalar>(weights: &[F], bias: F, lambda: F, vectors: &[SparseVector<F>], signs: &[i8]) -> F {
    let reg = lambda * F::lit(0.5) * weights.iter().map(|&w| w * w).sum::<F>();
    let hinge: F = vectors
        .iter()
        .zip(signs)
        .map(|(x, &y)| {
            let y = F::lit(y as f64);
            (F::one() - y * (x.dot_dense(weights) + bias)).max(F::zero())
        })
        .sum();
    reg + hinge / F::from_count(vectors.len() as u64)
}

impl<F: Scalar> LinearSvm<F> {
    /// Train on `vectors` (ideally l2-normalized) with margin signs `+1/-1`.
    ///
    /// Step `t` (counted across epochs, from 1) uses rate `1/(lambda t)`.
    /// Examples are visited in a fresh seeded permutation every epoch. The
    /// bias takes the same step as the weights but is never shrunk.
    pub fn train(
        vectors: &[SparseVector<F>],
        signs: &[i8],
        dim: usize,
        params: SvmParams<F>,
    ) -> Result<(Self, TrainLog<F>), SvmError> {
        if !(params.lambda > F::zero() && params.lambda.is_finite()) {
            return Err(SvmError::InvalidLambda);
        }
        if params.epochs == 0 {
            return Err(SvmError::InvalidEpochs);
        }
        if vectors.len() != signs.len() {
            return Err(SvmError::LengthMismatch {
                vectors: vectors.len(),
                labels: signs.len(),
            });
        }
        for (example, x) in vectors.iter().enumerate() {
            if !x.is_finite() {
                return Err(SvmError::NonFiniteFeature { example });
            }
            if x.min_dim() > dim {
                return Err(SvmError::IndexOutOfRange {
                    example,
                    index: x.min_dim() - 1,
                    dim,
                });
            }
        }
        let positives = signs.iter().filter(|&&s| s > 0).count();
        let negatives = signs.iter().filter(|&&s| s < 0).count();
        if positives == 0 || negatives == 0 || positives + negatives != signs.len() {
            return Err(SvmError::OneClass { positives, negatives });
        }

        let lambda = params.lambda;
        // w = scale * v, so the shrink step is O(1) instead of O(dim).
        let mut v = vec![F::zero(); dim];
        let mut scale = F::one();
        let mut bias = F::zero();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut log = TrainLog::default();
        let mut t: u64 = 0;
        let rescale_below = F::lit(1e-9);

        for epoch in 0..params.epochs {
            let mut order: Vec<usize> = (0..vectors.len()).collect();
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let x = &vectors[i];
                let y = F::lit(signs[i] as f64);
                let eta = F::one() / (lambda * F::from_count(t));
                let margin = y * (scale * x.dot_dense(&v) + bias);

                let shrink = F::one() - eta * lambda;
                if shrink == F::zero() {
                    v.iter_mut().for_each(|w| *w = F::zero());
                    scale = F::one();
                } else {
                    scale *= shrink;
                }
                if margin < F::one() {
                    let step = eta * y / scale;
                    for (j, xj) in x.iter() {
                        v[j] += step * xj;
                    }
                    bias += eta * y;
                }
                if scale < rescale_below {
                    v.iter_mut().for_each(|w| *w *= scale);
                    scale = F::one();
                }
            }
            let weights: Vec<F> = v.iter().map(|&w| w * scale).collect();
            if !(weights.iter().all(|w| w.is_finite()) && bias.is_finite()) {
                return Err(SvmError::Diverged { epoch });
            }
            log.objectives.push(regularized_hinge(&weights, bias, lambda, vectors, signs));
        }

        let weights = v.into_iter().map(|w| w * scale).collect();
        Ok((
            Self {
                weights,
                bias,
                params,
                calibration: None,
            },
            log,
        ))
    }

    /// Reassemble a model from persisted parameters.
    pub fn from_parts(
        weights: Vec<F>,
        bias: F,
        params: SvmParams<F>,
        calibration: Option<PlattParams<F>>,
    ) -> Result<Self, SvmError> {
        if !(weights.iter().all(|w| w.is_finite()) && bias.is_finite()) {
            return Err(SvmError::Inconsistent("non-finite weight or bias".into()));
        }
        if let Some(c) = calibration {
            if !(c.a < F::zero() && c.b.is_finite()) {
                return Err(SvmError::Inconsistent("calibration slope must be negative".into()));
            }
        }
        Ok(Self {
            weights,
            bias,
            params,
            calibration,
        })
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn bias(&self) -> F {
        self.bias
    }

    pub fn params(&self) -> SvmParams<F> {
        self.params
    }

    pub fn calibration(&self) -> Option<PlattParams<F>> {
        self.calibration
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Margin `w . x + b`.
    pub fn decision(&self, x: &SparseVector<F>) -> F {
        x.dot_dense(&self.weights) + self.bias
    }

    /// Class index from the margin sign; exactly zero counts as positive.
    pub fn predict_class(&self, x: &SparseVector<F>) -> usize {
        if self.decision(x) >= F::zero() {
            0
        } else {
            1
        }
    }

    /// Fit the sigmoid on held-out examples and store it.
    pub fn calibrate(&mut self, vectors: &[SparseVector<F>], signs: &[i8]) -> Result<PlattFit<F>, SvmError> {
        let decisions: Vec<F> = vectors.iter().map(|x| self.decision(x)).collect();
        let positive: Vec<bool> = signs.iter().map(|&s| s > 0).collect();
        let fit = platt_fit(&decisions, &positive)?;
        self.calibration = Some(fit.params);
        Ok(fit)
    }

    pub fn set_calibration(&mut self, params: PlattParams<F>) {
        self.calibration = Some(params);
    }

    pub fn predict(&self, x: &SparseVector<F>) -> Result<ClassDistribution<F>, SvmError> {
        let cal = self.calibration.ok_or(SvmError::Uncalibrated)?;
        Ok(ClassDistribution::from_first(cal.probability(self.decision(x))))
    }
}
