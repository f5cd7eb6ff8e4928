use crate::scalar::Scalar;

/// Posterior probabilities over the two classes, indexed by label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassDistribution<F>([F; 2]);

impl<F: Scalar> ClassDistribution<F> {
    /// Wrap probabilities that are already normalized.
    pub fn new(probs: [F; 2]) -> Self {
        debug_assert!(probs.iter().all(|p| *p >= F::zero() && *p <= F::one()));
        Self(probs)
    }

    /// Normalize non-negative weights. All-zero weights give the uniform
    /// distribution.
    pub fn from_weights(weights: [F; 2]) -> Self {
        let total = weights[0] + weights[1];
        if total <= F::zero() || !total.is_finite() {
            let half = F::lit(0.5);
            return Self([half, half]);
        }
        Self(weights.map(|w| w / total))
    }

    /// Softmax of two log-scores.
    pub fn from_log_scores(scores: [F; 2]) -> Self {
        Self::from_log_odds(scores[0] - scores[1])
    }

    /// Distribution with `ln(p0 / p1) = z`.
    pub fn from_log_odds(z: F) -> Self {
        Self([crate::scalar::sigmoid(z), crate::scalar::sigmoid(-z)])
    }

    /// Distribution `(p, 1 - p)`.
    pub fn from_first(p: F) -> Self {
        Self([p, F::one() - p])
    }

    pub fn probs(&self) -> [F; 2] {
        self.0
    }

    pub fn prob(&self, class: usize) -> F {
        self.0[class]
    }

    /// Most probable class; ties go to the lower index.
    pub fn argmax(&self) -> usize {
        if self.0[1] > self.0[0] {
            1
        } else {
            0
        }
    }

    pub fn max_prob(&self) -> F {
        self.0[0].max(self.0[1])
    }

    pub fn sum(&self) -> F {
        self.0[0] + self.0[1]
    }

    /// Swap class coordinates.
    pub fn swapped(&self) -> Self {
        Self([self.0[1], self.0[0]])
    }
}
