//! Sigmoid calibration of decision values, `P(y=+1 | f) = 1 / (1 + exp(A f + B))`.
//!
//! Newton's method with backtracking line search on the cross-entropy
//! against smoothed targets `t+ = (N+ + 1)/(N+ + 2)`, `t- = 1/(N- + 2)`.

use thiserror::Error;

use crate::scalar::{sigmoid, Scalar};

pub const MAX_ITERATIONS: usize = 100;
pub const GRADIENT_TOLERANCE: f64 = 1e-10;
const MIN_STEP: f64 = 1e-10;
const HESSIAN_RIDGE: f64 = 1e-12;
/// Gradient level accepted when the line search can make no further
/// progress at working precision.
const STALL_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Error, PartialEq)]
pub enum PlattError {
    #[error("calibration needs at least one example of each sign (got {positives} positive, {negatives} negative)")]
    OneSided { positives: usize, negatives: usize },
    #[error("{decisions} decision values but {labels} labels")]
    LengthMismatch { decisions: usize, labels: usize },
    #[error("decision value {0} is not finite")]
    NonFinite(f64),
    #[error("sigmoid fit did not converge after {iterations} iterations (gradient {gradient:e})")]
    NotConverged { iterations: usize, gradient: f64 },
    #[error("decision values are not positively associated with the positive class (fitted slope A = {0}); the classifier carries no usable ranking")]
    NonIncreasing(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlattParams<F> {
    pub a: F,
    pub b: F,
}

impl<F: Scalar> PlattParams<F> {
    /// Probability of the positive class for decision value `f`.
    pub fn probability(&self, f: F) -> F {
        sigmoid(-(self.a * f + self.b))
    }
}

/// Outcome of a fit, with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlattFit<F> {
    pub params: PlattParams<F>,
    pub iterations: usize,
    /// Negative log-likelihood against the smoothed targets at the optimum.
    pub objective: F,
}

fn objective<F: Scalar>(decisions: &[F], targets: &[F], a: F, b: F) -> F {
    decisions
        .iter()
        .zip(targets)
        .map(|(&f, &t)| {
            let z = f * a + b;
            if z >= F::zero() {
                t * z + (-z).exp().ln_1p()
            } else {
                (t - F::one()) * z + z.exp().ln_1p()
            }
        })
        .sum()
}

/// Fit sigmoid parameters. `positive[i]` marks examples of the positive class.
pub fn platt_fit<F: Scalar>(decisions: &[F], positive: &[bool]) -> Result<PlattFit<F>, PlattError> {
    if decisions.len() != positive.len() {
        return Err(PlattError::LengthMismatch {
            decisions: decisions.len(),
            labels: positive.len(),
        });
    }
    if let Some(f) = decisions.iter().find(|f| !f.is_finite()) {
        return Err(PlattError::NonFinite(f.to_f64_lossy()));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(PlattError::OneSided {
            positives: n_pos,
            negatives: n_neg,
        });
    }

    let lowest = decisions.iter().copied().fold(F::infinity(), F::min);
    let highest = decisions.iter().copied().fold(F::neg_infinity(), F::max);
    if lowest == highest {
        return Err(PlattError::NonIncreasing(0.0));
    }

    let hi = F::from_count(n_pos as u64 + 1) / F::from_count(n_pos as u64 + 2);
    let lo = F::one() / F::from_count(n_neg as u64 + 2);
    let targets: Vec<F> = positive.iter().map(|&p| if p { hi } else { lo }).collect();

    let tol = F::lit(GRADIENT_TOLERANCE).max(F::epsilon() * F::from_count(decisions.len() as u64) * F::lit(4.0));
    let ridge = F::lit(HESSIAN_RIDGE);
    let mut a = F::zero();
    let mut b = (F::from_count(n_neg as u64 + 1) / F::from_count(n_pos as u64 + 1)).ln();
    let mut fval = objective(decisions, &targets, a, b);

    let mut iterations = 0;
    loop {
        let (mut h11, mut h22, mut h21) = (ridge, ridge, F::zero());
        let (mut g1, mut g2) = (F::zero(), F::zero());
        for (&f, &t) in decisions.iter().zip(&targets) {
            let p = sigmoid(-(f * a + b));
            let d2 = p * (F::one() - p);
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = t - p;
            g1 += f * d1;
            g2 += d1;
        }
        let gnorm = g1.abs().max(g2.abs());
        if gnorm < tol {
            break;
        }
        if iterations == MAX_ITERATIONS {
            return Err(PlattError::NotConverged {
                iterations,
                gradient: gnorm.to_f64_lossy(),
            });
        }
        iterations += 1;

        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;

        let mut step = F::one();
        let accepted = loop {
            if step < F::lit(MIN_STEP) {
                break false;
            }
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(decisions, &targets, na, nb);
            if nf < fval + F::lit(1e-4) * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break true;
            }
            step /= F::lit(2.0);
        };
        if !accepted {
            let stall = F::lit(STALL_TOLERANCE).max(F::epsilon().sqrt() * F::from_count(decisions.len() as u64));
            if gnorm < stall {
                break;
            }
            return Err(PlattError::NotConverged {
                iterations,
                gradient: gnorm.to_f64_lossy(),
            });
        }
    }

    if a.is_nan() || a >= F::zero() {
        return Err(PlattError::NonIncreasing(a.to_f64_lossy()));
    }
    Ok(PlattFit {
        params: PlattParams { a, b },
        iterations,
        objective: fval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn gaussian(rng: &mut impl Rng, mean: f64, sd: f64) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        mean + sd * (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    #[test]
    fn symmetric_pair_is_centered() {
        let fit = platt_fit(&[-1.0f64, 1.0], &[false, true]).unwrap();
        assert!((fit.params.probability(0.0) - 0.5).abs() < 1e-6);
        assert!(fit.params.b.abs() < 1e-9);
        // targets 2/3 and 1/3 are matched exactly at the optimum
        assert!((fit.params.probability(1.0) - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn probability_increases_with_decision() {
        let fit = platt_fit(
            &[-2.0f64, -0.5, 0.3, 0.1, 1.7, -0.2],
            &[false, false, true, false, true, true],
        )
        .unwrap();
        assert!(fit.params.a < 0.0);
        let mut last = 0.0;
        for i in -50..=50 {
            let p = fit.params.probability(i as f64 / 5.0);
            assert!(p > last);
            last = p;
        }
    }

    fn smoothed_log_likelihood(f: &[f64], y: &[bool], a: f64, b: f64) -> f64 {
        let np = y.iter().filter(|&&p| p).count() as f64;
        let nn = y.len() as f64 - np;
        f.iter()
            .zip(y)
            .map(|(&fi, &yi)| {
                let t = if yi { (np + 1.0) / (np + 2.0) } else { 1.0 / (nn + 2.0) };
                let p = 1.0 / (1.0 + (a * fi + b).exp());
                t * p.ln() + (1.0 - t) * (1.0 - p).ln()
            })
            .sum()
    }

    #[test]
    fn beats_fixed_baseline_on_gaussian_margins() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut f = Vec::new();
        let mut y = Vec::new();
        for i in 0..1000 {
            let p = i % 3 != 0;
            f.push(if p {
                gaussian(&mut rng, 0.8, 1.0)
            } else {
                gaussian(&mut rng, -0.6, 0.7)
            });
            y.push(p);
        }
        let fit = platt_fit(&f, &y).unwrap();
        let fitted = smoothed_log_likelihood(&f, &y, fit.params.a, fit.params.b);
        let baseline = smoothed_log_likelihood(&f, &y, -1.0, 0.0);
        assert!(fitted >= baseline, "{fitted} < {baseline}");
        assert!(fit.iterations <= MAX_ITERATIONS);
        assert!((fitted + fit.objective).abs() < 1e-8 * fitted.abs());
    }

    #[test]
    fn separable_data_still_converges() {
        let f: Vec<f64> = (0..40)
            .map(|i| if i < 20 { -3.0 - i as f64 } else { 3.0 + i as f64 })
            .collect();
        let y: Vec<bool> = (0..40).map(|i| i >= 20).collect();
        let fit = platt_fit(&f, &y).unwrap();
        assert!(fit.params.a < 0.0 && fit.params.a.is_finite());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            platt_fit(&[1.0f64, 2.0], &[true, true]),
            Err(PlattError::OneSided { .. })
        ));
        assert!(matches!(
            platt_fit(&[f64::NAN, 2.0], &[true, false]),
            Err(PlattError::NonFinite(_))
        ));
        assert!(matches!(
            platt_fit(&[1.0f64], &[true, false]),
            Err(PlattError::LengthMismatch { .. })
        ));
        // anti-correlated scores cannot yield an increasing sigmoid
        assert!(matches!(
            platt_fit(&[2.0f64, 1.0, -1.0, -2.0], &[false, false, true, true]),
            Err(PlattError::NonIncreasing(_))
        ));
        // constant scores give zero slope
        assert!(matches!(
            platt_fit(&[0.5f64, 0.5, 0.5], &[true, false, true]),
            Err(PlattError::NonIncreasing(_))
        ));
    }

    #[test]
    fn single_precision_fit() {
        let fit = platt_fit(&[-1.0f32, -0.4, 0.2, 1.0], &[false, true, false, true]).unwrap();
        assert!(fit.params.a < 0.0);
    }
}
