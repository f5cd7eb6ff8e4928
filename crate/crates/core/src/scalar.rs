//! Floating point abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for probabilities, weights and metrics.
///
/// Implemented for `f32` and `f64`. Tolerances quoted in the tests assume
/// `f64`; the `f32` instantiation is supported for memory-constrained
/// inference but is only checked at single-precision tolerances.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal. Never fails for finite inputs.
    fn lit(x: f64) -> Self;

    /// Convert a count.
    fn from_count(n: u64) -> Self {
        Self::lit(n as f64)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `2^-64`, the floor applied to predicted probabilities before
    /// taking their logarithm.
    fn prob_floor() -> Self {
        Self::lit(2f64.powi(-64))
    }
}

impl Scalar for f32 {
    fn lit(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    fn lit(x: f64) -> Self {
        x
    }
}

/// Numerically stable `ln(exp(a) + exp(b))`.
pub fn log_sum_exp<F: Scalar>(a: F, b: F) -> F {
    let m = a.max(b);
    if m == F::neg_infinity() {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Logistic function evaluated without overflow for either sign.
pub fn sigmoid<F: Scalar>(z: F) -> F {
    if z >= F::zero() {
        F::one() / (F::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (F::one() + e)
    }
}
