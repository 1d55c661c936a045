//! Floating-point scalar abstraction shared by every module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used for probabilities, distances and bit counts.
///
/// Implemented for `f64` and `f32`. The associated tolerance is the absolute
/// slack allowed on the total mass of an in-memory distribution.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Sum + Send + Sync + 'static
{
    /// Absolute tolerance on `sum(probs) == 1` for in-memory distributions.
    fn normalization_tol() -> Self;

    /// Converts an `f64` literal. Panics only if the value is unrepresentable,
    /// which cannot happen for finite inputs to the supported types.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// `2^(-n)` for an integer bit count (underflows to zero for large `n`).
    fn pow2_neg(n: u64) -> Self {
        Self::lit(-(n as f64)).exp2()
    }
}

impl Scalar for f64 {
    fn normalization_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn normalization_tol() -> Self {
        1e-5
    }
}

/// Compensated (Neumaier) summation.
pub fn compensated_sum<T: Scalar, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// `log2(2^a + 2^b)` without leaving the log domain.
pub fn log2_add_exp2<T: Scalar>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() / T::LN_2()
}
