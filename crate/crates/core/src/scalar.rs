//! Scalar abstraction shared by the analytic probability kernels.
//!
//! The closed forms in this crate (outcome tables, the 1/3 bound, the
//! detection formulas) are rational functions of their inputs, so they are
//! written once, generically, and instantiated both with floating point and
//! with exact rational arithmetic. Claims that are exact (tables of eighths,
//! the 1/3 minimum) are asserted in the rational lane; everything continuous
//! (angles, matrices, sampling) runs in the float lane.

use num_rational::Rational64;
use num_traits::{Float, Num, Signed, Zero};

/// Arithmetic scalar accepted by the analytic kernels.
///
/// Implemented for `f64`, `f32` and [`Rational64`].
pub trait Scalar: Num + Signed + PartialOrd + Copy + std::fmt::Debug + std::fmt::Display {
    /// The value `num/den`. Exact for rational scalars.
    ///
    /// Panics if `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Lossy view as `f64`, used for sampling and report output.
    fn to_f64(self) -> f64;

    /// Slack allowed when validating probability sums: zero for exact
    /// scalars, `1e-12` for `f64`, `1e-5` for `f32`.
    fn tolerance() -> Self;
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f32 / den as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn tolerance() -> Self {
        1e-5
    }
}

impl Scalar for Rational64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational64::new(num, den)
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn tolerance() -> Self {
        Rational64::zero()
    }
}

/// Floating-point scalar, for the continuous parts of the crate: detector
/// angles, matrices, and Monte Carlo sampling.
pub trait RealScalar: Scalar + Float {}

impl<T: Scalar + Float> RealScalar for T {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_ratio_reduces_rationals() {
        assert_eq!(Rational64::from_ratio(2, 6), Rational64::new(1, 3));
        assert_eq!(f64::from_ratio(1, 8), 0.125);
    }

    #[test]
    fn to_f64_round_trips_simple_values() {
        assert_eq!(Rational64::from_ratio(3, 8).to_f64(), 0.375);
        assert_eq!(0.25f32.to_f64(), 0.25);
    }

    #[test]
    #[should_panic(expected = "zero denominator")]
    fn zero_denominator_panics() {
        let _ = f64::from_ratio(1, 0);
    }
}
