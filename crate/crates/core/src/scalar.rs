//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};

/// Floating point scalar: `f32` or `f64`.
///
/// Probabilities, odds and bounds are all computed in `F`. Random draws are
/// always taken in `f64` and converted, so an `f32` instance and its `f64`
/// widening consume the RNG stream identically.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for finite inputs.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal fits in scalar")
    }

    /// Converts a count.
    fn from_count(k: usize) -> Self {
        Self::from_usize(k).expect("count fits in scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar widens to f64")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn quarter() -> Self {
        Self::lit(0.25)
    }

    /// `1/e`.
    fn inv_e() -> Self {
        Self::E().recip()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sums `values` by fixed-order pairwise (cascade) summation.
///
/// The reduction tree depends only on `values.len()`, so the result is the
/// same regardless of how the inputs were produced.
pub fn pairwise_sum<F: Scalar>(values: &[F]) -> F {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().fold(F::zero(), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_integers() {
        let v: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
    }

    #[test]
    fn inv_e_is_reciprocal() {
        assert!((f64::inv_e() - (-1.0f64).exp()).abs() < 1e-16);
        assert!((f32::inv_e() - (-1.0f32).exp()).abs() < 1e-7);
    }
}
