//! Scalar abstraction for the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numeric kernels are generic over.
///
/// Blanket-implemented for anything float-like; in practice `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for constants and rng draws.
    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("f64 conversion")
    }

    /// Exact-count conversion; class counts and node counts always fit.
    fn from_count(value: usize) -> Self {
        Self::from_usize(value).expect("usize conversion")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean<S: Scalar>(values: &[S]) -> S {
        values.iter().copied().sum::<S>() / S::from_count(values.len())
    }

    #[test]
    fn generic_mean_works_for_both_precisions() {
        assert_eq!(mean(&[1.0f64, 2.0, 3.0]), 2.0);
        assert_eq!(mean(&[1.0f32, 2.0, 3.0]), 2.0);
    }
}
