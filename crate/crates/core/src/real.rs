//! Scalar abstraction over `f32`/`f64` via num-traits.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar the library is generic over.
///
/// Implemented for `f32` and `f64`. The default tolerances in
/// [`NumericPolicy`](crate::NumericPolicy) assume `f64` precision.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum<Self> + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` constant (tolerances, literals) into the scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `x * log2(x)` with the convention `0 * log2(0) = 0`.
///
/// Zero or (clipped) negative inputs contribute nothing.
pub fn xlog2<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.log2()
    }
}

/// Shannon entropy in bits, `-sum_k p_k log2 p_k`.
pub fn shannon_entropy<T: Real>(p: &[T]) -> T {
    -p.iter().map(|&x| xlog2(x)).sum::<T>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xlog2_convention() {
        assert_eq!(xlog2(0.0f64), 0.0);
        assert_eq!(xlog2(-1e-12f64), 0.0);
        assert_eq!(xlog2(1.0f64), 0.0);
        assert_eq!(xlog2(0.5f64), -0.5);
    }

    #[test]
    fn entropy_uniform_is_log2_d() {
        let p = [0.25f64; 4];
        assert!((shannon_entropy(&p) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn works_for_f32() {
        let p = [0.5f32, 0.5];
        assert!((shannon_entropy(&p) - 1.0).abs() < 1e-6);
    }
}
