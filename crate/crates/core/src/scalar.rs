//! Floating-point scalar abstraction used throughout the crate.

use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display, LowerExp};

/// Scalar type the numerics are generic over: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal; panics only on values no float can hold.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal out of range for scalar type")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn two() -> Self {
        Self::lit(2.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}
