use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point element type for fields, features and statistics.
///
/// Implemented for `f32` and `f64` through the blanket impl below.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + FromStr + Default + Debug + Display + Sum + Send + Sync + 'static
{
}
