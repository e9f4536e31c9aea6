//! Scalar abstraction for the numeric kernels.
//!
//! All device models and integrators are generic over [`Real`] so the same
//! code runs in `f32` or `f64`. The crate-root aliases fix `f64`, which is
//! what the CLI and the reproducibility guarantees use.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumCast
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Shorthand for lossy conversion from `f64` literals.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion to `f64` for reporting and CSV output.
    fn to_f64_lossy(self) -> f64 {
        num_traits::NumCast::from(self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
