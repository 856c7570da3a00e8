//! Scalar abstraction for the numerical core.
//!
//! Everything downstream is written against [`Real`] so that the same code
//! runs in `f32` and `f64`. The shipped tolerances are calibrated for `f64`;
//! `f32` is useful for quick scans but will not meet the tight residual
//! bounds used by the verification suite.

use std::fmt::{Debug, Display, LowerExp};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable")
    }

    fn from_usize_(n: usize) -> Self {
        Self::from_usize(n).expect("usize not representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
