//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate is written against [`Real`], a thin bundle of the
//! `num-traits` float traits plus the operator-assign traits the solvers need.
//! `f64` is the scalar used by the shipped binaries and the test suites; `f32`
//! compiles but cannot meet the tighter tolerances.

use std::fmt;
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by every solver in this crate.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` constant into the scalar type.
    ///
    /// Panics if the conversion is not representable, which cannot happen for
    /// finite literals and the built-in float types.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    /// Round-trip to `f64` for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// π in the scalar type.
    fn pi() -> Self {
        Self::of(std::f64::consts::PI)
    }
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum
        + fmt::Debug
        + fmt::Display
        + fmt::LowerExp
        + Send
        + Sync
        + 'static
{
}
