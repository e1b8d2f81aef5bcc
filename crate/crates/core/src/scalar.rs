//! Floating point abstraction shared by the geometry kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used throughout the crate: `f32` or `f64`.
///
/// The associated tolerances are the type-specific slacks used for angle
/// comparisons, length matching and quadrature. They are pinned for `f64`; the `f32`
/// values are scaled to that type's precision.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Slack for `θ ≤ π` tests (badness, flatness, Delaunay).
    const ANGLE_EPS: f64;
    /// Relative tolerance for glued half-edge lengths.
    const LENGTH_REL_TOL: f64;
    /// Absolute tolerance per edge integral in the prism volume quadrature.
    const QUAD_TOL: f64;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn angle_eps() -> Self {
        Self::lit(Self::ANGLE_EPS)
    }
}

impl Scalar for f64 {
    const ANGLE_EPS: f64 = 1e-10;
    const LENGTH_REL_TOL: f64 = 1e-12;
    const QUAD_TOL: f64 = 1e-14;
}

impl Scalar for f32 {
    const ANGLE_EPS: f64 = 1e-4;
    const LENGTH_REL_TOL: f64 = 1e-6;
    const QUAD_TOL: f64 = 1e-6;
}
