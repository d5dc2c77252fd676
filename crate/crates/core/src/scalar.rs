//! Scalar abstraction for the closed-form layer.
//!
//! The analytic bounds and rotation formulas are generic over the floating
//! point type; the Monte Carlo engine instantiates everything at [`Real`]
//! (`f64`), which is what the 1e-9 exactness tolerances are calibrated for.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + core::fmt::Debug {
    /// Lossy conversion from `f64`, for constants.
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("constant conversion")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// The scalar type used by the simulation engine.
pub type Real = f64;
