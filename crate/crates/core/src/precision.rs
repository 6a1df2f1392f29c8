//! Floating-point precision selection for state amplitudes.
//!
//! Kernels are generic over [`Real`], which is implemented for `f32` and `f64`.
//! Tolerances quoted throughout the crate are per precision: `1e-12` for `f64`
//! and `1e-5` for `f32` unless stated otherwise.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst};

pub trait Real:
    Float + FloatConst + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Bits per scalar component.
    const BITS: usize;
    /// Norm-preservation tolerance for this precision.
    const NORM_TOL: f64;
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Real for f64 {
    const BITS: usize = 64;
    const NORM_TOL: f64 = 1e-12;
    const NAME: &'static str = "f64";

    #[inline(always)]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    const BITS: usize = 32;
    const NORM_TOL: f64 = 1e-5;
    const NAME: &'static str = "f32";

    #[inline(always)]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self as f64
    }
}
