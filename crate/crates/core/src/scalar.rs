use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar the geometry and solver are generic over: f32 or f64.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a small integer.
    #[inline]
    fn int(x: i32) -> Self {
        Self::from_i32(x).expect("integer representable")
    }

    /// An absolute tolerance of `x`, floored at a small multiple of machine epsilon so
    /// that f64-calibrated tolerances stay meaningful in lower precision.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle<T: Scalar>(a: T) -> T {
    let tau = T::two_pi();
    let mut w = a % tau;
    if w < T::zero() {
        w = w + tau;
    }
    if w >= tau {
        w = w - tau;
    }
    w
}

/// Signed angular difference `b - a` wrapped into `(-π, π]`.
pub fn angle_diff<T: Scalar>(a: T, b: T) -> T {
    let pi = T::PI();
    let mut d = wrap_angle(b - a);
    if d > pi {
        d = d - T::two_pi();
    }
    d
}

#[inline]
pub(crate) fn hypot2<T: Scalar>(a: [T; 2]) -> T {
    a[0].hypot(a[1])
}

#[inline]
pub(crate) fn dot2<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub(crate) fn sub2<T: Scalar>(a: [T; 2], b: [T; 2]) -> [T; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn scale2<T: Scalar>(a: [T; 2], s: T) -> [T; 2] {
    [a[0] * s, a[1] * s]
}

/// Rotates a planar vector counter-clockwise by `angle` radians.
#[inline]
pub fn rotate2<T: Scalar>(a: [T; 2], angle: T) -> [T; 2] {
    let (s, c) = angle.sin_cos();
    [c * a[0] - s * a[1], s * a[0] + c * a[1]]
}

#[inline]
pub(crate) fn dist3<T: Scalar>(a: [T; 3], b: [T; 3]) -> T {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}
