//! Curvature comparison constants and triangle-comparison checks.
//!
//! Every constant is stored as the half `λ/2`, the form in which it enters the descent
//! and complexity estimates.

use crate::error::{Error, Result};
use crate::geometry::{angle_between, GeodesicSpace, SurfacePoint};
use crate::scalar::Scalar;

/// Below this argument the closed forms `x/tan x` and `x/tanh x` are replaced by their
/// Taylor series, which are exact to rounding there.
const SERIES_CUTOFF: f64 = 1e-4;

/// Relative length gap under which a competing geodesic makes a triangle ambiguous.
const AMBIGUITY_GAP: f64 = 1e-9;

/// Comparison constants of a working set of diameter `diam`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureConstants<T> {
    pub kappa_lower: T,
    pub kappa_upper: T,
    pub diam: T,
    /// `λ_l/2 ≥ 1`.
    pub lambda_l_half: T,
    /// `λ_u/2 ∈ (0, 1]`.
    pub lambda_u_half: T,
}

impl<T: Scalar> CurvatureConstants<T> {
    pub fn new(kappa_lower: T, kappa_upper: T, diam: T) -> Result<Self> {
        if !(kappa_lower <= kappa_upper) {
            return Err(Error::Domain(format!(
                "lower curvature bound {kappa_lower} exceeds upper bound {kappa_upper}"
            )));
        }
        Ok(Self {
            kappa_lower,
            kappa_upper,
            diam,
            lambda_l_half: lambda_lower_half(kappa_lower, diam)?,
            lambda_u_half: lambda_upper_half(kappa_upper, diam)?,
        })
    }

    /// Both halves equal to one.
    pub fn flat(diam: T) -> Self {
        Self {
            kappa_lower: T::zero(),
            kappa_upper: T::zero(),
            diam,
            lambda_l_half: T::one(),
            lambda_u_half: T::one(),
        }
    }
}

fn check_diam<T: Scalar>(diam: T) -> Result<()> {
    if diam > T::zero() && diam.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "diameter {diam} must be positive and finite"
        )))
    }
}

/// `√κ̄ D / tan(√κ̄ D)` for `κ̄ > 0`, else 1. Requires `D < π/(2√κ̄)`.
pub fn lambda_upper_half<T: Scalar>(kappa_upper: T, diam: T) -> Result<T> {
    check_diam(diam)?;
    if kappa_upper <= T::zero() {
        return Ok(T::one());
    }
    let x = kappa_upper.sqrt() * diam;
    if x >= T::FRAC_PI_2() {
        return Err(Error::Domain(format!(
            "diameter {diam} not below π/(2√κ̄) for κ̄ = {kappa_upper}"
        )));
    }
    if x < T::lit(SERIES_CUTOFF) {
        let x2 = x * x;
        return Ok(T::one() - x2 / T::int(3) - x2 * x2 / T::int(45));
    }
    Ok(x / x.tan())
}

/// `√(−κ) D / tanh(√(−κ) D)` for `κ < 0`, else 1.
pub fn lambda_lower_half<T: Scalar>(kappa_lower: T, diam: T) -> Result<T> {
    check_diam(diam)?;
    if kappa_lower >= T::zero() {
        return Ok(T::one());
    }
    let x = (-kappa_lower).sqrt() * diam;
    if x < T::lit(SERIES_CUTOFF) {
        let x2 = x * x;
        return Ok(T::one() + x2 / T::int(3) - x2 * x2 / T::int(45));
    }
    Ok(x / x.tanh())
}

/// Diameter of the model plane of curvature `κ`: infinite for `κ ≤ 0`, else `π/√κ`.
pub fn model_diameter<T: Scalar>(kappa: T) -> T {
    if kappa <= T::zero() {
        T::infinity()
    } else {
        T::PI() / kappa.sqrt()
    }
}

/// Side lengths, vertex angle and signed residuals of both comparison inequalities.
/// A residual is nonnegative when its inequality holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleReport<T> {
    /// `d(y, z)`, the side opposite the vertex `x`.
    pub a: T,
    /// `d(x, y)`.
    pub b: T,
    /// `d(x, z)`.
    pub c: T,
    /// Angle at `x` between the geodesics to `y` and `z`.
    pub theta: T,
    /// `(λ_l/2)(c) b² + c² − 2bc cos θ − a²`.
    pub lower_residual: T,
    /// `a² − (λ_u/2)(c) b² − c² + 2bc cos θ`.
    pub upper_residual: T,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl<T: Scalar> TriangleReport<T> {
    /// `a² − (b² + c² − 2bc cos θ)`, the flat law-of-cosines defect.
    pub fn flat_defect(&self) -> T {
        let b = self.b;
        let c = self.c;
        self.a * self.a - (b * b + c * c - T::int(2) * b * c * self.theta.cos())
    }
}

/// Evaluates both comparison inequalities on the triangle `x, y, z` with the curvature
/// bounds of `space`. The residual tolerance for the `ok` flags is `1e-8`.
pub fn check_triangle_comparison<T: Scalar, S: GeodesicSpace<T> + ?Sized>(
    space: &S,
    x: &SurfacePoint<T>,
    y: &SurfacePoint<T>,
    z: &SurfacePoint<T>,
) -> Result<TriangleReport<T>> {
    let desc = space.descriptor();
    let gxy = space.geodesic(x, y)?;
    let gxz = space.geodesic(x, z)?;
    let gyz = space.geodesic(y, z)?;
    for g in [&gxy, &gxz, &gyz] {
        if !g.is_unique(T::lit(AMBIGUITY_GAP) * (T::one() + g.length)) {
            return Err(Error::Ambiguous);
        }
    }
    let (a, b, c) = (gyz.length, gxy.length, gxz.length);
    let base = space.canonicalize(x)?;
    let u = crate::geometry::TangentVector::new(base, gxy.direction);
    let v = crate::geometry::TangentVector::new(base, gxz.direction);
    let theta = angle_between(&u, &v)?;
    let law = c * c - T::int(2) * b * c * theta.cos();
    let (lower_residual, upper_residual) = if c > T::zero() {
        let fl = lambda_lower_half(desc.kappa_lower, c)?;
        let fu = lambda_upper_half(desc.kappa_upper, c)?;
        (fl * b * b + law - a * a, a * a - fu * b * b - law)
    } else {
        (b * b - a * a, a * a - b * b)
    };
    let tol = T::tol(1e-8);
    Ok(TriangleReport {
        a,
        b,
        c,
        theta,
        lower_residual,
        upper_residual,
        lower_ok: lower_residual >= -tol,
        upper_ok: upper_residual >= -tol,
    })
}
