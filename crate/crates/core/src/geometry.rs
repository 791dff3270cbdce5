//! Shared geodesic-space interface implemented by the cube and capped-cylinder surfaces.
//!
//! Points are stored as a chart identifier plus two local coordinates. Tangent vectors
//! carry their base point and two components in the base chart's frame; every chart
//! frame is isometric to the plane away from singular points, so the inner product of
//! two tangent vectors at the same base is the Euclidean dot product of components.

use std::fmt;

use crate::cube::Cube;
use crate::cylinder::Cylinder;
use crate::error::{Error, Result};
use crate::scalar::{dist3, dot2, hypot2, scale2, Scalar};

/// Chart identifier. Cube faces are numbered 1 to 6; the capped cylinder has a top cap,
/// a bottom cap and the side. The derived order is the canonicalisation order for points
/// lying on a seam between charts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chart {
    Face(u8),
    Top,
    Bottom,
    Side,
}

impl Chart {
    /// Numeric code used in CSV `face` columns: cube faces 1..=6, cylinder top 0,
    /// bottom 1, side 2.
    pub fn code(self) -> u8 {
        match self {
            Chart::Face(f) => f,
            Chart::Top => 0,
            Chart::Bottom => 1,
            Chart::Side => 2,
        }
    }

    pub fn from_code(kind: SurfaceKind, code: i64) -> Result<Chart> {
        match (kind, code) {
            (SurfaceKind::Cube, 1..=6) => Ok(Chart::Face(code as u8)),
            (SurfaceKind::Cylinder, 0) => Ok(Chart::Top),
            (SurfaceKind::Cylinder, 1) => Ok(Chart::Bottom),
            (SurfaceKind::Cylinder, 2) => Ok(Chart::Side),
            _ => Err(Error::Domain(format!("no {kind} chart with code {code}"))),
        }
    }

    pub fn is_cap(self) -> bool {
        matches!(self, Chart::Top | Chart::Bottom)
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::Face(k) => write!(f, "face {k}"),
            Chart::Top => f.write_str("top cap"),
            Chart::Bottom => f.write_str("bottom cap"),
            Chart::Side => f.write_str("side"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    Cube,
    Cylinder,
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::Cube => f.write_str("cube"),
            SurfaceKind::Cylinder => f.write_str("cylinder"),
        }
    }
}

/// A point on a surface: chart plus local coordinates. Cube faces use the unit square;
/// the cylinder side uses `(φ, z)` and the caps use planar `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint<T> {
    pub chart: Chart,
    pub local: [T; 2],
}

impl<T: Scalar> SurfacePoint<T> {
    pub fn new(chart: Chart, local: [T; 2]) -> Self {
        Self { chart, local }
    }

    pub fn face(face: u8, x: T, y: T) -> Self {
        Self::new(Chart::Face(face), [x, y])
    }

    pub fn side(phi: T, z: T) -> Self {
        Self::new(Chart::Side, [phi, z])
    }

    pub fn top(u: T, v: T) -> Self {
        Self::new(Chart::Top, [u, v])
    }

    pub fn bottom(u: T, v: T) -> Self {
        Self::new(Chart::Bottom, [u, v])
    }

    /// Same chart and local coordinates within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.chart == other.chart
            && (self.local[0] - other.local[0]).abs() <= tol
            && (self.local[1] - other.local[1]).abs() <= tol
    }
}

/// Tangent vector at `base` with components in the base chart's orthonormal frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector<T> {
    pub base: SurfacePoint<T>,
    pub components: [T; 2],
}

impl<T: Scalar> TangentVector<T> {
    pub fn new(base: SurfacePoint<T>, components: [T; 2]) -> Self {
        Self { base, components }
    }

    pub fn zero(base: SurfacePoint<T>) -> Self {
        Self::new(base, [T::zero(), T::zero()])
    }

    pub fn norm(&self) -> T {
        hypot2(self.components)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::new(self.base, scale2(self.components, s))
    }

    pub fn is_zero(&self) -> bool {
        self.components[0] == T::zero() && self.components[1] == T::zero()
    }
}

/// Inner product on the tangent cone: `|u||v| cos ∠(u, v)`, i.e. the dot product of
/// components in the shared chart frame.
pub fn inner<T: Scalar>(u: &TangentVector<T>, v: &TangentVector<T>) -> Result<T> {
    if !u.base.approx_eq(&v.base, T::tol(1e-12)) {
        return Err(Error::BaseMismatch);
    }
    if u.is_zero() || v.is_zero() {
        return Ok(T::zero());
    }
    Ok(dot2(u.components, v.components))
}

/// Angle between two tangent vectors at the same base, in `[0, π]`.
pub fn angle_between<T: Scalar>(u: &TangentVector<T>, v: &TangentVector<T>) -> Result<T> {
    let ip = inner(u, v)?;
    let nn = u.norm() * v.norm();
    if nn == T::zero() {
        return Ok(T::zero());
    }
    Ok((ip / nn).max(-T::one()).min(T::one()).acos())
}

/// Straight piece of a geodesic inside one chart, in that chart's local coordinates.
/// Cylinder side segments may leave `[0, 2π)` in φ so that they stay straight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T> {
    pub chart: Chart,
    pub start: [T; 2],
    pub end: [T; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath<T> {
    pub segments: Vec<Segment<T>>,
    pub length: T,
    pub crossings: Vec<SurfacePoint<T>>,
}

impl<T: Scalar> GeodesicPath<T> {
    pub fn empty() -> Self {
        Self {
            segments: Vec::new(),
            length: T::zero(),
            crossings: Vec::new(),
        }
    }

    /// Charts visited, in order, without repeats of consecutive entries.
    pub fn charts(&self) -> Vec<Chart> {
        let mut out: Vec<Chart> = Vec::new();
        for s in &self.segments {
            if out.last() != Some(&s.chart) {
                out.push(s.chart);
            }
        }
        out
    }
}

/// A minimising geodesic together with the information needed to detect ties.
#[derive(Clone, Debug, PartialEq)]
pub struct Geodesic<T> {
    pub length: T,
    pub path: GeodesicPath<T>,
    /// Unit initial direction in the start point's chart frame; zero when the endpoints
    /// coincide.
    pub direction: [T; 2],
    /// Shortest competing candidate whose initial direction differs from `direction`.
    pub runner_up: Option<(T, [T; 2])>,
}

impl<T: Scalar> Geodesic<T> {
    pub fn trivial() -> Self {
        Self {
            length: T::zero(),
            path: GeodesicPath::empty(),
            direction: [T::zero(), T::zero()],
            runner_up: None,
        }
    }

    /// True if no competing geodesic with a different direction is within `gap` of the
    /// minimal length.
    pub fn is_unique(&self, gap: T) -> bool {
        match self.runner_up {
            Some((len, _)) => len - self.length > gap,
            None => true,
        }
    }
}

/// Geometry parameters and curvature bounds of a surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryDescriptor<T> {
    pub kind: SurfaceKind,
    pub radius: Option<T>,
    pub half_height: Option<T>,
    pub kappa_lower: T,
    pub kappa_upper: T,
}

/// Common interface of the exact geodesic engines.
pub trait GeodesicSpace<T: Scalar> {
    fn descriptor(&self) -> GeometryDescriptor<T>;

    /// Rejects points whose chart does not belong to the surface or whose local
    /// coordinates fall outside the chart domain.
    fn check_point(&self, p: &SurfacePoint<T>) -> Result<()>;

    /// Re-expresses seam points in the smallest incident chart and wraps angles.
    fn canonicalize(&self, p: &SurfacePoint<T>) -> Result<SurfacePoint<T>>;

    fn embed(&self, p: &SurfacePoint<T>) -> Result<[T; 3]>;

    /// Minimising geodesic from `p` to `q`.
    fn geodesic(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<Geodesic<T>>;

    /// Endpoint of the locally minimising curve from `v.base` with initial velocity `v`.
    fn exp(&self, v: &TangentVector<T>) -> Result<SurfacePoint<T>>;

    /// Length of a chart segment under the chart metric.
    fn segment_length(&self, seg: &Segment<T>) -> T;

    fn distance(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<T> {
        Ok(self.geodesic(p, q)?.length)
    }

    fn log(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<TangentVector<T>> {
        let g = self.geodesic(p, q)?;
        let base = self.canonicalize(p)?;
        Ok(TangentVector::new(base, scale2(g.direction, g.length)))
    }

    /// `p #_t q`: the point at fraction `t` along the minimising geodesic.
    fn geodesic_point(
        &self,
        p: &SurfacePoint<T>,
        q: &SurfacePoint<T>,
        t: T,
    ) -> Result<SurfacePoint<T>> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::Domain(format!(
                "geodesic parameter {t} outside [0, 1]"
            )));
        }
        if t == T::zero() {
            return self.canonicalize(p);
        }
        if t == T::one() {
            return self.canonicalize(q);
        }
        let v = self.log(p, q)?;
        self.exp(&v.scaled(t))
    }

    /// Embeddings within `1e-12`.
    fn same_point(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<bool> {
        Ok(dist3(self.embed(p)?, self.embed(q)?) <= T::tol(1e-12))
    }
}

impl<T: Scalar, S: GeodesicSpace<T> + ?Sized> GeodesicSpace<T> for &S {
    fn descriptor(&self) -> GeometryDescriptor<T> {
        (**self).descriptor()
    }

    fn check_point(&self, p: &SurfacePoint<T>) -> Result<()> {
        (**self).check_point(p)
    }

    fn canonicalize(&self, p: &SurfacePoint<T>) -> Result<SurfacePoint<T>> {
        (**self).canonicalize(p)
    }

    fn embed(&self, p: &SurfacePoint<T>) -> Result<[T; 3]> {
        (**self).embed(p)
    }

    fn geodesic(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<Geodesic<T>> {
        (**self).geodesic(p, q)
    }

    fn exp(&self, v: &TangentVector<T>) -> Result<SurfacePoint<T>> {
        (**self).exp(v)
    }

    fn segment_length(&self, seg: &Segment<T>) -> T {
        (**self).segment_length(seg)
    }

    fn log(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<TangentVector<T>> {
        (**self).log(p, q)
    }
}

/// Either of the two supported surfaces.
#[derive(Clone, Debug)]
pub enum Surface<T> {
    Cube(Cube),
    Cylinder(Cylinder<T>),
}

impl<T: Scalar> Surface<T> {
    pub fn cube() -> Self {
        Surface::Cube(Cube::new())
    }

    pub fn cylinder(radius: T, half_height: T) -> Result<Self> {
        Ok(Surface::Cylinder(Cylinder::new(radius, half_height)?))
    }

    pub fn kind(&self) -> SurfaceKind {
        match self {
            Surface::Cube(_) => SurfaceKind::Cube,
            Surface::Cylinder(_) => SurfaceKind::Cylinder,
        }
    }

    /// Upper bound on the intrinsic diameter of the whole surface.
    pub fn diameter_bound(&self) -> T {
        match self {
            // face centre to opposite face centre is 2, plus half-diagonals at both ends
            Surface::Cube(_) => T::int(2) + T::SQRT_2(),
            Surface::Cylinder(c) => T::int(2) * (T::int(2) * c.half_height() + c.radius()),
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $g:ident => $e:expr) => {
        match $self {
            Surface::Cube($g) => $e,
            Surface::Cylinder($g) => $e,
        }
    };
}

impl<T: Scalar> GeodesicSpace<T> for Surface<T> {
    fn descriptor(&self) -> GeometryDescriptor<T> {
        dispatch!(self, g => g.descriptor())
    }

    fn check_point(&self, p: &SurfacePoint<T>) -> Result<()> {
        dispatch!(self, g => g.check_point(p))
    }

    fn canonicalize(&self, p: &SurfacePoint<T>) -> Result<SurfacePoint<T>> {
        dispatch!(self, g => g.canonicalize(p))
    }

    fn embed(&self, p: &SurfacePoint<T>) -> Result<[T; 3]> {
        dispatch!(self, g => g.embed(p))
    }

    fn geodesic(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<Geodesic<T>> {
        dispatch!(self, g => g.geodesic(p, q))
    }

    fn exp(&self, v: &TangentVector<T>) -> Result<SurfacePoint<T>> {
        dispatch!(self, g => g.exp(v))
    }

    fn segment_length(&self, seg: &Segment<T>) -> T {
        dispatch!(self, g => GeodesicSpace::<T>::segment_length(g, seg))
    }
}
