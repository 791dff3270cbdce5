//! Forward-backward splitting on two nonsmooth surfaces: the unit cube and the closed
//! capped cylinder.
//!
//! - [`geometry`]: charts, points, tangent vectors and the [`GeodesicSpace`] interface.
//! - [`cube`], [`cylinder`]: exact distance, geodesic, log and exp engines.
//! - [`comparison`]: curvature comparison constants and triangle checks.
//! - [`solver`]: the objective, the splitting iteration and its diagnostics.
//! - [`oracle`]: mesh shortest paths and grid search used to cross-check the engines.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix `f64`.

// `!(a > b)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comparison;
pub mod cube;
pub mod cylinder;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::GeodesicSpace;
pub use scalar::Scalar;

pub type Point = geometry::SurfacePoint<f64>;
pub type Tangent = geometry::TangentVector<f64>;
pub type Geodesic = geometry::Geodesic<f64>;
pub type Surface = geometry::Surface<f64>;
pub type Cylinder = cylinder::Cylinder<f64>;
pub type Problem<S = Surface> = solver::Problem<f64, S>;
pub type StepSchedule = solver::StepSchedule<f64>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type IterateLog = solver::IterateLog<f64>;
pub type CurvatureConstants = comparison::CurvatureConstants<f64>;
pub type SurfaceMesh = oracle::SurfaceMesh<f64>;
