use thiserror::Error;

use crate::geometry::Chart;

/// Errors raised by the geometry engines, the solver and the mesh oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid point on {chart}: {reason}")]
    InvalidPoint { chart: Chart, reason: String },

    /// The exponential-map trace passed (numerically) through a cube vertex.
    #[error("geodesic trace hits a cube vertex at {vertex:?}")]
    CornerHit { vertex: [f64; 3] },

    #[error("tangent vectors have different base points")]
    BaseMismatch,

    #[error("faces {src} and {dst} are not adjacent")]
    NoTransform { src: u8, dst: u8 },

    #[error("geodesic between the given points is not unique")]
    Ambiguous,

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(chart: Chart, reason: impl Into<String>) -> Self {
        Error::InvalidPoint {
            chart,
            reason: reason.into(),
        }
    }
}
