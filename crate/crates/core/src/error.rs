use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({0}, {1}) is shared by {2} triangles, expected 2")]
    NonManifold(usize, usize, usize),
    #[error("vertex {0} has a disconnected or pinched triangle fan")]
    NonManifoldVertex(usize),
    #[error("edge ({0}, {1}) lies on an open boundary")]
    OpenBoundary(usize, usize),
    #[error("edge ({0}, {1}) is traversed twice in the same direction")]
    InconsistentWinding(usize, usize),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("degenerate triangle {0}")]
    DegenerateTriangle(usize),
    #[error("level {level} exceeds the maximum {max}")]
    LevelTooLarge { level: usize, max: usize },
    #[error("flow integration failed at t = {0}")]
    IntegrationFailure(f64),
    #[error("nodal field does not belong to this mesh")]
    EpochMismatch,
    #[error("non-finite value at vertex {0}")]
    NonFiniteValue(usize),
    #[error("point at distance {radius} from the origin is off the sphere of radius {expected}")]
    OffSurface { radius: f64, expected: f64 },
    #[error("initial vertex {0} is not on the unit sphere")]
    OffSphereInitialMesh(usize),
    #[error("initial vertex {0} is not on the initial surface")]
    OffSurfaceInitialMesh(usize),
    #[error("update produced a non-finite value at vertex {vertex} (t = {time})")]
    NonFiniteUpdate { vertex: usize, time: f64 },
    #[error("mesh sizes must be strictly decreasing (row {0})")]
    NonMonotoneH(usize),
    #[error("errors must be positive and finite (row {0})")]
    NonPositiveError(usize),
    #[error("radial projection failed for direction {0}")]
    ProjectionFailure(usize),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Errors caused by the user's input rather than by the computation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Syntax { .. }
                | Error::InvalidParams(_)
                | Error::Io { .. }
                | Error::InvalidMesh(_)
                | Error::NonManifold(..)
                | Error::NonManifoldVertex(_)
                | Error::OpenBoundary(..)
                | Error::InconsistentWinding(..)
                | Error::LevelTooLarge { .. }
                | Error::OffSphereInitialMesh(_)
                | Error::OffSurfaceInitialMesh(_)
        )
    }
}
