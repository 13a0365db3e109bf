use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {found} does not match node count {expected}")]
    FieldLength { expected: usize, found: usize },

    #[error("non-finite input at node {node}")]
    NonFinite { node: usize },

    #[error("degenerate metric at node {node} (det = {det:e})")]
    DegenerateMetric { node: usize, det: f64 },

    #[error("surface has no boundary")]
    NoBoundary,

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownData(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {point:?} outside the domain of `{data}`")]
    OutsideDomain { data: String, point: [f64; 3] },

    #[error("surface is not immersed at node {node}")]
    ImmersionFailure { node: usize },

    #[error("boundary node {node} lies off the support surface (residual {residual:e})")]
    BoundaryOffSupport { node: usize, residual: f64 },

    #[error("empty sample set")]
    EmptySampleSet,

    #[error("`{0}` requires a spacetime extension")]
    MissingExtension(String),

    #[error("`{0}` provides no time slicing")]
    MissingSlicing(String),

    #[error("operator/boundary mismatch: {0}")]
    BoundaryMismatch(String),

    #[error("contact angle {0} outside (1e-3, pi - 1e-3)")]
    ContactAngle(f64),

    #[error("not a MOTS: max |theta+| = {max_theta:e} exceeds tolerance {tol:e}")]
    NotAMots { max_theta: f64, tol: f64 },

    #[error("null expansion theta- vanishes at node {node}")]
    VanishingThetaMinus { node: usize },

    #[error("mean curvature vanishes at node {node}")]
    VanishingMeanCurvature { node: usize },

    #[error("unsupported operator: {0}")]
    Unsupported(String),

    #[error("iteration failed to converge after {iterations} iterations (last change {last_change:e})")]
    IterationFailure { iterations: usize, last_change: f64 },

    #[error("linear solver failure: {0}")]
    LinearSolver(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
