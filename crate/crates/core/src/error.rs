use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension n={0}: must be an integer >= 2")]
    InvalidDimension(i64),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid weight alpha={0}: must lie in (0, 1)")]
    InvalidWeight(f64),

    #[error("point outside the admissible domain: {0}")]
    Domain(String),

    #[error("integration cannot start: guard rejects the initial state at x={0}")]
    InvalidStart(f64),

    #[error("sample point {x} outside trajectory range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("ODE solve failed: {0}")]
    SolverFailure(String),

    #[error("could not bracket the shooting parameter after {0} doublings")]
    NoBracket(usize),

    #[error("H - sH' changes sign on the grid ({positive} positive, {negative} negative nodes)")]
    MixedSign { positive: usize, negative: usize },

    #[error("energy evaluation failed: {0}")]
    Evaluation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
