use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{field} must be positive and finite, got {value}")]
    NonPositive { field: &'static str, value: f64 },

    #[error("sigma must lie in (0, pi/2), got {0}")]
    SigmaOutOfRange(f64),

    #[error("time must be strictly positive for {0} (degenerate boundary-value problem at t = 0)")]
    DegenerateTime(&'static str),

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("semiclassical propagator invalid at t = {time}: validity ratio {ratio} exceeds {limit}")]
    ValidityExceeded { time: f64, ratio: f64, limit: f64 },

    #[error(
        "P(theta, t) has no interior maximum in t at theta = {theta} (needs |theta| > sigma/sqrt(2) = {threshold})"
    )]
    NoPeak { theta: f64, threshold: f64 },

    #[error("no interior maximum of P(sigma, t) found before t = {t_max} (validity window); the semiclassical regime has broken down")]
    NoNumericPeak { t_max: f64 },

    #[error("grid too coarse: {nodes} nodes inside [-3 sigma, 3 sigma], need at least {required}")]
    GridTooCoarse { nodes: usize, required: usize },

    #[error("angular grid needs at least {min} interior points, got {got}")]
    GridTooSmall { got: usize, min: usize },

    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),

    #[error(
        "tridiagonal solve failed at row {row}: pivot magnitude {pivot:e} (smallest diagonal magnitude {min_diag:e})"
    )]
    SingularSystem { row: usize, pivot: f64, min_diag: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("{0}")]
    InvalidInput(String),
}
