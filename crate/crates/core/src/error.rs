use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid catalog spec: {0}")]
    InvalidSpec(String),

    #[error("invalid radius {0}: radii must be positive")]
    InvalidRadius(f64),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("epsilon {value} outside the admissible range {range}")]
    InvalidEpsilon { value: f64, range: &'static str },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid time {0}: heat kernel times must be positive")]
    InvalidTime(f64),

    #[error("no Whitney ball of ball ({center}, {radius}) has radius in the central window [{lower}, {upper}]")]
    NoCentralBall { center: usize, radius: f64, lower: f64, upper: f64 },

    #[error("chain unavailable: {0}")]
    ChainUnavailable(String),

    #[error("variance set meets several components of the energy set; the Poincare ratio is unbounded")]
    DisconnectedEnergyBall,

    #[error("vertex {0} of the exterior is not covered by any 3-dilate")]
    CoverDefect(usize),

    #[error("exit region covers the whole space; exit time is infinite")]
    NoExit,

    #[error("exterior is nonempty but no exterior ball survives truncation")]
    UncoveredExterior,

    #[error("empty admissible window: {0}")]
    Window(String),

    #[error("insufficient scales: {found} usable radii, need at least {needed}")]
    InsufficientScales { found: usize, needed: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("dependency error: {0}")]
    Dependency(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
