use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular limit: epsilon = 0 has no full vector field, use the layer or reduced problem")]
    SingularLimit,

    #[error("no real scaling: {0}")]
    NoRealScaling(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no folded node: lower folded singularity is {0}")]
    NoFoldedNode(String),

    #[error("canard hits x-nullcline: strong canard turned back toward L- at x = {x:.6}, z = {z:.6}")]
    CanardHitsNullcline { x: f64, z: f64 },

    #[error("canard did not reach x = {x_stop} within the integration horizon")]
    CanardIncomplete { x_stop: f64 },

    #[error("orbit trapped: slow arc on M_A+ settled near ({x:.6}, {z:.6}) before reaching L+")]
    OrbitTrapped { x: f64, z: f64 },

    #[error("non-transversal: slow arc meets L+ at z = {z:.9} where x' = {xdot:e}")]
    NonTransversal { z: f64, xdot: f64 },

    #[error("non-finite derivative at t = {t}, state = {state:?}")]
    NonFinite { t: f64, state: Vec<f64> },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("invalid integrator config: {0}")]
    Config(String),

    #[error("no oscillation: {0}")]
    NoOscillation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a numeric failure.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidParams(_) | Error::Parse(_) | Error::Json(_) | Error::Config(_))
    }
}
