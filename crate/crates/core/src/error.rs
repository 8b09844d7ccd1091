use thiserror::Error;

/// Errors raised by the solvers and constructors in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("distortion {target} is below the smallest achievable distortion {min}")]
    InfeasibleDistortion { target: f64, min: f64 },

    #[error("multiplier sweep could not reach distortion {target:?} within slack (closest {achieved:?})")]
    SweepResolution { target: Vec<f64>, achieved: Vec<f64> },

    #[error("no feasible point found within budget (best marginal residual {best_residual:e})")]
    Infeasible { best_residual: f64 },

    #[error("enumeration budget exceeded: {required} > {limit}")]
    Budget { required: f64, limit: f64 },

    #[error("rate is infinite at this operating point")]
    InfiniteRate,
}

pub type Result<T> = std::result::Result<T, Error>;
