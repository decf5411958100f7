use thiserror::Error;

/// Errors produced by the solver, closed forms and fits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("evaluation at distance {distance:e} from a pole (limit 1e-8)")]
    NearPole { distance: f64 },

    #[error("bound wave function vanishes at r = {r} (node)")]
    NodeSingularity { r: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed table: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, Error>;
