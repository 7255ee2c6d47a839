use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {requested} exceeds prepared capacity {max}")]
    Capacity { requested: usize, max: usize },

    #[error("{what} did not converge (estimate {estimate:e}, error {error:e})")]
    Convergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("|x - y| = {gap:e} is inside the Christoffel-Darboux proximity band; use the direct sum")]
    Proximity { gap: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
