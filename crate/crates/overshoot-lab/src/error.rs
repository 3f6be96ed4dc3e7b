use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative scheme failed to reach the requested accuracy.
    #[error("no convergence after {iterations} iterations in {context}")]
    Convergence { context: &'static str, iterations: usize },
    /// A Monte Carlo sign test landed in the grey zone between 2 and 3
    /// standard errors; the caller should increase the sample size.
    #[error("inconclusive estimate: |mean| = {mean_abs:.3e} vs SE = {std_err:.3e}")]
    Inconclusive { mean_abs: f64, std_err: f64 },
    /// Every simulated path was censored; no data to aggregate.
    #[error("degenerate sample: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
