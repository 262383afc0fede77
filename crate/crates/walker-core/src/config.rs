use crate::error::{Error, Result};

/// Default cap on the Hilbert-space dimension (= Hypercube(12)).
///
/// Dense storage and O(n^3) diagonalization are intentional: the library
/// targets desk-scale verification, not large-scale simulation.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Environment variable that overrides [`DEFAULT_MAX_DIM`] at runtime.
pub const MAX_DIM_ENV: &str = "WALKER_MAX_DIM";

/// Currently effective dimension cap.
///
/// Read per call so tests and CLI invocations can adjust the limit via
/// the `WALKER_MAX_DIM` environment variable without rebuilding.
pub fn max_dim() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_DIM)
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    let max = max_dim();
    if dim > max {
        Err(Error::DimensionTooLarge { dim, max })
    } else {
        Ok(())
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        Err(Error::NonPositiveGamma(gamma))
    } else {
        Ok(())
    }
}
