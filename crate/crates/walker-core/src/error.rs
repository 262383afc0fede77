use thiserror::Error;

/// Unified error type for graph construction, spectral decomposition,
/// dynamics, and estimation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("gamma must be strictly positive, got {0}")]
    NonPositiveGamma(f64),

    #[error("dimension {dim} exceeds the configured maximum {max} (override with WALKER_MAX_DIM)")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("preparation has {got} amplitudes but the graph has {expected} nodes")]
    DimensionMismatch { got: usize, expected: usize },

    #[error("amplitudes are not normalized: sum of squared moduli is {0}")]
    NotNormalized(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "singular Fisher information: outcome {outcome} has probability {prob:.3e} \
         but derivative {deriv:.3e}; the FI diverges at this parameter point"
    )]
    SingularFi {
        outcome: String,
        prob: f64,
        deriv: f64,
    },

    #[error(
        "eigenvector phase alignment across the finite-difference step failed \
         (overlap {overlap:.6}); use the fidelity-based QFI oracle instead"
    )]
    PhaseAlignment { overlap: f64 },

    #[error("likelihood is flat across the bracket; gamma is unidentifiable from these counts")]
    Unidentifiable,

    #[error("numerical diagonalization failed: {0}")]
    Numerical(String),

    #[error("invalid sweep config: {0}")]
    InvalidSweep(String),

    #[error("{family} graphs support {supported} only (requested: {requested})")]
    UnsupportedOperation {
        family: &'static str,
        supported: &'static str,
        requested: &'static str,
    },

    #[error("1/gamma^2 = {0} sits on the small-time/large-time regime boundary (= 2 within 1e-9)")]
    RegimeBoundary(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
