//! Error types shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand shapes are not conformable for the named operation.
    #[error("{op}: dimension mismatch, left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    /// A pivot modulus fell below the singularity threshold during
    /// Gaussian elimination. Carries the failing pivot index.
    #[error("singular matrix: pivot {pivot} has modulus {modulus:.3e} below threshold {threshold:.3e}")]
    SingularMatrix {
        pivot: usize,
        modulus: f64,
        threshold: f64,
    },

    /// Requested rank outside 1..=min(rows, cols).
    #[error("rank {r} out of range for a matrix with min dimension {min_dim}")]
    RankOutOfRange { r: usize, min_dim: usize },

    /// A complex matrix claimed to be a quaternion adjoint does not have
    /// the required block symmetry.
    #[error("adjoint asymmetry: relative deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    Asymmetry { deviation: f64, tolerance: f64 },

    /// Jacobi sweeps hit the cap before the off-diagonal threshold was
    /// reached. Carries the residual off-diagonal measure.
    #[error("SVD did not converge in {sweeps} sweeps, residual off-diagonal {off_norm:.3e}")]
    Convergence { sweeps: usize, off_norm: f64 },

    /// Adjoint singular values could not be matched into pairs.
    #[error("singular value pairing failed at index {index}: gap {gap:.3e} exceeds tolerance {tolerance:.3e}")]
    Pairing {
        index: usize,
        gap: f64,
        tolerance: f64,
    },

    /// The clipped search window holds fewer candidate patches than the
    /// requested group size.
    #[error("search window holds {available} candidate patches but {required} are required")]
    WindowTooSmall { available: usize, required: usize },

    /// A configuration value violates its documented invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Image too small for the requested operation.
    #[error("image side {side} below minimum {min}")]
    TooSmall { side: usize, min: usize },
}
