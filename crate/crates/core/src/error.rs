use thiserror::Error;

use crate::kernels::KernelError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite entry at (i={i}, j={j}, k={k})")]
    NonFinite { i: usize, j: usize, k: usize },

    #[error("matrix is not block circulant: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotBlockCirculant { deviation: f64, tolerance: f64 },

    #[error("conjugate pairing violated: residual {residual:.3e} exceeds {tolerance:.3e} ({check})")]
    PairingViolation {
        check: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("inverse transform is not real: max |Im| = {max_imag:.3e} exceeds {tolerance:.3e}")]
    RealnessViolation { max_imag: f64, tolerance: f64 },

    /// A blockwise matrix operation failed on Fourier block `index` (1-based).
    #[error("block operation failed on Fourier block {index}: {source}")]
    BlockOp {
        index: usize,
        #[source]
        source: KernelError,
    },

    #[error("Fourier block {index} is singular (smallest singular value {sigma_min:.3e})")]
    Singular { index: usize, sigma_min: f64 },

    #[error(
        "group inverse does not exist: Fourier block {index} has rank(A^2) = {rank_sq} < rank(A) = {rank} (margin {margin:.3e})"
    )]
    GroupInverseNotExist {
        index: usize,
        rank: usize,
        rank_sq: usize,
        margin: f64,
    },

    #[error("Fourier block {index} is not diagonalizable within tolerance (eigenvalue near {re}{im:+}i)")]
    DefectiveBlock { index: usize, re: f64, im: f64 },

    #[error("partition violation: slice {slice} needs a diagonal block larger than 2x2 at row {row}")]
    PartitionViolation { slice: usize, row: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that reflect the mathematics of the input rather
    /// than malformed usage.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::GroupInverseNotExist { .. }
                | Error::DefectiveBlock { .. }
                | Error::PartitionViolation { .. }
                | Error::BlockOp { .. }
                | Error::RealnessViolation { .. }
                | Error::PairingViolation { .. }
        )
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// Lift a kernel failure on Fourier block `index` (1-based) into the
    /// most specific tensor-level error.
    pub(crate) fn from_block(index: usize, err: KernelError) -> Self {
        match err {
            KernelError::Singular { sigma_min } => Error::Singular { index, sigma_min },
            KernelError::GroupInverseNotExist {
                rank,
                rank_sq,
                margin,
            } => Error::GroupInverseNotExist {
                index,
                rank,
                rank_sq,
                margin,
            },
            KernelError::DefectiveBlock { re, im } => Error::DefectiveBlock { index, re, im },
            other => Error::BlockOp {
                index,
                source: other,
            },
        }
    }
}
