//! Real third-order tensors under the t-product.
//!
//! The t-product `A * B = fold(bcirc(A) unfold(B))` turns `n x n x p` real
//! tensors into a ring. A discrete Fourier transform along the third mode
//! block-diagonalizes `bcirc(A)`; real tensors produce conjugate-paired
//! Fourier blocks. Every factorization and generalized inverse in this crate
//! is computed blockwise on one block per conjugate pair, mirrored onto the
//! partner, and transformed back with a certified realness check.

pub mod error;
pub mod factor;
pub mod fourier;
pub mod gen;
pub mod ginv;
pub mod io;
pub mod kernels;
pub mod report;
pub mod structure;
pub mod tensor;

pub mod cli;

pub use error::{Error, Result};
pub use fourier::{from_fourier, to_fourier, FourierBlocks, Realness};
pub use report::{ResidualReport, Tolerances};
pub use tensor::{BlockCirculant, Tensor3};
