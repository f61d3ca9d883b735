//! Dense matrix kernels used blockwise in the Fourier domain.
//!
//! Everything here works on small (n <= 64) `nalgebra` matrices over either
//! `f64` or `Complex64`. Real input always goes through the same generic code
//! path instantiated at `f64`, so real kernels never allocate imaginary
//! storage.

mod inverse;
mod jordan;
mod schur;
mod svd;

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub use inverse::{
    drazin_inverse, group_inverse, inverse, matrix_rank, mp_inverse, mp_inverse_with_rank,
    rank_normal_form, DrazinMatrix, RankNormalForm,
};
pub use jordan::{jordan_complex, jordan_real, MatrixJordan};
pub use schur::{schur_complex, schur_real_ordered, MatrixSchur};
pub use svd::{svd, MatrixSvd};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

/// Scalars the kernels operate on: `f64` and `Complex64`.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl<T: ComplexField<RealField = f64> + Copy> Scalar for T {}

/// Decomposition tolerance for SVD/Schur reconstruction and unitarity.
pub const TAU_DEC: f64 = 1e-11;
/// Tolerance for the Penrose equations, relative to ||A||.
pub const TAU_PEN: f64 = 1e-10;
/// Jordan reconstruction tolerance; multiplied by ||A|| * cond(P).
pub const TAU_JORD: f64 = 1e-8;
/// Relative gap below which eigenvalues are treated as one cluster.
pub const DELTA_EIG: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("iteration did not converge after {iterations} iterations")]
    Convergence { iterations: usize },

    #[error("exchange of adjacent diagonal blocks at row {position} failed (residual {residual:.3e})")]
    SwapFailure { position: usize, residual: f64 },

    #[error("matrix is not diagonalizable within tolerance (eigenvalue near {re}{im:+}i)")]
    DefectiveBlock { re: f64, im: f64 },

    #[error("group inverse does not exist: rank(A^2) = {rank_sq} < rank(A) = {rank} (margin {margin:.3e})")]
    GroupInverseNotExist {
        rank: usize,
        rank_sq: usize,
        margin: f64,
    },

    #[error("matrix is singular (smallest singular value {sigma_min:.3e})")]
    Singular { sigma_min: f64 },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Default relative cutoff for numerical rank decisions on an `m x n` block.
///
/// Singular values at or below `default_rtol(m, n) * sigma_max` count as zero.
pub fn default_rtol(m: usize, n: usize) -> f64 {
    m.max(n).max(1) as f64 * f64::EPSILON * 1e4
}

pub(crate) fn ensure_square<T: Scalar>(a: &DMatrix<T>) -> Result<usize, KernelError> {
    if a.nrows() != a.ncols() {
        return Err(KernelError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub fn fro_norm<T: Scalar>(a: &DMatrix<T>) -> f64 {
    a.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

pub fn max_abs<T: Scalar>(a: &DMatrix<T>) -> f64 {
    a.iter().map(|x| x.modulus()).fold(0.0, f64::max)
}

pub fn to_complex(a: &RMat) -> CMat {
    a.map(|x| Complex64::new(x, 0.0))
}

pub fn conj(a: &CMat) -> CMat {
    a.map(|x| x.conj())
}

/// Householder reflector `H = I - beta v v*` with `H x = alpha e1`.
///
/// Returns `None` when `x[1..]` is already zero and `x[0]` needs no change.
pub(crate) fn householder<T: Scalar>(x: &DVector<T>) -> Option<(DVector<T>, f64)> {
    let tail: f64 = x.iter().skip(1).map(|v| v.modulus_squared()).sum();
    if tail == 0.0 {
        return None;
    }
    let norm = (x[0].modulus_squared() + tail).sqrt();
    let x0 = x[0];
    let phase = if x0.modulus() == 0.0 {
        T::one()
    } else {
        x0.scale(1.0 / x0.modulus())
    };
    // alpha = -phase * ||x|| avoids cancellation in v0 = x0 - alpha.
    let alpha = phase.scale(-norm);
    let mut v = x.clone();
    v[0] = x0 - alpha;
    let vnorm2: f64 = v.iter().map(|e| e.modulus_squared()).sum();
    Some((v, 2.0 / vnorm2))
}

/// Apply `H = I - beta v v*` from the left to rows `r0..r0+len(v)` of `a`,
/// columns `c0..`.
pub(crate) fn reflect_rows<T: Scalar>(a: &mut DMatrix<T>, v: &DVector<T>, beta: f64, r0: usize, c0: usize) {
    let len = v.len();
    for c in c0..a.ncols() {
        let mut dot = T::zero();
        for i in 0..len {
            dot += v[i].conjugate() * a[(r0 + i, c)];
        }
        let dot = dot.scale(beta);
        for i in 0..len {
            a[(r0 + i, c)] -= v[i] * dot;
        }
    }
}

/// Apply `H = I - beta v v*` from the right to columns `c0..c0+len(v)` of
/// `a`, rows `0..row_end`.
pub(crate) fn reflect_cols<T: Scalar>(a: &mut DMatrix<T>, v: &DVector<T>, beta: f64, c0: usize, row_end: usize) {
    let len = v.len();
    for r in 0..row_end {
        let mut dot = T::zero();
        for i in 0..len {
            dot += a[(r, c0 + i)] * v[i];
        }
        let dot = dot.scale(beta);
        for i in 0..len {
            a[(r, c0 + i)] -= dot * v[i].conjugate();
        }
    }
}

/// Unitary Hessenberg reduction `A = Q H Q*`.
pub(crate) fn hessenberg<T: Scalar>(a: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = DMatrix::<T>::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let x = DVector::from_iterator(n - k - 1, (k + 1..n).map(|i| h[(i, k)]));
        if let Some((v, beta)) = householder(&x) {
            reflect_rows(&mut h, &v, beta, k + 1, k);
            reflect_cols(&mut h, &v, beta, k + 1, n);
            reflect_cols(&mut q, &v, beta, k + 1, n);
            for i in k + 2..n {
                h[(i, k)] = T::zero();
            }
        }
    }
    (q, h)
}

/// Full QR of a tall matrix by Householder reflections; returns the square
/// unitary factor only.
pub(crate) fn full_q<T: Scalar>(a: &DMatrix<T>) -> DMatrix<T> {
    let (m, n) = a.shape();
    let mut r = a.clone();
    let mut q = DMatrix::<T>::identity(m, m);
    for k in 0..n.min(m.saturating_sub(1)) {
        let x = DVector::from_iterator(m - k, (k..m).map(|i| r[(i, k)]));
        if let Some((v, beta)) = householder(&x) {
            reflect_rows(&mut r, &v, beta, k, k);
            reflect_cols(&mut q, &v, beta, k, m);
        }
    }
    q
}

/// Residual `||M* M - I||_F`.
pub fn unitarity_residual<T: Scalar>(m: &DMatrix<T>) -> f64 {
    let g = m.adjoint() * m;
    fro_norm(&(g - DMatrix::<T>::identity(m.ncols(), m.ncols())))
}
