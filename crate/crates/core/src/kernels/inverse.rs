//! Matrix inverses: ordinary, Moore-Penrose, Drazin, group; and the rank
//! normal form used for idempotent factorizations.

use nalgebra::DMatrix;

use super::{default_rtol, ensure_square, svd, KernelError, MatrixSvd, Scalar};

fn pinv_from_svd<T: Scalar>(f: &MatrixSvd<T>, rank: usize) -> DMatrix<T> {
    let (m, n) = (f.u.nrows(), f.v.nrows());
    let mut out = DMatrix::<T>::zeros(n, m);
    for k in 0..rank {
        let inv = 1.0 / f.s[k];
        let vk = f.v.column(k);
        let uk = f.u.column(k);
        for i in 0..n {
            let vi = vk[i].scale(inv);
            for j in 0..m {
                out[(i, j)] += vi * uk[j].conjugate();
            }
        }
    }
    out
}

/// Moore-Penrose inverse. Singular values at or below `rtol * sigma_max`
/// are treated as zero; `None` uses [`default_rtol`].
pub fn mp_inverse<T: Scalar>(a: &DMatrix<T>, rtol: Option<f64>) -> Result<DMatrix<T>, KernelError> {
    let rtol = rtol.unwrap_or_else(|| default_rtol(a.nrows(), a.ncols()));
    let f = svd(a)?;
    Ok(pinv_from_svd(&f, f.rank(rtol)))
}

/// Moore-Penrose inverse of the best rank-`rank` approximation of `a`.
pub fn mp_inverse_with_rank<T: Scalar>(a: &DMatrix<T>, rank: usize) -> Result<DMatrix<T>, KernelError> {
    let f = svd(a)?;
    let rank = rank.min(f.s.len());
    Ok(pinv_from_svd(&f, rank))
}

/// Numerical rank with singular values compared against `rtol * reference`.
/// `reference` defaults to the largest singular value of `a`.
pub fn matrix_rank<T: Scalar>(a: &DMatrix<T>, rtol: f64, reference: Option<f64>) -> Result<usize, KernelError> {
    let f = svd(a)?;
    let r = reference.unwrap_or_else(|| f.s.first().copied().unwrap_or(0.0));
    Ok(f.s.iter().filter(|&&s| s > rtol * r).count())
}

/// Two-sided inverse. Fails with `Singular` when the smallest singular value
/// is at or below `rtol * sigma_max`.
pub fn inverse<T: Scalar>(a: &DMatrix<T>, rtol: Option<f64>) -> Result<DMatrix<T>, KernelError> {
    let n = ensure_square(a)?;
    let rtol = rtol.unwrap_or_else(|| default_rtol(n, n));
    let f = svd(a)?;
    let smax = f.s.first().copied().unwrap_or(0.0);
    let smin = f.s.last().copied().unwrap_or(0.0);
    if n > 0 && !(smin > rtol * smax) {
        return Err(KernelError::Singular { sigma_min: smin });
    }
    Ok(pinv_from_svd(&f, n))
}

#[derive(Debug, Clone)]
pub struct DrazinMatrix<T: Scalar> {
    pub inverse: DMatrix<T>,
    /// Least `k` with `rank(A^{k+1}) == rank(A^k)`.
    pub index: usize,
    /// `rank(A^k)` for `k = 0..=index + 1`.
    pub ranks: Vec<usize>,
}

/// Ranks of `A^0, A^1, ...` until two consecutive ranks agree.
///
/// The rank of `A^k` is measured against `rtol * k * sigma_max(A)^k`, the
/// rounding level of a k-fold product.
fn power_ranks<T: Scalar>(a: &DMatrix<T>, rtol: f64) -> Result<(Vec<usize>, Vec<DMatrix<T>>), KernelError> {
    let n = ensure_square(a)?;
    let smax = svd(a)?.s.first().copied().unwrap_or(0.0);
    let mut ranks = vec![n];
    let mut powers = vec![DMatrix::<T>::identity(n, n)];
    for k in 1..=n + 1 {
        let next = &powers[k - 1] * a;
        let r = matrix_rank(&next, rtol * k as f64, Some(smax.powi(k as i32)))?;
        ranks.push(r);
        powers.push(next);
        if ranks[k] == ranks[k - 1] {
            break;
        }
    }
    Ok((ranks, powers))
}

/// Drazin inverse via `A^D = A^k (A^{2k+1})^+ A^k`, `k` the index.
pub fn drazin_inverse<T: Scalar>(a: &DMatrix<T>, rtol: Option<f64>) -> Result<DrazinMatrix<T>, KernelError> {
    let n = ensure_square(a)?;
    let rtol = rtol.unwrap_or_else(|| default_rtol(n, n));
    let (ranks, powers) = power_ranks(a, rtol)?;
    let index = ranks.windows(2).position(|w| w[0] == w[1]).unwrap_or(n);
    let rank = ranks[index];
    if rank == 0 {
        return Ok(DrazinMatrix {
            inverse: DMatrix::zeros(n, n),
            index,
            ranks,
        });
    }
    let ak = &powers[index];
    let mut big = ak.clone();
    for _ in 0..index + 1 {
        big = big * a;
    }
    // rank(A^{2k+1}) = rank(A^k); truncating at that rank avoids a second
    // tolerance decision on a matrix whose conditioning is cubed.
    let inverse = ak * mp_inverse_with_rank(&big, rank)? * ak;
    Ok(DrazinMatrix { inverse, index, ranks })
}

/// Group inverse; exists iff `rank(A^2) == rank(A)`.
pub fn group_inverse<T: Scalar>(a: &DMatrix<T>, rtol: Option<f64>) -> Result<DMatrix<T>, KernelError> {
    let n = ensure_square(a)?;
    let rtol = rtol.unwrap_or_else(|| default_rtol(n, n));
    let fa = svd(a)?;
    let smax = fa.s.first().copied().unwrap_or(0.0);
    let rank = fa.rank(rtol);
    let a2 = a * a;
    let f2 = svd(&a2)?;
    let thr = rtol * 2.0 * smax * smax;
    let rank_sq = f2.s.iter().filter(|&&s| s > thr).count();
    if rank_sq < rank {
        // how far the deciding singular value of A^2 sits below the cutoff
        let deciding = f2.s.get(rank - 1).copied().unwrap_or(0.0);
        return Err(KernelError::GroupInverseNotExist {
            rank,
            rank_sq,
            margin: deciding - thr,
        });
    }
    Ok(drazin_inverse(a, Some(rtol))?.inverse)
}

/// `U^{-1} A V^{-1} = [[I_r, 0], [0, 0]]` built from the SVD:
/// `U = U_svd diag(s_1..s_r, 1..1)`, `V = V_svd*`.
#[derive(Debug, Clone)]
pub struct RankNormalForm<T: Scalar> {
    pub u: DMatrix<T>,
    pub u_inv: DMatrix<T>,
    pub v: DMatrix<T>,
    pub v_inv: DMatrix<T>,
    pub rank: usize,
}

impl<T: Scalar> RankNormalForm<T> {
    /// The `m x n` idempotent pattern `[[I_r, 0], [0, 0]]`.
    pub fn e(&self) -> DMatrix<T> {
        let mut e = DMatrix::<T>::zeros(self.u.nrows(), self.v.nrows());
        for i in 0..self.rank {
            e[(i, i)] = T::one();
        }
        e
    }
}

pub fn rank_normal_form<T: Scalar>(a: &DMatrix<T>, rtol: Option<f64>) -> Result<RankNormalForm<T>, KernelError> {
    let (m, n) = a.shape();
    let rtol = rtol.unwrap_or_else(|| default_rtol(m, n));
    let f = svd(a)?;
    let rank = f.rank(rtol);
    let mut u = f.u.clone();
    let mut u_inv = f.u.adjoint();
    for k in 0..rank {
        let s = f.s[k];
        for i in 0..m {
            u[(i, k)] = u[(i, k)].scale(s);
            u_inv[(k, i)] = u_inv[(k, i)].scale(1.0 / s);
        }
    }
    Ok(RankNormalForm {
        u,
        u_inv,
        v: f.v.adjoint(),
        v_inv: f.v,
        rank,
    })
}
