//! Jordan forms in the diagonalizable regime.
//!
//! Eigenvectors come from back-substitution on the complex Schur form.
//! Eigenvalues closer than `DELTA_EIG` (relative) are treated as a cluster;
//! a cluster is accepted only if the triangular coupling inside it vanishes,
//! i.e. the cluster has a full eigenvector basis. Anything else is reported
//! as `DefectiveBlock`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ensure_square, fro_norm, schur_complex, svd, to_complex, CMat, KernelError, RMat, Scalar, DELTA_EIG, TAU_JORD};

/// `A = P J P^{-1}`.
///
/// Complex variant: `J` diagonal with eigenvalues sorted by (re, im).
/// Real variant: 1x1 blocks for real eigenvalues (ascending) followed by
/// 2x2 blocks `[[a, b], [-b, a]]` for each pair `a +- bi` with `b > 0`,
/// sorted by `(a, b)`.
#[derive(Debug, Clone)]
pub struct MatrixJordan<T: Scalar> {
    pub p: DMatrix<T>,
    pub p_inv: DMatrix<T>,
    pub j: DMatrix<T>,
    pub partition: Vec<usize>,
    /// 2-norm condition number of `p`.
    pub cond: f64,
}

impl<T: Scalar> MatrixJordan<T> {
    pub fn reconstruct(&self) -> DMatrix<T> {
        &self.p * &self.j * &self.p_inv
    }
}

struct Eigen {
    values: Vec<Complex64>,
    vectors: CMat,
}

fn eigen_diagonalizable(a: &CMat) -> Result<Eigen, KernelError> {
    let n = ensure_square(a)?;
    let schur = schur_complex(a)?;
    let t = &schur.t;
    let scale = fro_norm(a).max(f64::MIN_POSITIVE);
    let gap = DELTA_EIG * scale;
    let coupling_tol = 1e-8 * scale;

    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut num = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                num += t[(i, j)] * y[(j, k)];
            }
            let den = t[(i, i)] - lambda;
            if den.norm() <= gap {
                if num.norm() > coupling_tol {
                    return Err(KernelError::DefectiveBlock {
                        re: lambda.re,
                        im: lambda.im,
                    });
                }
                y[(i, k)] = Complex64::new(0.0, 0.0);
            } else {
                y[(i, k)] = -num / den;
            }
        }
    }
    let mut v = &schur.u * y;
    for k in 0..n {
        let nrm = v.column(k).norm();
        let ph = super::svd::unit_phase_of_largest(&v, k);
        let f = ph / nrm;
        for r in 0..n {
            v[(r, k)] *= f;
        }
    }
    let values = (0..n).map(|k| t[(k, k)]).collect();
    Ok(Eigen { values, vectors: v })
}

/// Sort order for eigenvalues: by real part, then imaginary part. Real
/// parts within `tol` of each other are compared as equal, so rounding
/// noise cannot flip the order of a conjugate pair.
fn lex_order(values: &[Complex64], idx: &mut [usize], tol: f64) {
    let mut by_re: Vec<usize> = idx.to_vec();
    by_re.sort_by(|&x, &y| values[x].re.total_cmp(&values[y].re));
    let mut key = vec![0.0; values.len()];
    let mut anchor = f64::NEG_INFINITY;
    for &k in &by_re {
        if values[k].re - anchor > tol {
            anchor = values[k].re;
        }
        key[k] = anchor;
    }
    idx.sort_by(|&x, &y| key[x].total_cmp(&key[y]).then(values[x].im.total_cmp(&values[y].im)));
}

fn finish<T: Scalar>(a: &DMatrix<T>, p: DMatrix<T>, j: DMatrix<T>, partition: Vec<usize>) -> Result<MatrixJordan<T>, KernelError> {
    let f = svd(&p)?;
    let smax = f.s.first().copied().unwrap_or(0.0);
    let smin = f.s.last().copied().unwrap_or(0.0);
    let diag = j.diagonal();
    let witness = diag.iter().next().copied().unwrap_or_else(T::zero);
    let defect = || KernelError::DefectiveBlock {
        re: witness.real(),
        im: witness.imaginary(),
    };
    if !(smin > 1e-12 * smax) {
        return Err(defect());
    }
    let cond = smax / smin;
    let p_inv = p.clone().try_inverse().ok_or_else(defect)?;
    let out = MatrixJordan { p, p_inv, j, partition, cond };
    let resid = fro_norm(&(out.reconstruct() - a));
    if resid > TAU_JORD * fro_norm(a).max(1.0) * cond {
        return Err(defect());
    }
    Ok(out)
}

pub fn jordan_complex(a: &CMat) -> Result<MatrixJordan<Complex64>, KernelError> {
    let n = ensure_square(a)?;
    let eig = eigen_diagonalizable(a)?;
    let mut order: Vec<usize> = (0..n).collect();
    lex_order(&eig.values, &mut order, DELTA_EIG * fro_norm(a).max(1.0));
    let mut p = CMat::zeros(n, n);
    let mut j = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        p.set_column(dst, &eig.vectors.column(src));
        j[(dst, dst)] = eig.values[src];
    }
    finish(a, p, j, vec![1; n])
}

pub fn jordan_real(a: &RMat) -> Result<MatrixJordan<f64>, KernelError> {
    let n = ensure_square(a)?;
    let eig = eigen_diagonalizable(&to_complex(a))?;
    let scale = fro_norm(a).max(f64::MIN_POSITIVE);
    let real_tol = DELTA_EIG * scale;

    let mut reals: Vec<(f64, usize)> = Vec::new();
    let mut uppers: Vec<(Complex64, usize)> = Vec::new();
    let mut lowers = 0usize;
    for (k, l) in eig.values.iter().enumerate() {
        if l.im.abs() <= real_tol {
            reals.push((l.re, k));
        } else if l.im > 0.0 {
            uppers.push((*l, k));
        } else {
            lowers += 1;
        }
    }
    if lowers != uppers.len() {
        // conjugate pairs do not match up; the real structure is unreliable
        let l = uppers.first().map(|u| u.0).unwrap_or_default();
        return Err(KernelError::DefectiveBlock { re: l.re, im: l.im });
    }
    reals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut up: Vec<usize> = (0..uppers.len()).collect();
    let up_vals: Vec<Complex64> = uppers.iter().map(|u| u.0).collect();
    lex_order(&up_vals, &mut up, real_tol);
    let uppers: Vec<(Complex64, usize)> = up.iter().map(|&i| uppers[i]).collect();

    let mut p = RMat::zeros(n, n);
    let mut j = RMat::zeros(n, n);
    let mut partition = Vec::new();
    let mut col = 0;
    for &(lam, k) in &reals {
        let v = eig.vectors.column(k);
        let re = v.map(|x| x.re);
        let nrm = re.norm();
        p.set_column(col, &(re / nrm));
        j[(col, col)] = lam;
        partition.push(1);
        col += 1;
    }
    for &(lam, k) in &uppers {
        // A (x + iy) = (a + bi)(x + iy)  =>  A [x y] = [x y] [[a, b], [-b, a]]
        let v = eig.vectors.column(k);
        p.set_column(col, &v.map(|x| x.re));
        p.set_column(col + 1, &v.map(|x| x.im));
        j[(col, col)] = lam.re;
        j[(col, col + 1)] = lam.im;
        j[(col + 1, col)] = -lam.im;
        j[(col + 1, col + 1)] = lam.re;
        partition.push(2);
        col += 2;
    }
    finish(a, p, j, partition)
}
