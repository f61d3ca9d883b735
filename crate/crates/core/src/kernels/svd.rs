//! One-sided (Hestenes) Jacobi SVD.

use nalgebra::{DMatrix, DVector};

use super::{KernelError, Scalar};

const MAX_SWEEPS: usize = 80;

/// Full singular value decomposition `A = U diag(s) V*`.
///
/// `u` is `m x m`, `v` is `n x n` and `s` has `min(m, n)` entries sorted
/// nonincreasing. Phases are fixed so that the largest-magnitude entry of
/// every column of `u` is real and positive; `v` is rotated to match.
#[derive(Debug, Clone)]
pub struct MatrixSvd<T: Scalar> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

impl<T: Scalar> MatrixSvd<T> {
    /// The `m x n` rectangular diagonal factor.
    pub fn sigma(&self) -> DMatrix<T> {
        let mut out = DMatrix::<T>::zeros(self.u.nrows(), self.v.nrows());
        for (i, &s) in self.s.iter().enumerate() {
            out[(i, i)] = T::from_real(s);
        }
        out
    }

    pub fn reconstruct(&self) -> DMatrix<T> {
        &self.u * self.sigma() * self.v.adjoint()
    }

    /// Number of singular values strictly above `rtol * sigma_max`.
    pub fn rank(&self, rtol: f64) -> usize {
        let smax = self.s.first().copied().unwrap_or(0.0);
        self.s.iter().filter(|&&s| s > rtol * smax).count()
    }
}

pub fn svd<T: Scalar>(a: &DMatrix<T>) -> Result<MatrixSvd<T>, KernelError> {
    let (m, n) = a.shape();
    if m < n {
        // A* = U' S V'*  =>  A = V' S U'*
        let t = svd_tall(&a.adjoint())?;
        let mut out = MatrixSvd { u: t.v, s: t.s, v: t.u };
        fix_phases(&mut out);
        return Ok(out);
    }
    let mut out = svd_tall(a)?;
    fix_phases(&mut out);
    Ok(out)
}

fn svd_tall<T: Scalar>(a: &DMatrix<T>) -> Result<MatrixSvd<T>, KernelError> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<T>::identity(n, n);
    let eps = f64::EPSILON;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = T::zero();
                for r in 0..m {
                    alpha += w[(r, i)].modulus_squared();
                    beta += w[(r, j)].modulus_squared();
                    gamma += w[(r, i)].conjugate() * w[(r, j)];
                }
                let g = gamma.modulus();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Remove the phase of gamma, then apply a real rotation.
                let phase = gamma.scale(1.0 / g);
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let pc = phase.conjugate();
                rotate(&mut w, i, j, c, s, pc);
                rotate(&mut v, i, j, c, s, pc);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(KernelError::Convergence { iterations: MAX_SWEEPS });
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal singular values keep column order
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let smax = order.first().map(|&j| norms[j]).unwrap_or(0.0);
    let mut s = Vec::with_capacity(n);
    let mut vs = DMatrix::<T>::zeros(n, n);
    let mut cols: Vec<DVector<T>> = Vec::with_capacity(m);
    for (dst, &src) in order.iter().enumerate() {
        s.push(norms[src]);
        vs.set_column(dst, &v.column(src));
        if norms[src] > 0.0 && norms[src] > smax * f64::EPSILON * (m as f64) {
            cols.push(w.column(src) / T::from_real(norms[src]));
        }
    }
    let u = complete_basis(cols, m);
    Ok(MatrixSvd { u, s, v: vs })
}

/// Columns i, j <- [c x_i - s p x_j, s x_i + c p x_j] with `p` the unit phase.
fn rotate<T: Scalar>(a: &mut DMatrix<T>, i: usize, j: usize, c: f64, s: f64, p: T) {
    for r in 0..a.nrows() {
        let xi = a[(r, i)];
        let xj = a[(r, j)] * p;
        a[(r, i)] = xi.scale(c) - xj.scale(s);
        a[(r, j)] = xi.scale(s) + xj.scale(c);
    }
}

/// Extend orthonormal columns to a full `m x m` unitary matrix by
/// Gram-Schmidt against the standard basis.
fn complete_basis<T: Scalar>(mut cols: Vec<DVector<T>>, m: usize) -> DMatrix<T> {
    while cols.len() < m {
        let mut best: Option<(f64, DVector<T>)> = None;
        for e in 0..m {
            let mut x = DVector::<T>::zeros(m);
            x[e] = T::one();
            for _ in 0..2 {
                for c in &cols {
                    let d = c.dotc(&x);
                    x -= c * d;
                }
            }
            let nx = x.norm();
            if best.as_ref().is_none_or(|(b, _)| nx > *b + 1e-12) {
                best = Some((nx, x));
            }
        }
        let (nx, x) = best.expect("m > 0");
        cols.push(x / T::from_real(nx));
    }
    let mut u = DMatrix::<T>::zeros(m, m);
    for (j, c) in cols.iter().enumerate() {
        u.set_column(j, c);
    }
    u
}

fn fix_phases<T: Scalar>(f: &mut MatrixSvd<T>) {
    let (m, n) = (f.u.nrows(), f.v.nrows());
    let k = m.min(n);
    for j in 0..m {
        let ph = unit_phase_of_largest(&f.u, j);
        if ph == T::one() {
            continue;
        }
        for r in 0..m {
            f.u[(r, j)] *= ph;
        }
        // A v_j = s_j u_j, so v_j takes the same phase.
        if j < k {
            for r in 0..n {
                f.v[(r, j)] *= ph;
            }
        }
    }
    // Null-space columns of V are free; normalise them the same way.
    for j in k..n {
        let ph = unit_phase_of_largest(&f.v, j);
        for r in 0..n {
            f.v[(r, j)] *= ph;
        }
    }
}

/// `conj(x)/|x|` for the first largest-magnitude entry `x` of column `j`.
pub(crate) fn unit_phase_of_largest<T: Scalar>(a: &DMatrix<T>, j: usize) -> T {
    let mut best = 0usize;
    let mut bm = -1.0;
    for r in 0..a.nrows() {
        let mag = a[(r, j)].modulus();
        if mag > bm * (1.0 + 1e-12) {
            bm = mag;
            best = r;
        }
    }
    let x = a[(best, j)];
    if bm <= 0.0 {
        T::one()
    } else {
        x.conjugate().scale(1.0 / bm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{fro_norm, unitarity_residual, CMat, RMat};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check<T: Scalar>(a: &DMatrix<T>, f: &MatrixSvd<T>, tol: f64) {
        let scale = fro_norm(a).max(1.0);
        assert!(fro_norm(&(f.reconstruct() - a)) <= tol * scale);
        assert!(unitarity_residual(&f.u) <= tol);
        assert!(unitarity_residual(&f.v) <= tol);
        for w in f.s.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(f.s.iter().all(|&s| s >= 0.0));
    }

    #[test]
    fn imaginary_identity() {
        let a = CMat::from_diagonal_element(2, 2, c(0.0, 1.0));
        let f = svd(&a).unwrap();
        assert_eq!(f.s, vec![1.0, 1.0]);
        let uv = &f.u * f.v.adjoint();
        assert!(fro_norm(&(uv - &a)) < 1e-15);
        check(&a, &f, 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let f = svd(&RMat::zeros(3, 3)).unwrap();
        assert_eq!(f.s, vec![0.0; 3]);
        assert_eq!(f.u, RMat::identity(3, 3));
        assert_eq!(f.v, RMat::identity(3, 3));
    }

    #[test]
    fn random_complex_4x4() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = CMat::from_fn(4, 4, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let f = svd(&a).unwrap();
            check(&a, &f, 1e-12);
        }
    }

    #[test]
    fn rectangular_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(3, 5), (5, 3), (1, 4), (4, 1)] {
            let a = CMat::from_fn(m, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let f = svd(&a).unwrap();
            assert_eq!(f.u.shape(), (m, m));
            assert_eq!(f.v.shape(), (n, n));
            assert_eq!(f.s.len(), m.min(n));
            check(&a, &f, 1e-12);
        }
    }

    #[test]
    fn rank_deficient_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let b = RMat::from_fn(4, 2, |_, _| rng.random_range(-1.0..1.0));
        let cc = RMat::from_fn(2, 4, |_, _| rng.random_range(-1.0..1.0));
        let a = b * cc;
        let f = svd(&a).unwrap();
        check(&a, &f, 1e-12);
        assert_eq!(f.rank(crate::kernels::default_rtol(4, 4)), 2);
    }

    #[test]
    fn phase_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = CMat::from_fn(3, 3, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let f = svd(&a).unwrap();
        for j in 0..3 {
            let ph = unit_phase_of_largest(&f.u, j);
            assert!((ph - c(1.0, 0.0)).norm() < 1e-14);
        }
    }
}
