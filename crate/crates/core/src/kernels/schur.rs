//! Schur decompositions: complex triangular and real quasi-triangular with
//! all 1x1 diagonal blocks ordered ahead of the 2x2 blocks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{ensure_square, full_q, hessenberg, householder, reflect_cols, reflect_rows, CMat, KernelError, RMat, Scalar};

/// `A = U T U*`. For the complex variant `partition` is all ones.
#[derive(Debug, Clone)]
pub struct MatrixSchur<T: Scalar> {
    pub u: DMatrix<T>,
    pub t: DMatrix<T>,
    pub partition: Vec<usize>,
}

impl<T: Scalar> MatrixSchur<T> {
    pub fn reconstruct(&self) -> DMatrix<T> {
        &self.u * &self.t * self.u.adjoint()
    }
}

fn iteration_cap(n: usize) -> usize {
    60 * n.max(1)
}

/// Complex Schur form by single-shift QR on the Hessenberg form.
pub fn schur_complex(a: &CMat) -> Result<MatrixSchur<Complex64>, KernelError> {
    let n = ensure_square(a)?;
    let (mut q, mut h) = hessenberg(a);
    let eps = f64::EPSILON;
    let total_cap = iteration_cap(n);
    let mut total = 0usize;
    let mut hi = n.saturating_sub(1);
    let mut its = 0usize;

    while hi > 0 {
        let lo = find_deflation(&mut h, hi, eps);
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > total_cap {
            return Err(KernelError::Convergence { iterations: total });
        }
        let shift = if its % 10 == 0 {
            // exceptional shift
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm() * 1.5, 0.0)
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, &mut q, lo, hi, shift);
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(MatrixSchur {
        u: q,
        t: h,
        partition: vec![1; n],
    })
}

/// Smallest `l <= hi` such that the window `l..=hi` is unreduced; sets the
/// negligible subdiagonal entry `h[l, l-1]` to exact zero.
fn find_deflation<T: Scalar>(h: &mut DMatrix<T>, hi: usize, eps: f64) -> usize {
    let mut l = hi;
    while l > 0 {
        let s = h[(l - 1, l - 1)].modulus() + h[(l, l)].modulus();
        let s = if s == 0.0 { super::fro_norm(h) } else { s };
        if h[(l, l - 1)].modulus() <= eps * s {
            h[(l, l - 1)] = T::zero();
            break;
        }
        l -= 1;
    }
    l
}

fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let e1 = mean + disc;
    let e2 = mean - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Givens pair `(c, s)` with `[c s; -conj(s) c] [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let nu = ax.hypot(ay);
    let c = ax / nu;
    let s = (x / ax) * y.conj() / nu;
    (c, s)
}

fn rot_rows(h: &mut CMat, k: usize, c: f64, s: Complex64, c0: usize) {
    for j in c0..h.ncols() {
        let a = h[(k, j)];
        let b = h[(k + 1, j)];
        h[(k, j)] = a * c + s * b;
        h[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

fn rot_cols(h: &mut CMat, k: usize, c: f64, s: Complex64, row_end: usize) {
    for i in 0..row_end {
        let a = h[(i, k)];
        let b = h[(i, k + 1)];
        h[(i, k)] = a * c + b * s.conj();
        h[(i, k + 1)] = -a * s + b * c;
    }
}

fn qr_sweep(h: &mut CMat, q: &mut CMat, lo: usize, hi: usize, shift: Complex64) {
    let n = h.nrows();
    let mut x = h[(lo, lo)] - shift;
    let mut y = h[(lo + 1, lo)];
    for k in lo..hi {
        let (c, s) = givens(x, y);
        let c0 = if k > lo { k - 1 } else { lo };
        rot_rows(h, k, c, s, c0);
        rot_cols(h, k, c, s, (k + 3).min(hi + 1));
        rot_cols(q, k, c, s, n);
        if k > lo {
            h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
        }
        if k + 1 < hi {
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
        }
    }
}

/// Real Schur form `A = Z T Z^T` with `T` quasi-triangular. Diagonal blocks
/// of size 1 (real eigenvalues) come first, followed by the 2x2 blocks of
/// complex conjugate pairs; `partition` lists the block sizes in order.
pub fn schur_real_ordered(a: &RMat) -> Result<MatrixSchur<f64>, KernelError> {
    let n = ensure_square(a)?;
    let (mut z, mut h) = hessenberg(a);
    francis(&mut h, &mut z)?;
    let mut partition = read_partition(&h);
    reorder_real_first(&mut h, &mut z, &mut partition)?;
    // exact zeros below the block diagonal
    let mut start = 0;
    let mut owner = vec![0usize; n];
    for (b, &sz) in partition.iter().enumerate() {
        for o in owner.iter_mut().skip(start).take(sz) {
            *o = b;
        }
        start += sz;
    }
    for i in 0..n {
        for j in 0..i {
            if owner[i] != owner[j] {
                h[(i, j)] = 0.0;
            }
        }
    }
    Ok(MatrixSchur { u: z, t: h, partition })
}

fn francis(h: &mut RMat, z: &mut RMat) -> Result<(), KernelError> {
    let n = h.nrows();
    let eps = f64::EPSILON;
    let cap = iteration_cap(n);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n as isize - 1;
    while hi >= 0 {
        let hiu = hi as usize;
        let lo = if hiu == 0 { 0 } else { find_deflation(h, hiu, eps) };
        if lo == hiu {
            hi -= 1;
            its = 0;
            continue;
        }
        if lo + 1 == hiu {
            split_2x2(h, z, lo);
            hi -= 2;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > cap {
            return Err(KernelError::Convergence { iterations: total });
        }
        let (s, t) = if its % 10 == 0 {
            let w = h[(hiu, hiu - 1)].abs() + h[(hiu - 1, hiu - 2)].abs();
            (1.5 * w, w * w)
        } else {
            let (a, b, c, d) = (h[(hiu - 1, hiu - 1)], h[(hiu - 1, hiu)], h[(hiu, hiu - 1)], h[(hiu, hiu)]);
            (a + d, a * d - b * c)
        };
        francis_step(h, z, lo, hiu, s, t);
    }
    Ok(())
}

fn francis_step(h: &mut RMat, z: &mut RMat, lo: usize, hi: usize, s: f64, t: f64) {
    let n = h.nrows();
    let mut x = h[(lo, lo)] * h[(lo, lo)] + h[(lo, lo + 1)] * h[(lo + 1, lo)] - s * h[(lo, lo)] + t;
    let mut y = h[(lo + 1, lo)] * (h[(lo, lo)] + h[(lo + 1, lo + 1)] - s);
    let mut zz = h[(lo + 1, lo)] * h[(lo + 2, lo + 1)];
    for k in lo..=hi - 2 {
        let v = DVector::from_column_slice(&[x, y, zz]);
        if let Some((v, beta)) = householder(&v) {
            let c0 = if k > lo { k - 1 } else { lo };
            reflect_rows(h, &v, beta, k, c0);
            reflect_cols(h, &v, beta, k, (k + 4).min(hi + 1));
            reflect_cols(z, &v, beta, k, n);
        }
        if k > lo {
            h[(k + 1, k - 1)] = 0.0;
            h[(k + 2, k - 1)] = 0.0;
        }
        x = h[(k + 1, k)];
        y = h[(k + 2, k)];
        if k + 3 <= hi {
            zz = h[(k + 3, k)];
        }
    }
    let v = DVector::from_column_slice(&[x, y]);
    if let Some((v, beta)) = householder(&v) {
        reflect_rows(h, &v, beta, hi - 1, hi - 2);
        reflect_cols(h, &v, beta, hi - 1, hi + 1);
        reflect_cols(z, &v, beta, hi - 1, n);
    }
    h[(hi, hi - 2)] = 0.0;
}

/// Triangularise the 2x2 diagonal block at `i` when its eigenvalues are
/// real; complex pairs are left as a 2x2 block.
fn split_2x2(h: &mut RMat, z: &mut RMat, i: usize) {
    let (a, b, c, d) = (h[(i, i)], h[(i, i + 1)], h[(i + 1, i)], h[(i + 1, i + 1)]);
    if c == 0.0 {
        return;
    }
    let half = 0.5 * (a - d);
    let disc = half * half + b * c;
    if disc < 0.0 {
        return;
    }
    let mean = 0.5 * (a + d);
    let root = disc.sqrt();
    let lambda = if half >= 0.0 { mean + root } else { mean - root };
    // eigenvector for lambda, from whichever row is better conditioned
    let (v0, v1) = if b.abs() + (lambda - a).abs() >= (lambda - d).abs() + c.abs() {
        (b, lambda - a)
    } else {
        (lambda - d, c)
    };
    let r = v0.hypot(v1);
    if r == 0.0 {
        return;
    }
    let (cs, sn) = (v0 / r, v1 / r);
    let n = h.nrows();
    for j in i..n {
        let (p, q) = (h[(i, j)], h[(i + 1, j)]);
        h[(i, j)] = cs * p + sn * q;
        h[(i + 1, j)] = -sn * p + cs * q;
    }
    for r in 0..(i + 2) {
        let (p, q) = (h[(r, i)], h[(r, i + 1)]);
        h[(r, i)] = cs * p + sn * q;
        h[(r, i + 1)] = -sn * p + cs * q;
    }
    for r in 0..n {
        let (p, q) = (z[(r, i)], z[(r, i + 1)]);
        z[(r, i)] = cs * p + sn * q;
        z[(r, i + 1)] = -sn * p + cs * q;
    }
    h[(i + 1, i)] = 0.0;
}

fn read_partition(h: &RMat) -> Vec<usize> {
    let n = h.nrows();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && h[(i + 1, i)] != 0.0 {
            out.push(2);
            i += 2;
        } else {
            out.push(1);
            i += 1;
        }
    }
    out
}

fn reorder_real_first(h: &mut RMat, z: &mut RMat, partition: &mut [usize]) -> Result<(), KernelError> {
    loop {
        let mut offset = 0;
        let mut swapped = false;
        for b in 0..partition.len().saturating_sub(1) {
            if partition[b] == 2 && partition[b + 1] == 1 {
                swap_blocks(h, z, offset, 2, 1)?;
                partition.swap(b, b + 1);
                swapped = true;
                break;
            }
            offset += partition[b];
        }
        if !swapped {
            return Ok(());
        }
    }
}

/// Exchange adjacent diagonal blocks of sizes `p` (at row `i`) and `q` by an
/// orthogonal similarity, via the Sylvester equation `T11 X - X T22 = -T12`.
fn swap_blocks(h: &mut RMat, z: &mut RMat, i: usize, p: usize, q: usize) -> Result<(), KernelError> {
    let n = h.nrows();
    let t11 = h.view((i, i), (p, p)).into_owned();
    let t22 = h.view((i + p, i + p), (q, q)).into_owned();
    let t12 = h.view((i, i + p), (p, q)).into_owned();

    // column-major vec: (I_q (x) T11 - T22^T (x) I_p) vec(X) = -vec(T12)
    let dim = p * q;
    let mut k = RMat::zeros(dim, dim);
    for c in 0..q {
        for r in 0..p {
            let row = c * p + r;
            for r2 in 0..p {
                k[(row, c * p + r2)] += t11[(r, r2)];
            }
            for c2 in 0..q {
                k[(row, c2 * p + r)] -= t22[(c2, c)];
            }
        }
    }
    let rhs = DVector::from_iterator(dim, (0..q).flat_map(|c| (0..p).map(move |r| (r, c))).map(|(r, c)| -t12[(r, c)]));
    let sol = k.lu().solve(&rhs).ok_or(KernelError::SwapFailure {
        position: i,
        residual: f64::INFINITY,
    })?;

    let mut basis = RMat::zeros(p + q, q);
    for c in 0..q {
        for r in 0..p {
            basis[(r, c)] = sol[c * p + r];
        }
        basis[(p + c, c)] = 1.0;
    }
    let qm = full_q(&basis);
    let m = p + q;

    // H <- Q^T H Q on the affected rows/columns
    let rows = h.rows(i, m).into_owned();
    let new_rows = qm.transpose() * rows;
    h.rows_mut(i, m).copy_from(&new_rows);
    let cols = h.columns(i, m).into_owned();
    let new_cols = cols * &qm;
    h.columns_mut(i, m).copy_from(&new_cols);
    let zc = z.columns(i, m).into_owned() * &qm;
    z.columns_mut(i, m).copy_from(&zc);

    // the block now below the new leading q x q block must vanish
    let mut resid: f64 = 0.0;
    for r in i + q..i + m {
        for c in i..i + q {
            resid = resid.max(h[(r, c)].abs());
        }
    }
    let scale = super::fro_norm(&h.view((i, i), (m, m)).into_owned()).max(f64::MIN_POSITIVE);
    if resid > 1e3 * f64::EPSILON * scale * n.max(1) as f64 {
        return Err(KernelError::SwapFailure { position: i, residual: resid });
    }
    for r in i + q..i + m {
        for c in i..i + q {
            h[(r, c)] = 0.0;
        }
    }
    // rows outside the window were mixed only by Q from the right
    for r in i + m..n {
        for c in i..i + m {
            h[(r, c)] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{fro_norm, unitarity_residual};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> RMat {
        let g = RMat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        g.qr().q()
    }

    #[test]
    fn complex_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..8 {
            let a = CMat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let s = schur_complex(&a).unwrap();
            assert!(fro_norm(&(s.reconstruct() - &a)) <= 1e-12 * fro_norm(&a).max(1.0));
            assert!(unitarity_residual(&s.u) <= 1e-12);
            for i in 1..n {
                for j in 0..i {
                    assert_eq!(s.t[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn complex_upper_triangular_input() {
        let a = CMat::from_fn(3, 3, |i, j| if i <= j { Complex64::new((i + j + 1) as f64, 1.0) } else { Complex64::new(0.0, 0.0) });
        let s = schur_complex(&a).unwrap();
        assert_eq!(s.u, CMat::identity(3, 3));
        assert_eq!(s.t, a);
    }

    #[test]
    fn real_rotation_is_one_block() {
        let a = RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let s = schur_real_ordered(&a).unwrap();
        assert_eq!(s.partition, vec![2]);
        assert!(fro_norm(&(s.reconstruct() - &a)) < 1e-14);
        let t = &s.t;
        let tr = t[(0, 0)] + t[(1, 1)];
        let det = t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)];
        assert!(tr.abs() < 1e-14 && (det - 1.0).abs() < 1e-14);
    }

    #[test]
    fn real_upper_triangular_input() {
        let a = RMat::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 0.0, 4.0, 5.0, 0.0, 0.0, 6.0]);
        let s = schur_real_ordered(&a).unwrap();
        assert_eq!(s.u, RMat::identity(3, 3));
        assert_eq!(s.t, a);
        assert_eq!(s.partition, vec![1, 1, 1]);
    }

    fn eig_multiset_of_quasi(t: &RMat, partition: &[usize]) -> Vec<Complex64> {
        let mut out = Vec::new();
        let mut i = 0;
        for &sz in partition {
            if sz == 1 {
                out.push(Complex64::new(t[(i, i)], 0.0));
            } else {
                let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
                let half = 0.5 * (a - d);
                let disc = Complex64::new(half * half + b * c, 0.0).sqrt();
                let mean = Complex64::new(0.5 * (a + d), 0.0);
                out.push(mean + disc);
                out.push(mean - disc);
            }
            i += sz;
        }
        out.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        out
    }

    #[test]
    fn real_ordering_two_real_two_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            // complex pairs placed ahead of the real eigenvalues to force swaps
            let mut d = RMat::zeros(6, 6);
            let pairs = [(0.5, 1.5), (-0.7, 0.4)];
            for (b, &(re, im)) in pairs.iter().enumerate() {
                let i = 2 * b;
                d[(i, i)] = re;
                d[(i, i + 1)] = im;
                d[(i + 1, i)] = -im;
                d[(i + 1, i + 1)] = re;
            }
            d[(4, 4)] = 2.0;
            d[(5, 5)] = -1.3;
            let q = random_orthogonal(6, &mut rng);
            let a = &q * &d * q.transpose();
            let s = schur_real_ordered(&a).unwrap();
            assert_eq!(s.partition, vec![1, 1, 2, 2]);
            assert!(fro_norm(&(s.reconstruct() - &a)) <= 1e-12 * fro_norm(&a));
            assert!(unitarity_residual(&s.u) <= 1e-12);

            let got = eig_multiset_of_quasi(&s.t, &s.partition);
            let mut want = vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(-1.3, 0.0),
                Complex64::new(0.5, 1.5),
                Complex64::new(0.5, -1.5),
                Complex64::new(-0.7, 0.4),
                Complex64::new(-0.7, -0.4),
            ];
            want.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).norm() <= 1e-10, "{g} vs {w}");
            }
        }
    }

    #[test]
    fn real_random_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..10 {
            for _ in 0..10 {
                let a = RMat::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
                let s = schur_real_ordered(&a).unwrap();
                assert!(fro_norm(&(s.reconstruct() - &a)) <= 1e-12 * fro_norm(&a).max(1.0));
                let mut seen_two = false;
                for &b in &s.partition {
                    if b == 2 {
                        seen_two = true;
                    } else {
                        assert!(!seen_two, "1x1 block after a 2x2 block");
                    }
                }
            }
        }
    }
}
