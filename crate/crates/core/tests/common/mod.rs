#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensor_tprod::fourier::{from_fourier_real, is_real_forced, FourierBlocks};
use tensor_tprod::gen::{gen, Kind};
use tensor_tprod::{Tensor3, Tolerances};

pub type RMat = DMatrix<f64>;
pub type CMat = DMatrix<Complex64>;

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn dense(seed: u64, m: usize, n: usize, p: usize) -> Tensor3 {
    gen(seed, m, n, p, Kind::Dense).unwrap()
}

pub fn rank_deficient(seed: u64, n: usize, p: usize) -> Tensor3 {
    gen(seed, n, n, p, Kind::RankDeficient).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_c(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CMat {
    CMat::from_fn(m, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_r(rng: &mut ChaCha8Rng, m: usize, n: usize) -> RMat {
    RMat::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0))
}

/// Entries of `bcirc(a)` from the definition, block (r, c) = A^((r - c) mod p).
pub fn bcirc_oracle(a: &Tensor3) -> RMat {
    let (m, n, p) = a.dims();
    RMat::from_fn(m * p, n * p, |i, j| {
        let (br, bc) = (i / m, j / n);
        a.get(i % m, j % n, (br + p - bc) % p)
    })
}

/// Naive DFT along the tubes with `xi = exp(-2 pi i / p)` from `sin`/`cos`.
pub fn dft_oracle(a: &Tensor3) -> Vec<CMat> {
    let (m, n, p) = a.dims();
    (0..p)
        .map(|i| {
            CMat::from_fn(m, n, |r, col| {
                (0..p)
                    .map(|k| {
                        let th = -2.0 * std::f64::consts::PI * (i * k) as f64 / p as f64;
                        c(th.cos(), th.sin()) * a.get(r, col, k)
                    })
                    .sum()
            })
        })
        .collect()
}

pub fn max_abs_r(m: &RMat) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.norm()))
}

pub fn singular_values(m: &RMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn singular_values_c(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Rank with singular values above `rel * reference`.
pub fn rank(m: &RMat, rel: f64, reference: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > rel * reference).count()
}

/// Pseudoinverse from the symmetric eigendecomposition of `M^T M`:
/// `M^+ = V_r L_r^{-1} V_r^T M^T` over the `rank` largest eigenpairs, or
/// those above `1e-12 * lambda_max` when `rank` is `None`.
pub fn pinv_eig(m: &RMat, rank: Option<usize>) -> RMat {
    let e = (m.transpose() * m).symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    let lmax = order.first().map(|&i| e.eigenvalues[i]).unwrap_or(0.0);
    let r = rank.unwrap_or_else(|| order.iter().filter(|&&i| e.eigenvalues[i] > 1e-12 * lmax).count());
    let mut g = RMat::zeros(m.ncols(), m.ncols());
    for &i in order.iter().take(r) {
        let v = e.eigenvectors.column(i);
        g += v * v.transpose() / e.eigenvalues[i];
    }
    g * m.transpose()
}

pub fn pinv_oracle(m: &RMat) -> RMat {
    pinv_eig(m, None)
}

/// Matrix Drazin inverse and index, the index `k` found by rank stabilization
/// of powers.
pub fn drazin_oracle(b: &RMat) -> (RMat, usize) {
    let n = b.nrows();
    let smax = singular_values(b).first().copied().unwrap_or(0.0);
    let mut powers = vec![RMat::identity(n, n)];
    let mut ranks = vec![n];
    let mut k = 0;
    loop {
        let next = &powers[k] * b;
        let level = smax.powi(k as i32 + 1).max(f64::MIN_POSITIVE);
        ranks.push(rank(&next, 1e-9, level));
        powers.push(next);
        if ranks[k + 1] == ranks[k] {
            break;
        }
        k += 1;
    }
    let r = ranks[k];
    let bk = &powers[k];
    // S = [range(B^k) | null(B^k)] splits B into an invertible core and a
    // nilpotent part; the Drazin inverse inverts the core only
    let range = top_eigenvectors(&(bk * bk.transpose()), r, true);
    let null = top_eigenvectors(&(bk.transpose() * bk), n - r, false);
    let mut s = RMat::zeros(n, n);
    s.columns_mut(0, r).copy_from(&range);
    s.columns_mut(r, n - r).copy_from(&null);
    let s_inv = s.clone().try_inverse().unwrap();
    let t = &s_inv * b * &s;
    let mut core = RMat::zeros(n, n);
    if r > 0 {
        let m_inv = t.view((0, 0), (r, r)).into_owned().try_inverse().unwrap();
        core.view_mut((0, 0), (r, r)).copy_from(&m_inv);
    }
    (&s * core * s_inv, k)
}

/// `count` eigenvectors of a symmetric matrix, from the largest eigenvalues
/// when `largest` is set, otherwise from the smallest.
fn top_eigenvectors(m: &RMat, count: usize, largest: bool) -> RMat {
    let e = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    if largest {
        order.reverse();
    }
    RMat::from_fn(m.nrows(), count, |i, j| e.eigenvectors[(i, order[j])])
}

/// Real tensor whose representative Fourier blocks are `Q diag(N_s, M) Q^*`
/// with `N_s` the `s x s` shift and `Q` unitary (orthogonal on real-forced
/// blocks). Returns the tensor and the largest shift size, its Drazin index.
pub fn with_nilpotent_blocks(seed: u64, n: usize, p: usize, max_shift: usize) -> (Tensor3, usize) {
    let mut g = rng(seed);
    let mut reps = Vec::new();
    let mut index = 0;
    for k in 0..=p / 2 {
        let s = g.random_range(0..=max_shift.min(n));
        index = index.max(s);
        let real = is_real_forced(k, p);
        let mut d = CMat::zeros(n, n);
        for i in 1..s {
            d[(i - 1, i)] = c(1.0, 0.0);
        }
        for i in s..n {
            for j in s..n {
                let im = if real { 0.0 } else { g.random_range(-0.3..0.3) };
                let diag = if i == j { 1.5 } else { 0.0 };
                d[(i, j)] = c(diag + g.random_range(-0.3..0.3), im);
            }
        }
        let q = if real {
            random_r(&mut g, n, n).qr().q().map(|x| c(x, 0.0))
        } else {
            random_c(&mut g, n, n).qr().q()
        };
        reps.push(&q * d * q.adjoint());
    }
    let fb = FourierBlocks::from_representatives(reps, p).unwrap();
    (from_fourier_real(&fb, &Tolerances::default()).unwrap().0, index)
}

pub fn diag_vec(v: &[f64]) -> RMat {
    RMat::from_diagonal(&DVector::from_column_slice(v))
}
