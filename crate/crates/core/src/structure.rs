//! Structural predicates on frontal slices.
//!
//! The partition-returning predicates look for the finest splitting of the
//! index range into diagonal blocks of size 1 or 2 that every slice obeys.

use crate::tensor::Tensor3;

/// Largest off-diagonal magnitude over all slices.
pub fn off_diagonal(t: &Tensor3) -> f64 {
    let (m, n, p) = t.dims();
    let mut worst: f64 = 0.0;
    for k in 0..p {
        for i in 0..m {
            for j in 0..n {
                if i != j {
                    worst = worst.max(t.get(i, j, k).abs());
                }
            }
        }
    }
    worst
}

pub fn is_f_diagonal(t: &Tensor3, tol: f64) -> bool {
    off_diagonal(t) <= tol
}

/// `max |A^T - A|`.
pub fn t_symmetry_residual(t: &Tensor3) -> f64 {
    if t.rows() != t.cols() {
        return f64::INFINITY;
    }
    t.max_abs_diff(&t.transpose())
}

pub fn is_t_symmetric(t: &Tensor3, tol: f64) -> bool {
    t_symmetry_residual(t) <= tol
}

/// `max(|Q^T * Q - I|, |Q * Q^T - I|)`.
pub fn orthogonality_residual(q: &Tensor3) -> f64 {
    let (m, n, p) = q.dims();
    if m != n {
        return f64::INFINITY;
    }
    let id = Tensor3::identity(n, p);
    let qt = q.transpose();
    let left = qt.tprod(q).map(|x| x.max_abs_diff(&id));
    let right = q.tprod(&qt).map(|x| x.max_abs_diff(&id));
    match (left, right) {
        (Ok(l), Ok(r)) => l.max(r),
        _ => f64::INFINITY,
    }
}

pub fn is_orthogonal(q: &Tensor3, tol: f64) -> bool {
    orthogonality_residual(q) <= tol
}

/// Significance pattern: `sig[r][c]` true when some slice has `|a_rc| > tol`.
fn pattern(t: &Tensor3, tol: f64) -> Vec<Vec<bool>> {
    let (n, _, p) = t.dims();
    let mut sig = vec![vec![false; n]; n];
    for k in 0..p {
        for (r, row) in sig.iter_mut().enumerate() {
            for (c, s) in row.iter_mut().enumerate() {
                *s |= t.get(r, c, k).abs() > tol;
            }
        }
    }
    sig
}

/// Boundaries `0 = b_0 < b_1 < ... = n` with gaps of 1 or 2 that maximize the
/// block count. `cut_ok(b)` says an interior boundary may sit at `b`;
/// `pair_ok(b, b2)` constrains consecutive interior boundaries.
fn finest(n: usize, cut_ok: impl Fn(usize) -> bool, pair_ok: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    // best[b] = (blocks, previous boundary) for a partition of 0..b
    let mut best: Vec<Option<(usize, usize)>> = vec![None; n + 1];
    best[0] = Some((0, 0));
    for b in 1..=n {
        if b < n && !cut_ok(b) {
            continue;
        }
        for step in [1, 2] {
            if step > b {
                continue;
            }
            let a = b - step;
            let Some((count, _)) = best[a] else { continue };
            if a > 0 && b < n && !pair_ok(a, b) {
                continue;
            }
            let cand = (count + 1, a);
            if best[b].is_none_or(|cur| cand.0 > cur.0) {
                best[b] = Some(cand);
            }
        }
    }
    best[n]?;
    let mut sizes = Vec::new();
    let mut b = n;
    while b > 0 {
        let (_, a) = best[b].expect("reachable");
        sizes.push(b - a);
        b = a;
    }
    sizes.reverse();
    Some(sizes)
}

fn square(t: &Tensor3) -> Option<usize> {
    (t.rows() == t.cols()).then_some(t.rows())
}

fn below_band(sig: &[Vec<bool>]) -> bool {
    let n = sig.len();
    (0..n).any(|r| (0..r.saturating_sub(1)).any(|c| sig[r][c]))
}

/// Finest partition under which every slice is block upper triangular with
/// diagonal blocks of size at most 2, or `None`.
pub fn quasi_triangular_partition(t: &Tensor3, tol: f64) -> Option<Vec<usize>> {
    let n = square(t)?;
    let sig = pattern(t, tol);
    if below_band(&sig) {
        return None;
    }
    finest(n, |b| !sig[b][b - 1], |_, _| true)
}

pub fn is_f_quasi_triangular(t: &Tensor3, tol: f64) -> Option<Vec<usize>> {
    quasi_triangular_partition(t, tol)
}

/// Finest partition under which every slice is upper block-bi-diagonal with
/// blocks of size at most 2, or `None`.
pub fn block_bidiagonal_partition(t: &Tensor3, tol: f64) -> Option<Vec<usize>> {
    let n = square(t)?;
    let sig = pattern(t, tol);
    if below_band(&sig) {
        return None;
    }
    // two consecutive boundaries a < b both inside (r, c] put (r, c) two
    // block columns right of the diagonal
    let pair_ok = |a: usize, b: usize| !(0..a).any(|r| (b..n).any(|c| sig[r][c]));
    finest(n, |b| !sig[b][b - 1], pair_ok)
}

pub fn is_f_upper_block_bidiagonal(t: &Tensor3, tol: f64) -> Option<Vec<usize>> {
    block_bidiagonal_partition(t, tol)
}

fn block_index(partition: &[usize]) -> Vec<usize> {
    partition.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect()
}

/// Largest entry outside the block upper triangle of `partition`.
pub fn below_partition(t: &Tensor3, partition: &[usize]) -> f64 {
    band_residual(t, partition, false)
}

/// Largest entry outside the diagonal and first superdiagonal blocks.
pub fn outside_bidiagonal(t: &Tensor3, partition: &[usize]) -> f64 {
    band_residual(t, partition, true)
}

fn band_residual(t: &Tensor3, partition: &[usize], bidiagonal: bool) -> f64 {
    let (n, _, p) = t.dims();
    let bi = block_index(partition);
    if bi.len() != n {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for k in 0..p {
        for r in 0..n {
            for c in 0..n {
                let outside = bi[r] > bi[c] || (bidiagonal && bi[c] > bi[r] + 1);
                if outside {
                    worst = worst.max(t.get(r, c, k).abs());
                }
            }
        }
    }
    worst
}

/// Location (1-based slice and row) of the largest entry that forces a
/// diagonal block beyond 2x2; used for error reports.
pub(crate) fn violation_site(t: &Tensor3) -> (usize, usize) {
    let (n, _, p) = t.dims();
    let mut best = (0.0, 0, 1);
    for k in 0..p {
        for r in 1..n {
            for c in 0..r {
                let x = t.get(r, c, k).abs();
                if x > best.0 {
                    best = (x, k, r + 1);
                }
            }
        }
    }
    (best.1 + 1, best.2)
}
