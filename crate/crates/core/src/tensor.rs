//! Dense real third-order tensors and the block-circulant t-product algebra.
//!
//! Storage is slice-major: frontal slice `k` occupies a contiguous row-major
//! `m x n` run, so `unfold`/`fold` are plain reshapes. Indices are 0-based
//! in code; documentation numbers slices from 1.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fourier;
use crate::kernels::RMat;

/// Product sizes at or below this use the direct block-circulant sum.
pub const DIRECT_TPROD_LIMIT: usize = 64;

/// A dense real `m x n x p` tensor with finite entries.
#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    m: usize,
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tensor3 {}x{}x{}", self.m, self.n, self.p)?;
        for k in 0..self.p {
            writeln!(f, "  slice {}:", k + 1)?;
            for i in 0..self.m {
                let row: Vec<String> = (0..self.n).map(|j| format!("{:>12.6e}", self.get(i, j, k))).collect();
                writeln!(f, "    {}", row.join(" "))?;
            }
        }
        Ok(())
    }
}

fn check_dims(m: usize, n: usize, p: usize) -> Result<()> {
    if m == 0 || n == 0 || p == 0 {
        return Err(Error::dim(format!("tensor dimensions must be positive, got {m}x{n}x{p}")));
    }
    Ok(())
}

impl Tensor3 {
    pub fn from_vec(m: usize, n: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(m, n, p)?;
        if data.len() != m * n * p {
            return Err(Error::dim(format!("{m}x{n}x{p} tensor needs {} entries, got {}", m * n * p, data.len())));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            let k = pos / (m * n);
            let r = pos % (m * n);
            return Err(Error::NonFinite { i: r / n, j: r % n, k });
        }
        Ok(Tensor3 { m, n, p, data })
    }

    /// Build from frontal slices `A^(1), ..., A^(p)`.
    pub fn from_slices(slices: &[RMat]) -> Result<Self> {
        let first = slices.first().ok_or_else(|| Error::dim("at least one frontal slice is required"))?;
        let (m, n) = first.shape();
        let mut data = Vec::with_capacity(m * n * slices.len());
        for (k, s) in slices.iter().enumerate() {
            if s.shape() != (m, n) {
                return Err(Error::dim(format!("slice {} is {}x{}, expected {m}x{n}", k + 1, s.nrows(), s.ncols())));
            }
            for i in 0..m {
                for j in 0..n {
                    data.push(s[(i, j)]);
                }
            }
        }
        Self::from_vec(m, n, slices.len(), data)
    }

    pub fn zeros(m: usize, n: usize, p: usize) -> Self {
        assert!(m > 0 && n > 0 && p > 0, "tensor dimensions must be positive");
        Tensor3 {
            m,
            n,
            p,
            data: vec![0.0; m * n * p],
        }
    }

    /// The t-product identity: first slice `I_n`, remaining slices zero.
    pub fn identity(n: usize, p: usize) -> Self {
        let mut t = Self::zeros(n, n, p);
        for i in 0..n {
            t.data[i * n + i] = 1.0;
        }
        t
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.p)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn slices(&self) -> usize {
        self.p
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[k * self.m * self.n + i * self.n + j]
    }

    pub fn slice_data(&self, k: usize) -> &[f64] {
        let sz = self.m * self.n;
        &self.data[k * sz..(k + 1) * sz]
    }

    /// Frontal slice `k` (0-based) as a matrix.
    pub fn slice(&self, k: usize) -> RMat {
        DMatrix::from_row_slice(self.m, self.n, self.slice_data(k))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Largest entrywise difference; dimensions must agree.
    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        assert_eq!(self.dims(), other.dims(), "max_abs_diff on tensors of different size");
        self.data.iter().zip(&other.data).fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    /// Vertical stack of the frontal slices, an `mp x n` matrix.
    pub fn unfold(&self) -> RMat {
        DMatrix::from_row_slice(self.m * self.p, self.n, &self.data)
    }

    /// Inverse of [`Tensor3::unfold`].
    pub fn fold(mat: &RMat, p: usize) -> Result<Self> {
        if p == 0 || mat.nrows() % p != 0 {
            return Err(Error::dim(format!("cannot fold {} rows into {p} slices", mat.nrows())));
        }
        let m = mat.nrows() / p;
        let n = mat.ncols();
        let mut data = Vec::with_capacity(m * n * p);
        for r in 0..mat.nrows() {
            for c in 0..n {
                data.push(mat[(r, c)]);
            }
        }
        Self::from_vec(m, n, p, data)
    }

    pub fn bcirc(&self) -> BlockCirculant {
        let (m, n, p) = self.dims();
        let mut mat = RMat::zeros(m * p, n * p);
        for br in 0..p {
            for bc in 0..p {
                let k = (br + p - bc) % p;
                let src = self.slice_data(k);
                for i in 0..m {
                    for j in 0..n {
                        mat[(br * m + i, bc * n + j)] = src[i * n + j];
                    }
                }
            }
        }
        BlockCirculant { m, n, p, matrix: mat }
    }

    /// Tensor transpose: slice 1 is `A^(1)^T`, slice `k >= 2` is
    /// `A^(p-k+2)^T`.
    pub fn transpose(&self) -> Tensor3 {
        let (m, n, p) = self.dims();
        let mut data = vec![0.0; m * n * p];
        for k in 0..p {
            let src = (p - k) % p;
            let s = self.slice_data(src);
            for i in 0..m {
                for j in 0..n {
                    data[k * m * n + j * m + i] = s[i * n + j];
                }
            }
        }
        Tensor3 { m: n, n: m, p, data }
    }

    fn same_dims(&self, other: &Tensor3, op: &str) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::dim(format!("{op}: {:?} vs {:?}", self.dims(), other.dims())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor3) -> Result<Tensor3> {
        self.same_dims(other, "add")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(self.with_data(data))
    }

    pub fn sub(&self, other: &Tensor3) -> Result<Tensor3> {
        self.same_dims(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(self.with_data(data))
    }

    pub fn scale(&self, alpha: f64) -> Tensor3 {
        self.with_data(self.data.iter().map(|x| alpha * x).collect())
    }

    fn with_data(&self, data: Vec<f64>) -> Tensor3 {
        Tensor3 {
            m: self.m,
            n: self.n,
            p: self.p,
            data,
        }
    }

    fn check_tprod(&self, other: &Tensor3) -> Result<()> {
        if self.n != other.m || self.p != other.p {
            return Err(Error::dim(format!(
                "t-product of {}x{}x{} and {}x{}x{}",
                self.m, self.n, self.p, other.m, other.n, other.p
            )));
        }
        Ok(())
    }

    /// t-product `fold(bcirc(self) unfold(other))`.
    ///
    /// Small products use the direct block-circulant sum, larger ones the
    /// Fourier path; see [`Tensor3::tprod_direct`], [`Tensor3::tprod_fourier`].
    pub fn tprod(&self, other: &Tensor3) -> Result<Tensor3> {
        self.check_tprod(other)?;
        let inner = self.m.min(self.n).min(other.n);
        if self.p * inner <= DIRECT_TPROD_LIMIT {
            self.tprod_direct(other)
        } else {
            self.tprod_fourier(other)
        }
    }

    /// `C^(i) = sum_k A^(i-k mod p) B^(k)`.
    pub fn tprod_direct(&self, other: &Tensor3) -> Result<Tensor3> {
        self.check_tprod(other)?;
        let (m, n, p) = self.dims();
        let l = other.n;
        let mut data = vec![0.0; m * l * p];
        for i in 0..p {
            let out = &mut data[i * m * l..(i + 1) * m * l];
            for k in 0..p {
                let a = self.slice_data((i + p - k) % p);
                let b = other.slice_data(k);
                for r in 0..m {
                    for t in 0..n {
                        let av = a[r * n + t];
                        if av == 0.0 {
                            continue;
                        }
                        let brow = &b[t * l..(t + 1) * l];
                        let orow = &mut out[r * l..(r + 1) * l];
                        for (o, bv) in orow.iter_mut().zip(brow) {
                            *o += av * bv;
                        }
                    }
                }
            }
        }
        Tensor3::from_vec(m, l, p, data)
    }

    /// t-product through the Fourier blocks: `C_k = A_k B_k`.
    pub fn tprod_fourier(&self, other: &Tensor3) -> Result<Tensor3> {
        self.check_tprod(other)?;
        fourier::tprod_fourier(self, other)
    }

    /// `t^k` with `t^0 = I`; slices must be square.
    pub fn power(&self, k: u32) -> Result<Tensor3> {
        if self.m != self.n {
            return Err(Error::dim(format!("power needs square slices, got {}x{}", self.m, self.n)));
        }
        let mut acc = Tensor3::identity(self.n, self.p);
        for _ in 0..k {
            acc = self.tprod(&acc)?;
        }
        Ok(acc)
    }
}

/// Free-function forms of the core operations.
pub fn tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    a.tprod(b)
}

pub fn unfold(t: &Tensor3) -> RMat {
    t.unfold()
}

pub fn fold(mat: &RMat, p: usize) -> Result<Tensor3> {
    Tensor3::fold(mat, p)
}

pub fn bcirc(t: &Tensor3) -> BlockCirculant {
    t.bcirc()
}

pub fn bcirc_inv(b: &BlockCirculant) -> Result<Tensor3> {
    b.to_tensor()
}

/// The `mp x np` block-circulant embedding of an `m x n x p` tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCirculant {
    m: usize,
    n: usize,
    p: usize,
    matrix: RMat,
}

impl BlockCirculant {
    /// Wrap a matrix claimed to be block circulant with `p x p` blocks.
    pub fn new(matrix: RMat, p: usize) -> Result<Self> {
        if p == 0 || matrix.nrows() % p != 0 || matrix.ncols() % p != 0 {
            return Err(Error::dim(format!(
                "{}x{} matrix is not a {p}x{p} block matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(BlockCirculant {
            m: matrix.nrows() / p,
            n: matrix.ncols() / p,
            p,
            matrix,
        })
    }

    pub fn block_dims(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.p)
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMat {
        self.matrix
    }

    fn block(&self, r: usize, c: usize) -> nalgebra::DMatrixView<'_, f64> {
        self.matrix.view((r * self.m, c * self.n), (self.m, self.n))
    }

    /// Largest deviation of any block from the circulant pattern.
    pub fn circulant_deviation(&self) -> f64 {
        let p = self.p;
        let mut dev: f64 = 0.0;
        for r in 0..p {
            for c in 0..p {
                let k = (r + p - c) % p;
                let a = self.block(r, c);
                let b = self.block(k, 0);
                for (x, y) in a.iter().zip(b.iter()) {
                    dev = dev.max((x - y).abs());
                }
            }
        }
        dev
    }

    /// `bcirc^{-1}`: the first block column as frontal slices. Rejects
    /// matrices whose blocks deviate from circulant structure by more than
    /// `1e-10 * max|entry|`.
    pub fn to_tensor(&self) -> Result<Tensor3> {
        let scale = self.matrix.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let tol = 1e-10 * scale;
        let dev = self.circulant_deviation();
        if dev > tol {
            return Err(Error::NotBlockCirculant { deviation: dev, tolerance: tol });
        }
        let col = self.matrix.columns(0, self.n).into_owned();
        Tensor3::fold(&col, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(m: usize, n: usize, p: usize, v: &[f64]) -> Tensor3 {
        Tensor3::from_vec(m, n, p, v.to_vec()).unwrap()
    }

    #[test]
    fn unfold_identity() {
        let u = Tensor3::identity(2, 2).unfold();
        assert_eq!(u, RMat::from_row_slice(4, 2, &[1., 0., 0., 1., 0., 0., 0., 0.]));
        assert_eq!(Tensor3::fold(&u, 2).unwrap(), Tensor3::identity(2, 2));
    }

    #[test]
    fn unfold_tube() {
        let x = t(1, 1, 3, &[1., 2., 3.]);
        assert_eq!(x.unfold(), RMat::from_column_slice(3, 1, &[1., 2., 3.]));
        assert_eq!(Tensor3::fold(&x.unfold(), 3).unwrap(), x);
    }

    #[test]
    fn fold_rejects_bad_rows() {
        let m = RMat::zeros(5, 2);
        assert!(matches!(Tensor3::fold(&m, 2), Err(Error::Dimension(_))));
    }

    #[test]
    fn constructor_rejects_nonfinite() {
        assert!(matches!(
            Tensor3::from_vec(1, 1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { k: 1, .. })
        ));
        assert!(Tensor3::from_vec(1, 1, 1, vec![f64::INFINITY]).is_err());
        assert!(Tensor3::from_vec(0, 1, 1, vec![]).is_err());
        assert!(Tensor3::from_vec(1, 1, 2, vec![1.0]).is_err());
    }

    #[test]
    fn bcirc_small() {
        let x = t(1, 1, 2, &[1., 2.]);
        assert_eq!(*x.bcirc().matrix(), RMat::from_row_slice(2, 2, &[1., 2., 2., 1.]));
        assert_eq!(*Tensor3::identity(3, 4).bcirc().matrix(), RMat::identity(12, 12));
        let b = BlockCirculant::new(RMat::from_row_slice(2, 2, &[1., 2., 2., 1.]), 2).unwrap();
        assert_eq!(b.to_tensor().unwrap(), x);
        let eye = BlockCirculant::new(RMat::identity(6, 6), 3).unwrap();
        assert_eq!(eye.to_tensor().unwrap(), Tensor3::identity(2, 3));
    }

    #[test]
    fn bcirc_layout_first_block_row() {
        let x = t(1, 2, 3, &[1., 2., 3., 4., 5., 6.]);
        let b = x.bcirc();
        // first block row is A^(1), A^(p), ..., A^(2)
        assert_eq!(b.matrix()[(0, 2)], 5.0);
        assert_eq!(b.matrix()[(0, 3)], 6.0);
        assert_eq!(b.matrix()[(0, 4)], 3.0);
        assert_eq!(b.matrix()[(0, 5)], 4.0);
    }

    #[test]
    fn bcirc_inv_rejects_non_circulant() {
        let mut m = RMat::from_row_slice(2, 2, &[1., 2., 2., 1.]);
        m[(1, 1)] = 1.5;
        let b = BlockCirculant::new(m, 2).unwrap();
        assert!(matches!(b.to_tensor(), Err(Error::NotBlockCirculant { .. })));
    }

    #[test]
    fn tprod_tubes() {
        let a = t(1, 1, 2, &[1., 2.]);
        let b = t(1, 1, 2, &[3., 4.]);
        assert_eq!(a.tprod(&b).unwrap(), t(1, 1, 2, &[11., 10.]));
    }

    #[test]
    fn tprod_dimension_mismatch() {
        let a = Tensor3::zeros(2, 3, 2);
        let b = Tensor3::zeros(2, 2, 2);
        assert!(matches!(a.tprod(&b), Err(Error::Dimension(_))));
        let c = Tensor3::zeros(3, 2, 3);
        assert!(matches!(a.tprod(&c), Err(Error::Dimension(_))));
    }

    #[test]
    fn transpose_rules() {
        assert_eq!(Tensor3::identity(3, 4).transpose(), Tensor3::identity(3, 4));
        let x = t(1, 2, 3, &[1., 2., 3., 4., 5., 6.]);
        let xt = x.transpose();
        assert_eq!(xt.dims(), (2, 1, 3));
        assert_eq!(xt.slice(1), x.slice(2).transpose());
        assert_eq!(xt.slice(2), x.slice(1).transpose());
        assert_eq!(xt.transpose(), x);
    }

    #[test]
    fn add_scale_power() {
        let x = t(2, 2, 2, &[1., 2., 3., 4., 5., 6., 7., 8.]);
        assert_eq!(x.add(&Tensor3::zeros(2, 2, 2)).unwrap(), x);
        assert_eq!(x.power(0).unwrap(), Tensor3::identity(2, 2));
        assert_eq!(x.scale(2.0).data()[7], 16.0);
        assert!(x.add(&Tensor3::zeros(2, 2, 3)).is_err());
        assert!(t(1, 2, 1, &[1., 2.]).power(2).is_err());
    }
}
