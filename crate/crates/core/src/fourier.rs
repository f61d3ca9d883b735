//! Fourier-domain block diagonalization along the third mode.
//!
//! Forward transform (unnormalized): `A_i = sum_k xi^{(i-1)(k-1)} A^(k)`,
//! `xi = exp(-2 pi i / p)`. Inverse: `A^(i) = (1/p) sum_k conj(xi)^{(i-1)(k-1)} A_k`.
//! The normalized matrix `F_p` is only used to state the similarity
//! `bcirc(A) = (F_p* (x) I_m) diag(A_1..A_p) (F_p (x) I_n)`.
//!
//! Real tensors have paired blocks: `A_1` real, `A_{p-k+2} = conj(A_k)`, and
//! for even `p` the middle block `A_{(p+2)/2}` real. [`lift`] evaluates a
//! blockwise map on one representative of each pair and fills the partner
//! with the exact conjugate, so real input always maps to real output.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{self, CMat, KernelError, RMat};
use crate::report::{ResidualReport, Tolerances};
use crate::tensor::Tensor3;

/// Cached powers of `xi` for a fixed slice count.
#[derive(Debug, Clone)]
pub struct FourierContext {
    p: usize,
    powers: Vec<Complex64>,
}

impl FourierContext {
    pub fn new(p: usize) -> Self {
        assert!(p > 0, "slice count must be positive");
        let mut powers = vec![Complex64::new(0.0, 0.0); p];
        for e in 0..=p / 2 {
            powers[e] = root(e, p);
        }
        // xi^{p-e} = conj(xi^e), kept bit-exact
        for e in p / 2 + 1..p {
            powers[e] = powers[p - e].conj();
        }
        FourierContext { p, powers }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// The primitive root `xi = exp(-2 pi i / p)`.
    pub fn xi(&self) -> Complex64 {
        self.powers[1 % self.p]
    }

    /// `xi^e` for any integer exponent.
    pub fn power(&self, e: i64) -> Complex64 {
        self.powers[e.rem_euclid(self.p as i64) as usize]
    }

    /// Normalized `F_p = p^{-1/2} [xi^{(j-1)(k-1)}]`.
    pub fn dft_matrix(&self) -> CMat {
        let p = self.p;
        let s = 1.0 / (p as f64).sqrt();
        CMat::from_fn(p, p, |j, k| self.powers[(j * k) % p] * s)
    }
}

/// `exp(-2 pi i e / p)`, exact at quarter turns.
fn root(e: usize, p: usize) -> Complex64 {
    if (4 * e) % p == 0 {
        return match (4 * e / p) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
    }
    let theta = -2.0 * PI * e as f64 / p as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Conjugate partner of block `k` (0-based): `k -> (p - k) mod p`.
pub fn partner(k: usize, p: usize) -> usize {
    (p - k) % p
}

/// Blocks whose pairing forces them to be real: the first, and the middle
/// one when `p` is even.
pub fn is_real_forced(k: usize, p: usize) -> bool {
    k == 0 || (p % 2 == 0 && k == p / 2)
}

/// One representative per conjugate pair: `0..=p/2` (0-based).
pub fn representatives(p: usize) -> std::ops::RangeInclusive<usize> {
    0..=p / 2
}

/// Dense complex tensor, the output of an inverse transform that was not
/// certified real.
#[derive(Debug, Clone, PartialEq)]
pub struct CTensor3 {
    m: usize,
    n: usize,
    p: usize,
    data: Vec<Complex64>,
}

impl CTensor3 {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.p)
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[k * self.m * self.n + i * self.n + j]
    }

    pub fn slice(&self, k: usize) -> CMat {
        let sz = self.m * self.n;
        CMat::from_row_slice(self.m, self.n, &self.data[k * sz..(k + 1) * sz])
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |a, z| a.max(z.im.abs()))
    }

    /// Real parts; fails on non-finite data only.
    pub fn real_part(&self) -> Result<Tensor3> {
        Tensor3::from_vec(self.m, self.n, self.p, self.data.iter().map(|z| z.re).collect())
    }
}

/// The `p` Fourier blocks of a tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBlocks {
    m: usize,
    n: usize,
    blocks: Vec<CMat>,
    real_origin: bool,
}

impl FourierBlocks {
    /// Wrap arbitrary blocks; they are not assumed to come from a real tensor.
    pub fn new(blocks: Vec<CMat>) -> Result<Self> {
        let first = blocks.first().ok_or_else(|| Error::dim("at least one Fourier block is required"))?;
        let (m, n) = first.shape();
        if m == 0 || n == 0 {
            return Err(Error::dim("Fourier blocks must be non-empty"));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.shape() != (m, n) {
                return Err(Error::dim(format!("block {} is {:?}, expected {:?}", k + 1, b.shape(), (m, n))));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::dim(format!("block {} has non-finite entries", k + 1)));
            }
        }
        Ok(FourierBlocks {
            m,
            n,
            blocks,
            real_origin: false,
        })
    }

    /// Build blocks by mirroring: `reps[k]` for `k in 0..=p/2`, partners set
    /// to exact conjugates. Real-forced blocks keep only their real part.
    pub fn from_representatives(reps: Vec<CMat>, p: usize) -> Result<Self> {
        if reps.len() != p / 2 + 1 {
            return Err(Error::dim(format!("expected {} representative blocks for p = {p}, got {}", p / 2 + 1, reps.len())));
        }
        let mut blocks = vec![CMat::zeros(0, 0); p];
        for (k, b) in reps.into_iter().enumerate() {
            if is_real_forced(k, p) {
                blocks[k] = b.map(|z| Complex64::new(z.re, 0.0));
            } else {
                blocks[partner(k, p)] = kernels::conj(&b);
                blocks[k] = b;
            }
        }
        let mut fb = Self::new(blocks)?;
        fb.real_origin = true;
        Ok(fb)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.blocks.len())
    }

    pub fn p(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<CMat> {
        self.blocks
    }

    /// True when the blocks are known to satisfy the pairing relations.
    pub fn is_real_origin(&self) -> bool {
        self.real_origin
    }

    /// The pairing involution (0-based).
    pub fn pairing(&self) -> Vec<usize> {
        let p = self.p();
        (0..p).map(|k| partner(k, p)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(kernels::max_abs).fold(0.0, f64::max)
    }
}

/// Forward transform of a real tensor; the result is tagged real-origin.
pub fn to_fourier(t: &Tensor3) -> FourierBlocks {
    let (m, n, p) = t.dims();
    let ctx = FourierContext::new(p);
    let slices: Vec<RMat> = (0..p).map(|k| t.slice(k)).collect();
    let blocks = (0..p)
        .map(|i| {
            let mut acc = CMat::zeros(m, n);
            for (k, s) in slices.iter().enumerate() {
                let w = ctx.power((i * k) as i64);
                for (dst, &x) in acc.iter_mut().zip(s.iter()) {
                    *dst += w * x;
                }
            }
            acc
        })
        .collect();
    let fb = FourierBlocks {
        m,
        n,
        blocks,
        real_origin: true,
    };
    debug_assert!(check_pairing(&fb).pass);
    fb
}

fn inverse_sum(fb: &FourierBlocks) -> CTensor3 {
    let (m, n, p) = fb.dims();
    let ctx = FourierContext::new(p);
    let scale = 1.0 / p as f64;
    let mut data = Vec::with_capacity(m * n * p);
    for i in 0..p {
        let mut acc = CMat::zeros(m, n);
        for (k, b) in fb.blocks.iter().enumerate() {
            let w = ctx.power((i * k) as i64).conj();
            acc += b * w;
        }
        // row-major within the slice
        for r in 0..m {
            for c in 0..n {
                data.push(acc[(r, c)] * scale);
            }
        }
    }
    CTensor3 { m, n, p, data }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realness {
    RequireReal,
    AllowComplex,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reconstructed {
    Real(Tensor3),
    Complex(CTensor3),
}

/// Inverse transform. `RequireReal` validates the pairing relations, checks
/// the imaginary residue of the reconstruction and returns the real part;
/// `AllowComplex` returns the complex tensor unchanged.
pub fn from_fourier(fb: &FourierBlocks, realness: Realness) -> Result<Reconstructed> {
    match realness {
        Realness::RequireReal => from_fourier_real(fb, &Tolerances::default()).map(|(t, _)| Reconstructed::Real(t)),
        Realness::AllowComplex => Ok(Reconstructed::Complex(from_fourier_complex(fb))),
    }
}

pub fn from_fourier_complex(fb: &FourierBlocks) -> CTensor3 {
    inverse_sum(fb)
}

/// Certified real inverse transform; also returns the largest discarded
/// imaginary part.
pub fn from_fourier_real(fb: &FourierBlocks, tol: &Tolerances) -> Result<(Tensor3, f64)> {
    let report = check_pairing_with(fb, tol);
    if let Some(bad) = report.checks.iter().find(|c| !c.pass) {
        return Err(Error::PairingViolation {
            check: bad.name.clone(),
            residual: bad.residual,
            tolerance: bad.tolerance,
        });
    }
    let c = inverse_sum(fb);
    let max_imag = c.max_imag();
    let tol_real = tol.real(fb.max_abs(), fb.p());
    if !(max_imag <= tol_real) {
        return Err(Error::RealnessViolation {
            max_imag,
            tolerance: tol_real,
        });
    }
    Ok((c.real_part()?, max_imag))
}

/// Pairing residuals: `max|Im A_1|`, `max |A_{p-k+2} - conj(A_k)|` over the
/// paired indices, and `max|Im A_mid|` for even `p`.
pub fn check_pairing(fb: &FourierBlocks) -> ResidualReport {
    check_pairing_with(fb, &Tolerances::default())
}

pub fn check_pairing_with(fb: &FourierBlocks, tol: &Tolerances) -> ResidualReport {
    let p = fb.p();
    let t = tol.pair(fb.max_abs());
    let max_im = |b: &CMat| b.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
    let mut r = ResidualReport::new("check_pairing");
    r.check("block1_imag", max_im(&fb.blocks[0]), t);
    let mut pair: f64 = 0.0;
    for k in 1..p {
        let q = partner(k, p);
        if q == k {
            continue;
        }
        for (a, b) in fb.blocks[q].iter().zip(fb.blocks[k].iter()) {
            pair = pair.max((a - b.conj()).norm());
        }
    }
    r.check("conjugate_pairs", pair, t);
    if p % 2 == 0 && p > 1 {
        r.check("mid_block_imag", max_im(&fb.blocks[p / 2]), t);
    }
    r
}

/// Input handed to a [`BlockMap`]: real-forced blocks arrive as real
/// matrices, all others as complex.
#[derive(Debug, Clone, Copy)]
pub enum Block<'a> {
    Real(&'a RMat),
    Complex(&'a CMat),
}

impl Block<'_> {
    pub fn to_complex(&self) -> CMat {
        match self {
            Block::Real(m) => kernels::to_complex(m),
            Block::Complex(m) => (*m).clone(),
        }
    }
}

/// Values that can be mirrored onto a partner block.
pub trait Conjugate {
    fn conjugate(&self) -> Self;
}

impl Conjugate for CMat {
    fn conjugate(&self) -> Self {
        kernels::conj(self)
    }
}

impl Conjugate for Vec<f64> {
    fn conjugate(&self) -> Self {
        self.clone()
    }
}

impl Conjugate for usize {
    fn conjugate(&self) -> Self {
        *self
    }
}

impl<A: Conjugate, B: Conjugate> Conjugate for (A, B) {
    fn conjugate(&self) -> Self {
        (self.0.conjugate(), self.1.conjugate())
    }
}

/// A blockwise matrix operation `Phi_k`. It is only evaluated on the
/// representative indices `0..=p/2`; partners receive `conjugate()` of the
/// representative's output.
pub trait BlockMap {
    type Output: Conjugate;
    fn apply(&self, k: usize, block: Block<'_>) -> std::result::Result<Self::Output, KernelError>;
}

/// A [`BlockMap`] from a closure.
pub struct MatrixMap<F>(pub F);

impl<F, O> BlockMap for MatrixMap<F>
where
    F: Fn(usize, Block<'_>) -> std::result::Result<O, KernelError>,
    O: Conjugate,
{
    type Output = O;
    fn apply(&self, k: usize, block: Block<'_>) -> std::result::Result<O, KernelError> {
        (self.0)(k, block)
    }
}

/// Evaluate `map` over the paired blocks and return all `p` outputs, the
/// partners filled by exact conjugation. Errors carry the 1-based index of
/// the failing block.
pub fn lift_with<M: BlockMap>(fb: &FourierBlocks, map: &M) -> Result<Vec<M::Output>> {
    if !fb.real_origin {
        let report = check_pairing(fb);
        if let Some(bad) = report.checks.iter().find(|c| !c.pass) {
            return Err(Error::PairingViolation {
                check: bad.name.clone(),
                residual: bad.residual,
                tolerance: bad.tolerance,
            });
        }
    }
    let p = fb.p();
    let mut out: Vec<Option<M::Output>> = (0..p).map(|_| None).collect();
    for k in representatives(p) {
        let res = if is_real_forced(k, p) {
            let re = fb.blocks[k].map(|z| z.re);
            map.apply(k, Block::Real(&re))
        } else {
            map.apply(k, Block::Complex(&fb.blocks[k]))
        };
        let val = res.map_err(|e| Error::from_block(k + 1, e))?;
        let q = partner(k, p);
        if q != k {
            out[q] = Some(val.conjugate());
        }
        out[k] = Some(val);
    }
    Ok(out.into_iter().map(|v| v.expect("every block is set")).collect())
}

/// Lift a matrix-valued block map to new Fourier blocks.
pub fn lift<M: BlockMap<Output = CMat>>(fb: &FourierBlocks, map: &M) -> Result<FourierBlocks> {
    let blocks = lift_with(fb, map)?;
    let mut out = FourierBlocks::new(blocks)?;
    out.real_origin = true;
    Ok(out)
}

/// Assemble Fourier blocks produced by a lifted map; marks them real-origin.
pub(crate) fn paired_blocks(blocks: Vec<CMat>) -> Result<FourierBlocks> {
    let mut out = FourierBlocks::new(blocks)?;
    out.real_origin = true;
    Ok(out)
}

pub(crate) fn tprod_fourier(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let fa = to_fourier(a);
    let fb = to_fourier(b);
    let map = MatrixMap(|k: usize, blk: Block<'_>| -> std::result::Result<CMat, KernelError> {
        Ok(match blk {
            Block::Real(x) => kernels::to_complex(&(x * fb.blocks[k].map(|z| z.re))),
            Block::Complex(x) => x * &fb.blocks[k],
        })
    });
    let prod = lift(&fa, &map)?;
    Ok(from_fourier_real(&prod, &Tolerances::default())?.0)
}
