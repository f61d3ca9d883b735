//! Real tensor factorizations: t-SVD, t-Schur, t-Jordan and the idempotent
//! factorization `A = U * E * V`.
//!
//! Each one factors the representative Fourier blocks, mirrors conjugates
//! onto the partners and transforms back. Real-forced blocks use the real
//! matrix factorization so the reconstruction is real.

use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{self, from_fourier_complex, paired_blocks, to_fourier, Block, CTensor3, Conjugate, FourierBlocks, MatrixMap};
use crate::kernels::{
    self, conj, jordan_complex, jordan_real, rank_normal_form, schur_complex, schur_real_ordered, svd, to_complex, CMat, KernelError,
    MatrixJordan,
};
use crate::report::{ResidualReport, Tolerances};
use crate::structure;
use crate::tensor::Tensor3;

/// Inverse transform of mirrored blocks; returns the tensor and the
/// discarded imaginary residue.
fn assemble(blocks: Vec<CMat>, tol: &Tolerances) -> Result<(Tensor3, f64)> {
    fourier::from_fourier_real(&paired_blocks(blocks)?, tol)
}

fn realness_tolerance(fb: &FourierBlocks, tol: &Tolerances) -> f64 {
    tol.real(fb.max_abs(), fb.p())
}

#[derive(Debug, Clone)]
struct SvdBlock {
    u: CMat,
    s: Vec<f64>,
    v: CMat,
}

impl Conjugate for SvdBlock {
    fn conjugate(&self) -> Self {
        SvdBlock {
            u: conj(&self.u),
            s: self.s.clone(),
            v: conj(&self.v),
        }
    }
}

fn svd_block(block: Block<'_>) -> std::result::Result<SvdBlock, KernelError> {
    Ok(match block {
        Block::Real(x) => {
            let f = svd(x)?;
            SvdBlock {
                u: to_complex(&f.u),
                s: f.s,
                v: to_complex(&f.v),
            }
        }
        Block::Complex(x) => {
            let f = svd(x)?;
            SvdBlock { u: f.u, s: f.s, v: f.v }
        }
    })
}

fn diag_block(s: &[f64], m: usize, n: usize) -> CMat {
    let mut d = CMat::zeros(m, n);
    for (i, &x) in s.iter().enumerate() {
        d[(i, i)] = Complex64::new(x, 0.0);
    }
    d
}

/// `A = U * S * V^T` with `U`, `V` orthogonal and `S` f-diagonal.
#[derive(Debug, Clone)]
pub struct TSvdResult {
    pub u: Tensor3,
    pub s: Tensor3,
    pub v: Tensor3,
    /// Singular values of each Fourier block, nonincreasing.
    pub sigmas: Vec<Vec<f64>>,
    pub report: ResidualReport,
}

pub fn t_svd(a: &Tensor3) -> Result<TSvdResult> {
    t_svd_with(a, &Tolerances::default())
}

pub fn t_svd_with(a: &Tensor3, tol: &Tolerances) -> Result<TSvdResult> {
    let start = Instant::now();
    let (m, n, p) = a.dims();
    let fa = to_fourier(a);
    let blocks = fourier::lift_with(&fa, &MatrixMap(|_, b: Block<'_>| svd_block(b)))?;

    let s_blocks = blocks.iter().map(|b| diag_block(&b.s, m, n)).collect();
    let (u, iu) = assemble(blocks.iter().map(|b| b.u.clone()).collect(), tol)?;
    let (s, is) = assemble(s_blocks, tol)?;
    let (v, iv) = assemble(blocks.iter().map(|b| b.v.clone()).collect(), tol)?;
    let sigmas: Vec<Vec<f64>> = blocks.into_iter().map(|b| b.s).collect();

    let scale = a.max_abs();
    let mut report = ResidualReport::new("tsvd");
    let rec = u.tprod(&s)?.tprod(&v.transpose())?.max_abs_diff(a);
    report.check("reconstruction", rec, tol.rec(scale, p));
    report.check("orthogonality_u", structure::orthogonality_residual(&u), tol.orth(m, p));
    report.check("orthogonality_v", structure::orthogonality_residual(&v), tol.orth(n, p));
    report.check("f_diagonal", structure::off_diagonal(&s), tol.structure(scale, p));
    report.check("realness", iu.max(is).max(iv), realness_tolerance(&fa, tol));
    report.check("sigma_order", sigma_order_violation(&sigmas), 0.0);
    Ok(TSvdResult {
        u,
        s,
        v,
        sigmas,
        report: report.timed(start),
    })
}

/// Largest negative singular value or increase along a block's list.
pub fn sigma_order_violation(sigmas: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for s in sigmas {
        for w in s.windows(2) {
            worst = worst.max(w[1] - w[0]);
        }
        for &x in s {
            worst = worst.max(-x);
        }
    }
    worst
}

#[derive(Debug, Clone)]
struct SchurBlock {
    u: CMat,
    t: CMat,
}

impl Conjugate for SchurBlock {
    fn conjugate(&self) -> Self {
        SchurBlock {
            u: conj(&self.u),
            t: conj(&self.t),
        }
    }
}

/// `A = U * T * U^T` with `U` orthogonal and `T` f-quasi-triangular.
#[derive(Debug, Clone)]
pub struct TSchurResult {
    pub u: Tensor3,
    pub t: Tensor3,
    /// Finest diagonal-block partition shared by all slices of `t`.
    pub realized_partition: Vec<usize>,
    pub report: ResidualReport,
}

pub fn t_schur(a: &Tensor3) -> Result<TSchurResult> {
    t_schur_with(a, &Tolerances::default())
}

pub fn t_schur_with(a: &Tensor3, tol: &Tolerances) -> Result<TSchurResult> {
    let start = Instant::now();
    let (m, n, p) = a.dims();
    if m != n {
        return Err(Error::dim(format!("t-Schur needs square slices, got {m}x{n}")));
    }
    let fa = to_fourier(a);
    let map = MatrixMap(|_, b: Block<'_>| -> std::result::Result<SchurBlock, KernelError> {
        Ok(match b {
            Block::Real(x) => {
                let f = schur_real_ordered(x)?;
                SchurBlock {
                    u: to_complex(&f.u),
                    t: to_complex(&f.t),
                }
            }
            Block::Complex(x) => {
                let f = schur_complex(x)?;
                SchurBlock { u: f.u, t: f.t }
            }
        })
    });
    let blocks = fourier::lift_with(&fa, &map)?;
    let (u, iu) = assemble(blocks.iter().map(|b| b.u.clone()).collect(), tol)?;
    let (t, it) = assemble(blocks.into_iter().map(|b| b.t).collect(), tol)?;

    let scale = a.max_abs();
    let band_tol = tol.structure(t.max_abs(), p);
    let realized_partition = structure::quasi_triangular_partition(&t, band_tol).ok_or_else(|| {
        let (slice, row) = structure::violation_site(&t);
        Error::PartitionViolation { slice, row }
    })?;

    let mut report = ResidualReport::new("tschur");
    let rec = u.tprod(&t)?.tprod(&u.transpose())?.max_abs_diff(a);
    report.check("reconstruction", rec, tol.rec(scale, p));
    report.check("orthogonality_u", structure::orthogonality_residual(&u), tol.orth(n, p));
    report.check("quasi_triangular", structure::below_partition(&t, &realized_partition), band_tol);
    report.check("realness", iu.max(it), realness_tolerance(&fa, tol));
    Ok(TSchurResult {
        u,
        t,
        realized_partition,
        report: report.timed(start),
    })
}

#[derive(Debug, Clone)]
struct JordanBlock {
    p: CMat,
    p_inv: CMat,
    j: CMat,
    cond: f64,
}

impl Conjugate for JordanBlock {
    fn conjugate(&self) -> Self {
        JordanBlock {
            p: conj(&self.p),
            p_inv: conj(&self.p_inv),
            j: conj(&self.j),
            cond: self.cond,
        }
    }
}

/// `A = P * J * P^{-1}` with `J` f-upper-block-bi-diagonal.
#[derive(Debug, Clone)]
pub struct TJordanResult {
    pub p: Tensor3,
    pub p_inv: Tensor3,
    pub j: Tensor3,
    pub realized_partition: Vec<usize>,
    /// Largest condition number among the blockwise eigenvector matrices.
    pub cond: f64,
    pub report: ResidualReport,
}

pub fn t_jordan(a: &Tensor3) -> Result<TJordanResult> {
    t_jordan_with(a, &Tolerances::default())
}

pub fn t_jordan_with(a: &Tensor3, tol: &Tolerances) -> Result<TJordanResult> {
    let start = Instant::now();
    let (m, n, p) = a.dims();
    if m != n {
        return Err(Error::dim(format!("t-Jordan needs square slices, got {m}x{n}")));
    }
    let fa = to_fourier(a);
    let map = MatrixMap(|_, b: Block<'_>| -> std::result::Result<JordanBlock, KernelError> {
        Ok(match b {
            Block::Real(x) => {
                let f = jordan_real(x)?;
                JordanBlock {
                    p: to_complex(&f.p),
                    p_inv: to_complex(&f.p_inv),
                    j: to_complex(&f.j),
                    cond: f.cond,
                }
            }
            Block::Complex(x) => {
                let f = jordan_complex(x)?;
                JordanBlock {
                    p: f.p,
                    p_inv: f.p_inv,
                    j: f.j,
                    cond: f.cond,
                }
            }
        })
    });
    let blocks = fourier::lift_with(&fa, &map)?;
    let cond = blocks.iter().map(|b| b.cond).fold(1.0, f64::max);
    let (pt, ip) = assemble(blocks.iter().map(|b| b.p.clone()).collect(), tol)?;
    let (pt_inv, ipi) = assemble(blocks.iter().map(|b| b.p_inv.clone()).collect(), tol)?;
    let (j, ij) = assemble(blocks.into_iter().map(|b| b.j).collect(), tol)?;

    let scale = a.max_abs();
    let band_tol = tol.structure(j.max_abs(), p);
    let realized_partition = structure::block_bidiagonal_partition(&j, band_tol).ok_or_else(|| {
        let (slice, row) = structure::violation_site(&j);
        Error::PartitionViolation { slice, row }
    })?;

    let mut report = ResidualReport::new("tjordan");
    let rec = pt.tprod(&j)?.tprod(&pt_inv)?.max_abs_diff(a);
    report.check("reconstruction", rec, tol.jrec(scale, p, cond));
    let inv = pt.tprod(&pt_inv)?.max_abs_diff(&Tensor3::identity(n, p));
    report.check("p_inverse", inv, tol.jrec(0.0, p, cond));
    report.check("block_bidiagonal", structure::outside_bidiagonal(&j, &realized_partition), band_tol);
    report.check("realness", ip.max(ipi).max(ij), realness_tolerance(&fa, tol));
    Ok(TJordanResult {
        p: pt,
        p_inv: pt_inv,
        j,
        realized_partition,
        cond,
        report: report.timed(start),
    })
}

#[derive(Debug, Clone)]
struct NormalBlock {
    u: CMat,
    u_inv: CMat,
    e: CMat,
    v: CMat,
    v_inv: CMat,
    rank: usize,
}

impl Conjugate for NormalBlock {
    fn conjugate(&self) -> Self {
        NormalBlock {
            u: conj(&self.u),
            u_inv: conj(&self.u_inv),
            e: self.e.clone(),
            v: conj(&self.v),
            v_inv: conj(&self.v_inv),
            rank: self.rank,
        }
    }
}

/// `A = U * E * V` with `E` idempotent and `U`, `V` t-invertible.
#[derive(Debug, Clone)]
pub struct IdempotentFactorization {
    pub u: Tensor3,
    pub e: Tensor3,
    pub v: Tensor3,
    pub u_inv: Tensor3,
    pub v_inv: Tensor3,
    /// Numerical rank of each Fourier block.
    pub ranks: Vec<usize>,
    pub report: ResidualReport,
}

pub fn idempotent_factorization(a: &Tensor3) -> Result<IdempotentFactorization> {
    idempotent_factorization_with(a, &Tolerances::default())
}

pub fn idempotent_factorization_with(a: &Tensor3, tol: &Tolerances) -> Result<IdempotentFactorization> {
    let start = Instant::now();
    let (m, n, p) = a.dims();
    if m != n {
        return Err(Error::dim(format!("idempotent factorization needs square slices, got {m}x{n}")));
    }
    let fa = to_fourier(a);
    let rtol = tol.rtol;
    let map = MatrixMap(move |_, b: Block<'_>| -> std::result::Result<NormalBlock, KernelError> {
        Ok(match b {
            Block::Real(x) => {
                let f = rank_normal_form(x, rtol)?;
                NormalBlock {
                    e: to_complex(&f.e()),
                    u: to_complex(&f.u),
                    u_inv: to_complex(&f.u_inv),
                    v: to_complex(&f.v),
                    v_inv: to_complex(&f.v_inv),
                    rank: f.rank,
                }
            }
            Block::Complex(x) => {
                let f = rank_normal_form(x, rtol)?;
                NormalBlock {
                    e: f.e(),
                    u: f.u,
                    u_inv: f.u_inv,
                    v: f.v,
                    v_inv: f.v_inv,
                    rank: f.rank,
                }
            }
        })
    });
    let blocks = fourier::lift_with(&fa, &map)?;
    let cond_u = blocks
        .iter()
        .map(|b| kernels::fro_norm(&b.u) * kernels::fro_norm(&b.u_inv))
        .fold(1.0, f64::max);
    let ranks = blocks.iter().map(|b| b.rank).collect();
    let (u, i1) = assemble(blocks.iter().map(|b| b.u.clone()).collect(), tol)?;
    let (u_inv, i2) = assemble(blocks.iter().map(|b| b.u_inv.clone()).collect(), tol)?;
    let (e, i3) = assemble(blocks.iter().map(|b| b.e.clone()).collect(), tol)?;
    let (v, i4) = assemble(blocks.iter().map(|b| b.v.clone()).collect(), tol)?;
    let (v_inv, i5) = assemble(blocks.into_iter().map(|b| b.v_inv).collect(), tol)?;

    let scale = a.max_abs();
    let mut report = ResidualReport::new("idem");
    let e2 = e.tprod(&e)?.max_abs_diff(&e);
    report.check("idempotent", e2, tol.rec(e.max_abs(), p));
    let rec = u.tprod(&e)?.tprod(&v)?.max_abs_diff(a);
    report.check("reconstruction", rec, tol.rec(scale, p));
    let ui = u.tprod(&u_inv)?.max_abs_diff(&Tensor3::identity(m, p));
    report.check("u_inverse", ui, tol.jrec(1.0, p, cond_u));
    let vi = v.tprod(&v_inv)?.max_abs_diff(&Tensor3::identity(n, p));
    report.check("v_inverse", vi, tol.orth(n, p));
    report.check("realness", i1.max(i2).max(i3).max(i4).max(i5), realness_tolerance(&fa, tol));
    Ok(IdempotentFactorization {
        u,
        e,
        v,
        u_inv,
        v_inv,
        ranks,
        report: report.timed(start),
    })
}

/// Jordan data computed independently on every Fourier block, with no
/// mirroring. Assembling it generally gives complex tensors.
#[derive(Debug, Clone)]
pub struct NaiveJordan {
    pub blocks: Vec<MatrixJordan<Complex64>>,
}

impl NaiveJordan {
    /// Inverse transforms of the blockwise `P` and `J`.
    pub fn assemble(&self) -> Result<(CTensor3, CTensor3)> {
        let p = assemble_unpaired(self.blocks.iter().map(|b| b.p.clone()).collect())?;
        let j = assemble_unpaired(self.blocks.iter().map(|b| b.j.clone()).collect())?;
        Ok((p, j))
    }
}

pub fn t_jordan_naive(a: &Tensor3) -> Result<NaiveJordan> {
    let fa = to_fourier(a);
    let blocks = fa
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, b)| jordan_complex(b).map_err(|e| Error::from_block(k + 1, e)))
        .collect::<Result<_>>()?;
    Ok(NaiveJordan { blocks })
}

/// Complex inverse transform of arbitrary blocks.
pub fn assemble_unpaired(blocks: Vec<CMat>) -> Result<CTensor3> {
    Ok(from_fourier_complex(&FourierBlocks::new(blocks)?))
}

/// Blockwise SVD on every Fourier block with no mirroring; returns the
/// complex `U`, `S`, `V`.
pub fn t_svd_naive(a: &Tensor3) -> Result<(CTensor3, CTensor3, CTensor3)> {
    let (m, n, _) = a.dims();
    let fa = to_fourier(a);
    let mut us = Vec::new();
    let mut ss = Vec::new();
    let mut vs = Vec::new();
    for (k, b) in fa.blocks().iter().enumerate() {
        let f = svd(b).map_err(|e| Error::from_block(k + 1, e))?;
        ss.push(diag_block(&f.s, m, n));
        us.push(f.u);
        vs.push(f.v);
    }
    Ok((assemble_unpaired(us)?, assemble_unpaired(ss)?, assemble_unpaired(vs)?))
}
