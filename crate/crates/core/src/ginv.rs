//! Generalized inverses under the t-product.

use std::time::Instant;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factor::{idempotent_factorization_with, t_svd_with};
use crate::fourier::{self, paired_blocks, to_fourier, Block, MatrixMap};
use crate::kernels::{self, drazin_inverse, group_inverse, inverse, mp_inverse, to_complex, CMat, KernelError};
use crate::report::{ResidualReport, Tolerances};
use crate::tensor::Tensor3;

/// An inverse together with the residuals of its defining identities.
#[derive(Debug, Clone)]
pub struct Inverse {
    pub x: Tensor3,
    pub report: ResidualReport,
}

#[derive(Debug, Clone)]
pub struct DrazinResult {
    pub ad: Tensor3,
    /// Drazin index: the largest matrix index over the Fourier blocks.
    pub index: usize,
    pub report: ResidualReport,
}

/// A t-invertible `W` with `A * W * A = A`, built as `V^{-1} * U^{-1}` from
/// the idempotent factorization `A = U * E * V`.
#[derive(Debug, Clone)]
pub struct UnitRegularWitness {
    pub w: Tensor3,
    pub u: Tensor3,
    pub e: Tensor3,
    pub v: Tensor3,
    pub report: ResidualReport,
}

fn square(a: &Tensor3, what: &str) -> Result<usize> {
    let (m, n, _) = a.dims();
    if m != n {
        return Err(Error::dim(format!("{what} needs square slices, got {m}x{n}")));
    }
    Ok(n)
}

/// Apply a matrix map to the representative blocks and transform back.
fn lift_real<F>(a: &Tensor3, tol: &Tolerances, f: F) -> Result<Tensor3>
where
    F: Fn(Block<'_>) -> std::result::Result<CMat, KernelError>,
{
    let fa = to_fourier(a);
    let out = fourier::lift(&fa, &MatrixMap(|_, b: Block<'_>| f(b)))?;
    Ok(fourier::from_fourier_real(&out, tol)?.0)
}

fn scale_of(a: &Tensor3, x: &Tensor3) -> f64 {
    a.max_abs().max(x.max_abs())
}

pub fn t_inverse(a: &Tensor3) -> Result<Inverse> {
    t_inverse_with(a, &Tolerances::default())
}

pub fn t_inverse_with(a: &Tensor3, tol: &Tolerances) -> Result<Inverse> {
    let start = Instant::now();
    let n = square(a, "t-inverse")?;
    let p = a.slices();
    let rtol = tol.rtol;
    let x = lift_real(a, tol, |b| match b {
        Block::Real(m) => inverse(m, rtol).map(|i| to_complex(&i)),
        Block::Complex(m) => inverse(m, rtol),
    })?;
    let id = Tensor3::identity(n, p);
    let t = tol.gi(scale_of(a, &x), p);
    let mut report = ResidualReport::new("tinv");
    report.check("right_inverse", a.tprod(&x)?.max_abs_diff(&id), t);
    report.check("left_inverse", x.tprod(a)?.max_abs_diff(&id), t);
    Ok(Inverse {
        x,
        report: report.timed(start),
    })
}

/// Residuals of the four Penrose equations for `x` as a generalized inverse
/// of `a`.
pub fn penrose_report(a: &Tensor3, x: &Tensor3, tol: &Tolerances, operation: &str) -> Result<ResidualReport> {
    let p = a.slices();
    let t = tol.gi(scale_of(a, x), p);
    let ax = a.tprod(x)?;
    let xa = x.tprod(a)?;
    let mut r = ResidualReport::new(operation);
    r.check("penrose1", ax.tprod(a)?.max_abs_diff(a), t);
    r.check("penrose2", xa.tprod(x)?.max_abs_diff(x), t);
    r.check("penrose3", ax.transpose().max_abs_diff(&ax), t);
    r.check("penrose4", xa.transpose().max_abs_diff(&xa), t);
    Ok(r)
}

/// Moore-Penrose inverse `V * S^+ * U^T` from the t-SVD.
pub fn t_pinv_svd(a: &Tensor3) -> Result<Inverse> {
    t_pinv_svd_with(a, &Tolerances::default())
}

pub fn t_pinv_svd_with(a: &Tensor3, tol: &Tolerances) -> Result<Inverse> {
    let start = Instant::now();
    let (m, n, _) = a.dims();
    let f = t_svd_with(a, tol)?;
    let rtol = tol.rtol.unwrap_or_else(|| kernels::default_rtol(m, n));
    let blocks = f
        .sigmas
        .iter()
        .map(|s| {
            let cut = rtol * s.first().copied().unwrap_or(0.0);
            let mut d = CMat::zeros(n, m);
            for (i, &x) in s.iter().enumerate() {
                if x > cut {
                    d[(i, i)] = Complex64::new(1.0 / x, 0.0);
                }
            }
            d
        })
        .collect();
    let s_pinv = fourier::from_fourier_real(&paired_blocks(blocks)?, tol)?.0;
    let x = f.v.tprod(&s_pinv)?.tprod(&f.u.transpose())?;
    let report = penrose_report(a, &x, tol, "pinv")?;
    Ok(Inverse {
        x,
        report: report.timed(start),
    })
}

/// Moore-Penrose inverse from the blockwise matrix pseudoinverses.
pub fn t_pinv_blocks(a: &Tensor3) -> Result<Inverse> {
    t_pinv_blocks_with(a, &Tolerances::default())
}

pub fn t_pinv_blocks_with(a: &Tensor3, tol: &Tolerances) -> Result<Inverse> {
    let start = Instant::now();
    let rtol = tol.rtol;
    let x = lift_real(a, tol, |b| match b {
        Block::Real(m) => mp_inverse(m, rtol).map(|i| to_complex(&i)),
        Block::Complex(m) => mp_inverse(m, rtol),
    })?;
    let report = penrose_report(a, &x, tol, "pinv")?;
    Ok(Inverse {
        x,
        report: report.timed(start),
    })
}

pub fn t_pinv(a: &Tensor3) -> Result<Inverse> {
    t_pinv_blocks(a)
}

/// Residuals of the Drazin identities with index `k`.
pub fn drazin_report(a: &Tensor3, ad: &Tensor3, k: usize, tol: &Tolerances, operation: &str) -> Result<ResidualReport> {
    let p = a.slices();
    let t = tol.gi(scale_of(a, ad), p);
    let ak = a.power(k as u32)?;
    let mut r = ResidualReport::new(operation);
    r.check("power", a.tprod(&ak)?.tprod(ad)?.max_abs_diff(&ak), t);
    r.check("outer", ad.tprod(a)?.tprod(ad)?.max_abs_diff(ad), t);
    r.check("commute", a.tprod(ad)?.max_abs_diff(&ad.tprod(a)?), t);
    Ok(r)
}

pub fn t_drazin(a: &Tensor3) -> Result<DrazinResult> {
    t_drazin_with(a, &Tolerances::default())
}

pub fn t_drazin_with(a: &Tensor3, tol: &Tolerances) -> Result<DrazinResult> {
    let start = Instant::now();
    square(a, "Drazin inverse")?;
    let rtol = tol.rtol;
    let fa = to_fourier(a);
    let map = MatrixMap(|_, b: Block<'_>| -> std::result::Result<(CMat, usize), KernelError> {
        Ok(match b {
            Block::Real(m) => {
                let d = drazin_inverse(m, rtol)?;
                (to_complex(&d.inverse), d.index)
            }
            Block::Complex(m) => {
                let d = drazin_inverse(m, rtol)?;
                (d.inverse, d.index)
            }
        })
    });
    let blocks = fourier::lift_with(&fa, &map)?;
    let index = blocks.iter().map(|b| b.1).max().unwrap_or(0);
    let out = paired_blocks(blocks.into_iter().map(|b| b.0).collect())?;
    let ad = fourier::from_fourier_real(&out, tol)?.0;
    let report = drazin_report(a, &ad, index, tol, "drazin")?;
    Ok(DrazinResult {
        ad,
        index,
        report: report.timed(start),
    })
}

/// Residuals of the group-inverse identities.
pub fn group_report(a: &Tensor3, x: &Tensor3, tol: &Tolerances) -> Result<ResidualReport> {
    let p = a.slices();
    let t = tol.gi(scale_of(a, x), p);
    let mut r = ResidualReport::new("group");
    r.check("inner", a.tprod(x)?.tprod(a)?.max_abs_diff(a), t);
    r.check("outer", x.tprod(a)?.tprod(x)?.max_abs_diff(x), t);
    r.check("commute", a.tprod(x)?.max_abs_diff(&x.tprod(a)?), t);
    Ok(r)
}

pub fn t_group(a: &Tensor3) -> Result<Inverse> {
    t_group_with(a, &Tolerances::default())
}

pub fn t_group_with(a: &Tensor3, tol: &Tolerances) -> Result<Inverse> {
    let start = Instant::now();
    square(a, "group inverse")?;
    let rtol = tol.rtol;
    let x = lift_real(a, tol, |b| match b {
        Block::Real(m) => group_inverse(m, rtol).map(|i| to_complex(&i)),
        Block::Complex(m) => group_inverse(m, rtol),
    })?;
    let report = group_report(a, &x, tol)?;
    Ok(Inverse {
        x,
        report: report.timed(start),
    })
}

pub fn unit_regular_witness(a: &Tensor3) -> Result<UnitRegularWitness> {
    unit_regular_witness_with(a, &Tolerances::default())
}

pub fn unit_regular_witness_with(a: &Tensor3, tol: &Tolerances) -> Result<UnitRegularWitness> {
    let start = Instant::now();
    let n = square(a, "unit-regular witness")?;
    let p = a.slices();
    let f = idempotent_factorization_with(a, tol)?;
    let w = f.v_inv.tprod(&f.u_inv)?;
    let w_inv = f.u.tprod(&f.v)?;
    let mut report = ResidualReport::new("witness");
    report.check("inner", a.tprod(&w)?.tprod(a)?.max_abs_diff(a), tol.gi(scale_of(a, &w), p));
    let id = Tensor3::identity(n, p);
    report.check("w_invertible", w.tprod(&w_inv)?.max_abs_diff(&id), tol.gi(scale_of(&w, &w_inv), p));
    Ok(UnitRegularWitness {
        w,
        u: f.u,
        e: f.e,
        v: f.v,
        report: report.timed(start),
    })
}
