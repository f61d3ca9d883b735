//! Command-line front end. Every subcommand checks its own result and exits
//! nonzero when a residual check fails.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::factor::{idempotent_factorization_with, t_jordan_with, t_schur_with, t_svd_with};
use crate::gen::{gen, Kind};
use crate::ginv::{
    drazin_report, group_report, penrose_report, t_drazin_with, t_group_with, t_inverse_with, t_pinv_blocks_with, t_pinv_svd_with,
    unit_regular_witness_with,
};
use crate::io::{read_tensor, write_tensor};
use crate::report::{ResidualReport, Tolerances};
use crate::structure;
use crate::tensor::Tensor3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MATH: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tprod", version, about = "Real third-order tensors under the t-product")]
pub struct Cli {
    /// Replace every default tolerance with this value.
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tol: Option<f64>,

    /// Write the residual report as JSON.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,

    /// Suppress the report on standard output.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// C = A * B.
    Tprod {
        a: PathBuf,
        b: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// A = U * S * V^T; writes <prefix>U.tns, <prefix>S.tns, <prefix>V.tns.
    Tsvd {
        a: PathBuf,
        #[arg(long)]
        out_prefix: Option<String>,
    },
    /// A = U * T * U^T; writes <prefix>U.tns, <prefix>T.tns.
    Tschur {
        a: PathBuf,
        #[arg(long)]
        out_prefix: Option<String>,
    },
    /// A = P * J * P^-1; writes <prefix>P.tns, <prefix>J.tns, <prefix>Pinv.tns.
    Tjordan {
        a: PathBuf,
        #[arg(long)]
        out_prefix: Option<String>,
    },
    /// A = U * E * V with E idempotent; writes <prefix>U.tns, <prefix>E.tns, <prefix>V.tns.
    Idem {
        a: PathBuf,
        #[arg(long)]
        out_prefix: Option<String>,
    },
    /// Two-sided t-inverse.
    Tinv {
        a: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Moore-Penrose inverse.
    Pinv {
        a: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Route::Blocks)]
        route: Route,
    },
    /// Drazin inverse and index.
    Drazin {
        a: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Group inverse.
    Group {
        a: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Invertible W with A * W * A = A.
    Witness {
        a: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Check previously written factors or inverses against their input.
    Verify {
        #[arg(long, value_enum)]
        kind: VerifyKind,
        #[arg(required = true)]
        factors: Vec<PathBuf>,
        #[arg(long)]
        input: PathBuf,
    },
    /// Write a seeded random tensor.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, num_args = 3, value_names = ["M", "N", "P"], required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = Kind::Dense)]
        kind: Kind,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Svd,
    Blocks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyKind {
    Tsvd,
    Tschur,
    Tjordan,
    Idem,
    Pinv,
    Drazin,
    Group,
}

struct Outcome {
    report: ResidualReport,
    notes: Vec<String>,
}

impl From<ResidualReport> for Outcome {
    fn from(report: ResidualReport) -> Self {
        Outcome { report, notes: Vec::new() }
    }
}

fn write_opt(path: &Option<PathBuf>, t: &Tensor3) -> Result<()> {
    match path {
        Some(p) => write_tensor(p, t),
        None => Ok(()),
    }
}

fn write_factors(prefix: &Option<String>, parts: &[(&str, &Tensor3)]) -> Result<()> {
    if let Some(prefix) = prefix {
        for (name, t) in parts {
            write_tensor(format!("{prefix}{name}.tns"), t)?;
        }
    }
    Ok(())
}

fn expect_factors(kind: VerifyKind, factors: &[PathBuf], count: usize) -> Result<Vec<Tensor3>> {
    if factors.len() != count {
        return Err(Error::Dimension(format!(
            "verify --kind {kind:?} expects {count} factor files, got {}",
            factors.len()
        )));
    }
    factors.iter().map(read_tensor).collect()
}

fn verify(kind: VerifyKind, factors: &[PathBuf], input: &Path, tol: &Tolerances) -> Result<ResidualReport> {
    let start = Instant::now();
    let a = read_tensor(input)?;
    let (m, n, p) = a.dims();
    let scale = a.max_abs();
    let id = |k| Tensor3::identity(k, p);
    let mut r = ResidualReport::new(format!("verify_{kind:?}").to_lowercase());
    match kind {
        VerifyKind::Tsvd => {
            let f = expect_factors(kind, factors, 3)?;
            let (u, s, v) = (&f[0], &f[1], &f[2]);
            r.check("reconstruction", u.tprod(s)?.tprod(&v.transpose())?.max_abs_diff(&a), tol.rec(scale, p));
            r.check("orthogonality_u", structure::orthogonality_residual(u), tol.orth(m, p));
            r.check("orthogonality_v", structure::orthogonality_residual(v), tol.orth(n, p));
            r.check("f_diagonal", structure::off_diagonal(s), tol.structure(scale, p));
        }
        VerifyKind::Tschur => {
            let f = expect_factors(kind, factors, 2)?;
            let (u, t) = (&f[0], &f[1]);
            r.check("reconstruction", u.tprod(t)?.tprod(&u.transpose())?.max_abs_diff(&a), tol.rec(scale, p));
            r.check("orthogonality_u", structure::orthogonality_residual(u), tol.orth(n, p));
            let band = tol.structure(t.max_abs(), p);
            let below = match structure::quasi_triangular_partition(t, band) {
                Some(part) => structure::below_partition(t, &part),
                None => f64::INFINITY,
            };
            r.check("quasi_triangular", below, band);
        }
        VerifyKind::Tjordan => {
            if !(2..=3).contains(&factors.len()) {
                return Err(Error::Dimension("verify --kind tjordan expects P J [Pinv]".into()));
            }
            let f: Vec<Tensor3> = factors.iter().map(read_tensor).collect::<Result<_>>()?;
            let p_inv = match f.get(2) {
                Some(x) => x.clone(),
                None => t_inverse_with(&f[0], tol)?.x,
            };
            let cond = f[0].max_abs() * p_inv.max_abs() * (n * p) as f64;
            let rec = f[0].tprod(&f[1])?.tprod(&p_inv)?.max_abs_diff(&a);
            r.check("reconstruction", rec, tol.jrec(scale, p, cond));
            r.check("p_inverse", f[0].tprod(&p_inv)?.max_abs_diff(&id(n)), tol.jrec(0.0, p, cond));
            let band = tol.structure(f[1].max_abs(), p);
            let outside = match structure::block_bidiagonal_partition(&f[1], band) {
                Some(part) => structure::outside_bidiagonal(&f[1], &part),
                None => f64::INFINITY,
            };
            r.check("block_bidiagonal", outside, band);
        }
        VerifyKind::Idem => {
            let f = expect_factors(kind, factors, 3)?;
            let (u, e, v) = (&f[0], &f[1], &f[2]);
            r.check("idempotent", e.tprod(e)?.max_abs_diff(e), tol.rec(e.max_abs(), p));
            r.check("reconstruction", u.tprod(e)?.tprod(v)?.max_abs_diff(&a), tol.rec(scale, p));
            // both factors must pass their own inverse checks
            for (name, x) in [("u_invertible", u), ("v_invertible", v)] {
                let inv = t_inverse_with(x, tol)?;
                r.check(name, inv.report.max_residual(), tol.gi(x.max_abs().max(inv.x.max_abs()), p));
            }
        }
        VerifyKind::Pinv => {
            let f = expect_factors(kind, factors, 1)?;
            r.merge(&penrose_report(&a, &f[0], tol, "pinv")?);
        }
        VerifyKind::Drazin => {
            let f = expect_factors(kind, factors, 1)?;
            let index = t_drazin_with(&a, tol)?.index;
            r.merge(&drazin_report(&a, &f[0], index, tol, "drazin")?);
        }
        VerifyKind::Group => {
            let f = expect_factors(kind, factors, 1)?;
            r.merge(&group_report(&a, &f[0], tol)?);
        }
    }
    Ok(r.timed(start))
}

fn execute(cmd: &Command, tol: &Tolerances) -> Result<Outcome> {
    Ok(match cmd {
        Command::Tprod { a, b, out } => {
            let start = Instant::now();
            let (a, b) = (read_tensor(a)?, read_tensor(b)?);
            let direct = a.tprod_direct(&b)?;
            let fourier = a.tprod_fourier(&b)?;
            let scale = a.max_abs() * b.max_abs() * a.cols() as f64;
            let mut r = ResidualReport::new("tprod");
            r.check("dual_path", direct.max_abs_diff(&fourier), tol.rec(scale, a.slices()));
            write_opt(out, &direct)?;
            r.timed(start).into()
        }
        Command::Tsvd { a, out_prefix } => {
            let f = t_svd_with(&read_tensor(a)?, tol)?;
            write_factors(out_prefix, &[("U", &f.u), ("S", &f.s), ("V", &f.v)])?;
            f.report.into()
        }
        Command::Tschur { a, out_prefix } => {
            let f = t_schur_with(&read_tensor(a)?, tol)?;
            write_factors(out_prefix, &[("U", &f.u), ("T", &f.t)])?;
            Outcome {
                report: f.report,
                notes: vec![format!("partition: {:?}", f.realized_partition)],
            }
        }
        Command::Tjordan { a, out_prefix } => {
            let f = t_jordan_with(&read_tensor(a)?, tol)?;
            write_factors(out_prefix, &[("P", &f.p), ("J", &f.j), ("Pinv", &f.p_inv)])?;
            Outcome {
                report: f.report,
                notes: vec![format!("partition: {:?}", f.realized_partition), format!("cond: {:.3e}", f.cond)],
            }
        }
        Command::Idem { a, out_prefix } => {
            let f = idempotent_factorization_with(&read_tensor(a)?, tol)?;
            write_factors(out_prefix, &[("U", &f.u), ("E", &f.e), ("V", &f.v)])?;
            Outcome {
                report: f.report,
                notes: vec![format!("block ranks: {:?}", f.ranks)],
            }
        }
        Command::Tinv { a, out } => {
            let x = t_inverse_with(&read_tensor(a)?, tol)?;
            write_opt(out, &x.x)?;
            x.report.into()
        }
        Command::Pinv { a, out, route } => {
            let a = read_tensor(a)?;
            let x = match route {
                Route::Svd => t_pinv_svd_with(&a, tol)?,
                Route::Blocks => t_pinv_blocks_with(&a, tol)?,
            };
            write_opt(out, &x.x)?;
            x.report.into()
        }
        Command::Drazin { a, out } => {
            let d = t_drazin_with(&read_tensor(a)?, tol)?;
            write_opt(out, &d.ad)?;
            Outcome {
                report: d.report,
                notes: vec![format!("index: {}", d.index)],
            }
        }
        Command::Group { a, out } => {
            let x = t_group_with(&read_tensor(a)?, tol)?;
            write_opt(out, &x.x)?;
            x.report.into()
        }
        Command::Witness { a, out } => {
            let w = unit_regular_witness_with(&read_tensor(a)?, tol)?;
            write_opt(out, &w.w)?;
            w.report.into()
        }
        Command::Verify { kind, factors, input } => verify(*kind, factors, input, tol)?.into(),
        Command::Gen { seed, dims, kind, out } => {
            let start = Instant::now();
            let t = gen(*seed, dims[0], dims[1], dims[2], *kind)?;
            write_tensor(out, &t)?;
            let back = read_tensor(out)?;
            let mut r = ResidualReport::new("gen");
            r.check("round_trip", back.max_abs_diff(&t), 0.0);
            if *kind == Kind::TSymmetric {
                r.check("t_symmetric", structure::t_symmetry_residual(&back), 0.0);
            }
            r.timed(start).into()
        }
    })
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let tol = Tolerances {
        uniform: cli.tol,
        rtol: None,
    };
    let outcome = match execute(&cli.command, &tol) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_mathematical() { EXIT_MATH } else { EXIT_USAGE };
        }
    };
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, outcome.report.to_json()) {
            eprintln!("error: cannot write report {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    if !cli.quiet {
        print!("{}", outcome.report);
        for note in &outcome.notes {
            println!("{note}");
        }
    }
    if outcome.report.pass {
        EXIT_OK
    } else {
        eprintln!("error: {} failed verification", outcome.report.operation);
        EXIT_VERIFY
    }
}
