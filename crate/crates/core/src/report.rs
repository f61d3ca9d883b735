//! Residual reports and the tolerance policy shared by every operation.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Named residuals of an operation's defining identities.
///
/// `pass` is true iff every check passes. Serialized as
/// `{operation, checks: [{name, residual, tolerance, pass}], pass, seconds}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub operation: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub seconds: f64,
}

impl ResidualReport {
    pub fn new(operation: impl Into<String>) -> Self {
        ResidualReport {
            operation: operation.into(),
            checks: Vec::new(),
            pass: true,
            seconds: 0.0,
        }
    }

    /// Record a check. NaN residuals fail.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) -> &mut Self {
        let residual = residual.abs();
        let pass = residual <= tolerance;
        self.pass &= pass;
        self.checks.push(Check {
            name: name.into(),
            residual,
            tolerance,
            pass,
        });
        self
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.get(name).map(|c| c.residual)
    }

    /// Largest residual over all checks.
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn merge(&mut self, other: &ResidualReport) {
        for c in &other.checks {
            self.check(c.name.clone(), c.residual, c.tolerance);
        }
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.seconds = start.elapsed().as_secs_f64();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({:.3} ms)",
            self.operation,
            if self.pass { "PASS" } else { "FAIL" },
            self.seconds * 1e3
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<28} {:>11.3e} <= {:>10.3e}  {}",
                c.name,
                c.residual,
                c.tolerance,
                if c.pass { "ok" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// Default tolerances, each a function of the data scale `max|a|`, the
/// slice size and the slice count. `uniform` replaces all of them.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tolerances {
    pub uniform: Option<f64>,
    /// Relative singular-value cutoff for rank decisions; `None` selects the
    /// kernel default.
    pub rtol: Option<f64>,
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            uniform: Some(tol),
            rtol: None,
        }
    }

    /// Reconstruction: `1e-10 (1 + scale) p`.
    pub fn rec(&self, scale: f64, p: usize) -> f64 {
        self.uniform.unwrap_or(1e-10 * (1.0 + scale) * p as f64)
    }

    /// Orthogonality: `1e-10 n p`.
    pub fn orth(&self, n: usize, p: usize) -> f64 {
        self.uniform.unwrap_or(1e-10 * n.max(1) as f64 * p as f64)
    }

    /// Jordan reconstruction, additionally scaled by the condition estimate.
    pub fn jrec(&self, scale: f64, p: usize, cond: f64) -> f64 {
        self.uniform.unwrap_or(1e-10 * (1.0 + scale) * p as f64 * cond.max(1.0))
    }

    /// Generalized-inverse identities: `1e-9 (1 + scale)^2 p`.
    pub fn gi(&self, scale: f64, p: usize) -> f64 {
        self.uniform.unwrap_or(1e-9 * (1.0 + scale).powi(2) * p as f64)
    }

    /// Structural predicates (zero patterns) on factors of size `scale`.
    pub fn structure(&self, scale: f64, p: usize) -> f64 {
        self.uniform.unwrap_or(1e-10 * (1.0 + scale) * p as f64)
    }

    /// Pairing: `1e-10 (1 + max|block entry|)`.
    pub fn pair(&self, block_scale: f64) -> f64 {
        self.uniform.unwrap_or(1e-10 * (1.0 + block_scale))
    }

    /// Realness of an inverse transform: `1e-9 (1 + max|block entry|) p`.
    pub fn real(&self, block_scale: f64, p: usize) -> f64 {
        self.uniform.unwrap_or(1e-9 * (1.0 + block_scale) * p as f64)
    }
}
