//! Plain-text tensor files.
//!
//! ```text
//! # optional comments
//! 2 2 2
//! 1 0
//! 0 1
//!
//! 0 1
//! 1 0
//! ```
//!
//! The header holds `m n p`; the body holds `p` slices of `m` rows with `n`
//! numbers each, slices separated by a blank line. Values are written with
//! 17 significant digits so a write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub fn parse_tensor(text: &str) -> Result<Tensor3> {
    let mut header: Option<(usize, usize, usize)> = None;
    // groups of (line number, tokens) separated by blank lines
    let mut groups: Vec<Vec<(usize, Vec<(usize, &str)>)>> = vec![Vec::new()];
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end();
        if line.trim_start().starts_with('#') {
            continue;
        }
        let toks = tokens(line);
        let Some(dims) = header else {
            if toks.is_empty() {
                continue;
            }
            if toks.len() != 3 {
                return Err(parse_err(lineno, 1, format!("header must be `m n p`, found {} fields", toks.len())));
            }
            let mut d = [0usize; 3];
            for (slot, (col, tok)) in d.iter_mut().zip(&toks) {
                *slot = tok
                    .parse()
                    .map_err(|_| parse_err(lineno, *col, format!("expected a dimension, found `{tok}`")))?;
                if *slot == 0 {
                    return Err(parse_err(lineno, *col, "dimensions must be positive"));
                }
            }
            header = Some((d[0], d[1], d[2]));
            continue;
        };
        if toks.is_empty() {
            if !groups.last().is_some_and(|g| g.is_empty()) {
                groups.push(Vec::new());
            }
            continue;
        }
        if toks.len() != dims.1 {
            return Err(Error::dim(format!("line {lineno}: expected {} values, found {}", dims.1, toks.len())));
        }
        groups.last_mut().expect("non-empty").push((lineno, toks));
    }
    let (m, n, p) = header.ok_or_else(|| parse_err(1, 1, "missing header"))?;
    groups.retain(|g| !g.is_empty());
    let rows: usize = groups.iter().map(Vec::len).sum();
    if rows != m * p {
        return Err(Error::dim(format!("expected {} rows ({p} slices of {m}), found {rows}", m * p)));
    }
    if groups.len() > 1 && groups.iter().any(|g| g.len() != m) {
        return Err(Error::dim(format!("every slice must have {m} rows")));
    }
    let mut data = Vec::with_capacity(m * n * p);
    for (lineno, toks) in groups.iter().flatten() {
        for (col, tok) in toks {
            let x: f64 = tok
                .parse()
                .map_err(|_| parse_err(*lineno, *col, format!("expected a number, found `{tok}`")))?;
            if !x.is_finite() {
                return Err(parse_err(*lineno, *col, "non-finite value"));
            }
            data.push(x);
        }
    }
    Tensor3::from_vec(m, n, p, data)
}

pub fn format_tensor(t: &Tensor3) -> String {
    let (m, n, p) = t.dims();
    let mut s = format!("{m} {n} {p}\n");
    for k in 0..p {
        if k > 0 {
            s.push('\n');
        }
        for i in 0..m {
            for j in 0..n {
                if j > 0 {
                    s.push(' ');
                }
                write!(s, "{:.16e}", t.get(i, j, k)).expect("write to string");
            }
            s.push('\n');
        }
    }
    s
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    parse_tensor(&fs::read_to_string(path)?)
}

pub fn write_tensor(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    fs::write(path, format_tensor(t))?;
    Ok(())
}
