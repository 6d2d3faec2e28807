//! Plain-text matrix files.
//!
//! ```text
//! dim 2
//! 2 1
//! 1 2
//! ```
//!
//! The first non-comment line is `dim n`; it is followed by `n` rows of `n`
//! whitespace-separated decimal entries. Lines starting with `#` are
//! ignored. The symmetric part `(M + Mᵀ)/2` is taken on load.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::{symmetrize, HermitianMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn parse_matrix<R: Real>(text: &str) -> Result<HermitianMatrix<R>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let mut head = header.split_whitespace();
    let dim = match (head.next(), head.next(), head.next()) {
        (Some("dim"), Some(n), None) => n
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad dimension `{n}`")))?,
        _ => return Err(Error::Parse(format!("expected `dim n`, found `{header}`"))),
    };
    if dim == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    let mut values = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing row {}", row + 1)))?;
        let before = values.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad entry `{tok}` in row {}", row + 1)))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("non-finite entry in row {}", row + 1)));
            }
            values.push(R::lit(v));
        }
        if values.len() - before != dim {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {dim}",
                row + 1,
                values.len() - before
            )));
        }
    }
    if let Some(extra) = lines.next() {
        return Err(Error::Parse(format!("trailing content `{extra}`")));
    }
    let m = DMatrix::from_row_slice(dim, dim, &values);
    Ok(HermitianMatrix::from_entries(symmetrize(&m)))
}

pub fn read_matrix_file<R: Real>(path: impl AsRef<Path>) -> Result<HermitianMatrix<R>> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

/// Formats a real matrix in the file format, one row per line, using the
/// shortest representation that round-trips each entry.
pub fn format_matrix<R: Real>(m: &HermitianMatrix<R>) -> String {
    let n = m.dim();
    let mut out = format!("dim {n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let v = m.entries()[(i, j)].as_f64();
                // print -0 as 0
                format!("{}", if v == 0.0 { 0.0 } else { v })
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
