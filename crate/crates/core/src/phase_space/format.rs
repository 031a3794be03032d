//! Plain-text covariance format: a first line with the mode count `n`, then
//! `2n` rows of `2n` whitespace-separated numbers in `(q.., p..)` order.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Parses the text format without validating symmetry or physicality.
pub fn parse_covariance_text(text: &str) -> Result<DMatrix<f64>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .enumerate()
        .filter(|(_, l)| !l.is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty covariance file".into()))?;
    let n: usize = header
        .parse()
        .map_err(|_| Error::Parse(format!("first line must be the mode count, got {header:?}")))?;
    if n == 0 {
        return Err(Error::Parse("mode count must be positive".into()));
    }
    let dim = 2 * n;
    let mut data = Vec::with_capacity(dim * dim);
    let mut rows = 0;
    for (lineno, line) in lines {
        if rows == dim {
            return Err(Error::Parse(format!(
                "line {}: expected {dim} rows, found more",
                lineno + 1
            )));
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {tok:?}", lineno + 1)))
            })
            .collect::<Result<_>>()?;
        if row.len() != dim {
            return Err(Error::Parse(format!(
                "line {}: expected {dim} entries, found {}",
                lineno + 1,
                row.len()
            )));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse(format!("line {}: non-finite entry", lineno + 1)));
        }
        data.extend(row);
        rows += 1;
    }
    if rows != dim {
        return Err(Error::Parse(format!("expected {dim} rows, found {rows}")));
    }
    Ok(DMatrix::from_row_slice(dim, dim, &data))
}

/// Inverse of [`parse_covariance_text`]; numbers use the shortest
/// representation that round-trips.
pub fn write_covariance_text(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", m.nrows() / 2);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
