//! Reading and writing parity-check matrices in the alist text format.
//!
//! ```text
//! N M
//! max_col_weight max_row_weight
//! col weights (N values)
//! row weights (M values)
//! N lines of 1-based check indices, one line per column
//! M lines of 1-based variable indices, one line per row
//! ```
//!
//! Index lines may be padded with zeros up to the maximum weight.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SparseParityCheckMatrix;

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (idx, line) in self.inner.by_ref() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let numbers = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| Error::parse(idx + 1, format!("bad integer {tok:?} in {what}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, numbers));
        }
        Err(Error::parse(0, format!("unexpected end of file while reading {what}")))
    }
}

/// Parses an alist document.
pub fn parse_alist(text: &str) -> Result<SparseParityCheckMatrix> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };

    let (line, dims) = lines.next_numbers("header")?;
    let [n, m] = dims[..] else {
        return Err(Error::parse(line, "header must be \"N M\""));
    };
    let (line, maxes) = lines.next_numbers("maximum weights")?;
    if maxes.len() != 2 {
        return Err(Error::parse(line, "expected two maximum weights"));
    }
    let (line, col_weights) = lines.next_numbers("column weights")?;
    if col_weights.len() != n {
        return Err(Error::parse(line, format!("expected {n} column weights")));
    }
    let (line, row_weights) = lines.next_numbers("row weights")?;
    if row_weights.len() != m {
        return Err(Error::parse(line, format!("expected {m} row weights")));
    }

    let mut cols = Vec::with_capacity(n);
    for (j, &w) in col_weights.iter().enumerate() {
        let (line, entries) = lines.next_numbers("column list")?;
        cols.push((line, one_based(line, &entries, w, m, j)?));
    }
    let mut rows = Vec::with_capacity(m);
    for (i, &w) in row_weights.iter().enumerate() {
        let (line, entries) = lines.next_numbers("row list")?;
        rows.push(one_based(line, &entries, w, n, i)?);
    }

    let h = SparseParityCheckMatrix::from_rows(n, rows)?;
    for (j, (line, mut col)) in cols.into_iter().enumerate() {
        col.sort_unstable();
        if col != h.col(j) {
            return Err(Error::parse(
                line,
                format!("column {} disagrees with the row lists", j + 1),
            ));
        }
    }
    Ok(h)
}

fn one_based(
    line: usize,
    entries: &[usize],
    weight: usize,
    bound: usize,
    which: usize,
) -> Result<Vec<usize>> {
    let (used, padding) = entries.split_at(weight.min(entries.len()));
    if used.len() != weight || padding.iter().any(|&x| x != 0) {
        return Err(Error::parse(
            line,
            format!("list {} should hold {weight} nonzero entries", which + 1),
        ));
    }
    used.iter()
        .map(|&x| {
            if x == 0 || x > bound {
                Err(Error::parse(line, format!("index {x} out of range 1..={bound}")))
            } else {
                Ok(x - 1)
            }
        })
        .collect()
}

/// Serializes without zero padding.
pub fn to_alist(h: &SparseParityCheckMatrix) -> String {
    let mut out = String::new();
    let join = |xs: &mut dyn Iterator<Item = usize>| {
        xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "{} {}", h.n_vars(), h.n_checks());
    let _ = writeln!(out, "{} {}", h.max_col_weight(), h.max_row_weight());
    let _ = writeln!(out, "{}", join(&mut h.cols().iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut h.rows().iter().map(Vec::len)));
    for col in h.cols() {
        let _ = writeln!(out, "{}", join(&mut col.iter().map(|m| m + 1)));
    }
    for row in h.rows() {
        let _ = writeln!(out, "{}", join(&mut row.iter().map(|n| n + 1)));
    }
    out
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<SparseParityCheckMatrix> {
    parse_alist(&std::fs::read_to_string(path)?)
}

pub fn write_alist(h: &SparseParityCheckMatrix, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_alist(h))?;
    Ok(())
}
