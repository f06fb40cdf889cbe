//! Sparse binary parity-check matrix with row and column adjacency.

use crate::error::{Error, Result};

/// An `M x N` parity-check matrix over GF(2), stored as per-check variable
/// lists and per-variable check lists.
///
/// Edges are numbered in row-major order: the edges of check `m` occupy
/// `row_offsets[m]..row_offsets[m + 1]`. Message arrays in the decoder are
/// indexed by this edge number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseParityCheckMatrix {
    n_vars: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
    row_offsets: Vec<usize>,
    col_edges: Vec<Vec<usize>>,
}

impl SparseParityCheckMatrix {
    /// Builds a matrix from the variable lists of each check. Lists are sorted;
    /// duplicate or out-of-range indices are rejected.
    pub fn from_rows(n_vars: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut rows = rows;
        for (m, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if let Some(&bad) = row.iter().find(|&&n| n >= n_vars) {
                return Err(Error::InvalidParameter(format!(
                    "check {m} references variable {bad}, but there are only {n_vars} variables"
                )));
            }
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "check {m} lists a variable twice"
                )));
            }
        }

        let mut cols = vec![Vec::new(); n_vars];
        let mut col_edges = vec![Vec::new(); n_vars];
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut edge = 0;
        for (m, row) in rows.iter().enumerate() {
            row_offsets.push(edge);
            for &n in row {
                cols[n].push(m);
                col_edges[n].push(edge);
                edge += 1;
            }
        }
        row_offsets.push(edge);

        Ok(Self {
            n_vars,
            rows,
            cols,
            row_offsets,
            col_edges,
        })
    }

    /// Builds a matrix from a dense 0/1 row-major description.
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let n_vars = dense.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(dense.len());
        for row in dense {
            if row.len() != n_vars {
                return Err(Error::mismatch("dense row length", n_vars, row.len()));
            }
            rows.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(n, _)| n)
                    .collect(),
            );
        }
        Self::from_rows(n_vars, rows)
    }

    /// The (7,4) Hamming code, columns ordered 1..=7 in binary.
    pub fn hamming_7_4() -> Self {
        Self::from_dense(&[
            vec![1, 0, 1, 0, 1, 0, 1],
            vec![0, 1, 1, 0, 0, 1, 1],
            vec![0, 0, 0, 1, 1, 1, 1],
        ])
        .expect("static matrix is valid")
    }

    /// Codeword length `N`.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Number of parity checks `M`.
    pub fn n_checks(&self) -> usize {
        self.rows.len()
    }

    pub fn n_edges(&self) -> usize {
        *self.row_offsets.last().unwrap_or(&0)
    }

    /// Design rate `1 - M/N`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.n_checks() as f64 / self.n_vars as f64
    }

    /// Variables checked by check `m`.
    pub fn row(&self, m: usize) -> &[usize] {
        &self.rows[m]
    }

    /// Checks that involve variable `n`.
    pub fn col(&self, n: usize) -> &[usize] {
        &self.cols[n]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    /// Edge ids of check `m`, aligned with [`row`](Self::row).
    pub fn row_edges(&self, m: usize) -> std::ops::Range<usize> {
        self.row_offsets[m]..self.row_offsets[m + 1]
    }

    /// Edge ids of variable `n`, aligned with [`col`](Self::col).
    pub fn col_edges(&self, n: usize) -> &[usize] {
        &self.col_edges[n]
    }

    pub fn max_row_weight(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_col_weight(&self) -> usize {
        self.cols.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Parity of `bits` over every check. All-zero iff `bits` is a codeword.
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.n_vars {
            return Err(Error::mismatch("syndrome input", self.n_vars, bits.len()));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &n| acc ^ (bits[n] & 1)))
            .collect())
    }

    /// Number of unsatisfied checks.
    pub fn syndrome_weight(&self, bits: &[u8]) -> Result<usize> {
        Ok(self.syndrome(bits)?.iter().filter(|&&s| s != 0).count())
    }

    pub fn is_codeword(&self, bits: &[u8]) -> Result<bool> {
        Ok(self.syndrome_weight(bits)? == 0)
    }

    /// Returns a copy whose column `j` is column `order[j]` of `self`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_vars {
            return Err(Error::mismatch("column permutation", self.n_vars, order.len()));
        }
        let mut new_pos = vec![usize::MAX; self.n_vars];
        for (j, &old) in order.iter().enumerate() {
            if old >= self.n_vars || new_pos[old] != usize::MAX {
                return Err(Error::InvalidParameter(
                    "column order is not a permutation".into(),
                ));
            }
            new_pos[old] = j;
        }
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&n| new_pos[n]).collect())
            .collect();
        Self::from_rows(self.n_vars, rows)
    }

    /// True if two columns share more than one check, i.e. the Tanner graph
    /// has girth 4.
    pub fn has_four_cycle(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for row in &self.rows {
            for (i, &a) in row.iter().enumerate() {
                for &b in &row[i + 1..] {
                    if !seen.insert((a, b)) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_cols_are_transposes() {
        let h = SparseParityCheckMatrix::hamming_7_4();
        for m in 0..h.n_checks() {
            for &n in h.row(m) {
                assert!(h.col(n).contains(&m));
            }
        }
        for n in 0..h.n_vars() {
            for (&m, &e) in h.col(n).iter().zip(h.col_edges(n)) {
                assert!(h.row_edges(m).contains(&e));
                assert_eq!(h.row(m)[e - h.row_edges(m).start], n);
            }
        }
        assert_eq!(h.n_edges(), 12);
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(SparseParityCheckMatrix::from_rows(3, vec![vec![0, 3]]).is_err());
        assert!(SparseParityCheckMatrix::from_rows(3, vec![vec![1, 1]]).is_err());
    }

    #[test]
    fn syndrome_of_zero_word_is_zero() {
        let h = SparseParityCheckMatrix::hamming_7_4();
        assert_eq!(h.syndrome(&[0; 7]).unwrap(), vec![0, 0, 0]);
        assert!(h.syndrome(&[0; 6]).is_err());
    }

    #[test]
    fn single_flip_lights_up_its_checks() {
        let h = SparseParityCheckMatrix::hamming_7_4();
        let codeword = [1, 1, 1, 0, 0, 0, 0];
        assert!(h.is_codeword(&codeword).unwrap());
        for n in 0..7 {
            let mut word = codeword;
            word[n] ^= 1;
            let s = h.syndrome(&word).unwrap();
            for m in 0..3 {
                assert_eq!(s[m] == 1, h.col(n).contains(&m));
            }
        }
    }

    #[test]
    fn hamming_has_four_cycles() {
        assert!(SparseParityCheckMatrix::hamming_7_4().has_four_cycle());
        let h = SparseParityCheckMatrix::from_rows(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]])
            .unwrap();
        assert!(!h.has_four_cycle());
    }

    #[test]
    fn permutation_round_trip() {
        let h = SparseParityCheckMatrix::hamming_7_4();
        let order = [6, 5, 4, 3, 2, 1, 0];
        let p = h.permute_columns(&order).unwrap();
        assert_eq!(p.permute_columns(&order).unwrap(), h);
        assert!(h.permute_columns(&[0, 0, 1, 2, 3, 4, 5]).is_err());
    }
}
