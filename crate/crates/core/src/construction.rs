//! Pseudo-random regular LDPC codes by progressive edge growth, and a
//! systematic encoder derived by GF(2) elimination.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::SparseParityCheckMatrix;

const MAX_ATTEMPTS: u64 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    pub n: usize,
    pub m: usize,
    pub col_weight: usize,
    pub seed: u64,
    pub target_girth: usize,
}

impl CodeSpec {
    pub fn new(n: usize, m: usize, col_weight: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            col_weight,
            seed,
            target_girth: 6,
        }
    }

    /// The rate-0.906, N=1728 operating point.
    pub fn short_code(seed: u64) -> Self {
        Self::new(1728, 162, 3, seed)
    }

    /// The rate-0.955, N=6912 operating point.
    pub fn long_code(seed: u64) -> Self {
        Self::new(6912, 311, 3, seed)
    }

    pub fn rate(&self) -> f64 {
        1.0 - self.m as f64 / self.n as f64
    }

    /// Smallest and largest admissible row weight.
    pub fn row_weight_bounds(&self) -> (usize, usize) {
        let edges = self.n * self.col_weight;
        (edges / self.m, edges.div_ceil(self.m))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m >= self.n {
            return Err(Error::InvalidParameter(format!(
                "need 0 < M < N, got N={} M={}",
                self.n, self.m
            )));
        }
        if self.col_weight == 0 || self.col_weight > self.m {
            return Err(Error::InvalidParameter(format!(
                "column weight {} must lie in 1..={}",
                self.col_weight, self.m
            )));
        }
        if self.target_girth < 4 || !self.target_girth.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "target girth {} must be even and at least 4",
                self.target_girth
            )));
        }
        Ok(())
    }
}

/// Builds a column-regular matrix with row weights within one of each other
/// and no cycle shorter than `spec.target_girth`.
///
/// Edges are placed one variable at a time. Each edge goes to a check that is
/// far enough from the variable in the current graph, preferring the lowest
/// current degree, then the greatest distance, then a seeded random choice.
/// Dead ends restart with a derived seed, up to a bounded number of attempts.
pub fn generate_code(spec: &CodeSpec) -> Result<SparseParityCheckMatrix> {
    spec.validate()?;
    let mut seeds = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut last_failure = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let seed = if attempt == 0 { spec.seed } else { seeds.random() };
        match peg_attempt(spec, seed) {
            Ok(h) => return Ok(h),
            Err(why) => last_failure = why,
        }
    }
    Err(Error::Infeasible(format!(
        "no code after {MAX_ATTEMPTS} attempts for N={} M={} J={} girth {}: {last_failure}",
        spec.n, spec.m, spec.col_weight, spec.target_girth
    )))
}

fn peg_attempt(spec: &CodeSpec, seed: u64) -> std::result::Result<SparseParityCheckMatrix, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (min_row, max_row) = spec.row_weight_bounds();
    // Checks within this distance of the variable would close a short cycle.
    let exclude_within = spec.target_girth - 3;
    let horizon = exclude_within + 2;

    let mut var_checks: Vec<Vec<usize>> = vec![Vec::with_capacity(spec.col_weight); spec.n];
    let mut check_vars: Vec<Vec<usize>> = vec![Vec::new(); spec.m];
    let mut dist = vec![usize::MAX; spec.m];
    let mut var_seen = vec![false; spec.n];
    let mut queue = VecDeque::new();
    let mut candidates = Vec::new();

    for v in 0..spec.n {
        for _ in 0..spec.col_weight {
            // Distances (in edges) from v to every check, out to the horizon.
            dist.fill(usize::MAX);
            var_seen.fill(false);
            queue.clear();
            var_seen[v] = true;
            queue.push_back((v, 0usize));
            while let Some((var, d)) = queue.pop_front() {
                if d + 1 > horizon {
                    break;
                }
                for &c in &var_checks[var] {
                    if dist[c] != usize::MAX {
                        continue;
                    }
                    dist[c] = d + 1;
                    for &w in &check_vars[c] {
                        if !var_seen[w] {
                            var_seen[w] = true;
                            queue.push_back((w, d + 2));
                        }
                    }
                }
            }

            candidates.clear();
            let mut best: Option<(usize, std::cmp::Reverse<usize>)> = None;
            for c in 0..spec.m {
                let d = dist[c];
                if (d != usize::MAX && d <= exclude_within) || check_vars[c].len() >= max_row {
                    continue;
                }
                let key = (check_vars[c].len(), std::cmp::Reverse(d));
                match best {
                    Some(b) if key > b => {}
                    Some(b) if key == b => candidates.push(c),
                    _ => {
                        best = Some(key);
                        candidates.clear();
                        candidates.push(c);
                    }
                }
            }
            let &c = candidates
                .choose(&mut rng)
                .ok_or_else(|| format!("no admissible check for variable {v}"))?;
            var_checks[v].push(c);
            check_vars[c].push(v);
        }
    }

    if let Some(c) = check_vars.iter().position(|vars| vars.len() < min_row) {
        return Err(format!("check {c} ended below row weight {min_row}"));
    }
    SparseParityCheckMatrix::from_rows(spec.n, check_vars).map_err(|e| e.to_string())
}

/// Dense GF(2) rows packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitRows {
    words: usize,
    data: Vec<u64>,
}

impl BitRows {
    fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self {
            words,
            data: vec![0; rows * words],
        }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] |= 1 << (c % 64);
    }

    fn xor_into(&mut self, src: usize, dst: usize) {
        for w in 0..self.words {
            let x = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= x;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.words {
                self.data.swap(a * self.words + w, b * self.words + w);
            }
        }
    }
}

/// Maps systematic bits to parity bits for a matrix laid out as
/// `[systematic | parity]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicEncoder {
    n: usize,
    m: usize,
    /// Column `j` of the systematic layout is column `column_order[j]` of the
    /// matrix the encoder was derived from.
    column_order: Vec<usize>,
    /// Row `i` selects the systematic bits whose XOR is parity bit `i`.
    parity_rows: BitRows,
}

impl SystematicEncoder {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of systematic bits `N - M`.
    pub fn k(&self) -> usize {
        self.n - self.m
    }

    pub fn column_order(&self) -> &[usize] {
        &self.column_order
    }

    /// `h` with its columns rearranged into the encoder's layout.
    pub fn systematic_matrix(&self, h: &SparseParityCheckMatrix) -> Result<SparseParityCheckMatrix> {
        h.permute_columns(&self.column_order)
    }

    /// Parity bits for `systematic`.
    pub fn parity(&self, systematic: &[u8]) -> Result<Vec<u8>> {
        let k = self.k();
        if systematic.len() != k {
            return Err(Error::mismatch("systematic bits", k, systematic.len()));
        }
        let mut packed = vec![0u64; k.div_ceil(64)];
        for (i, &b) in systematic.iter().enumerate() {
            packed[i / 64] |= u64::from(b & 1) << (i % 64);
        }
        Ok((0..self.m)
            .map(|r| {
                let ones: u32 = self
                    .parity_rows
                    .row(r)
                    .iter()
                    .zip(&packed)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (ones & 1) as u8
            })
            .collect())
    }

    /// Codeword `[systematic | parity]` in the systematic layout.
    pub fn encode(&self, systematic: &[u8]) -> Result<Vec<u8>> {
        let mut word = systematic.to_vec();
        word.extend(self.parity(systematic)?);
        Ok(word)
    }

    /// Plain-text description for storing next to an alist file.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# systematic layout: [systematic | parity]");
        let _ = writeln!(out, "n {}", self.n);
        let _ = writeln!(out, "m {}", self.m);
        let order: Vec<String> = self.column_order.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "column_order {}", order.join(" "));
        out
    }
}

/// Gaussian elimination over GF(2), picking pivot columns from the right so
/// that parity positions land at the end of the codeword.
pub fn derive_systematic_encoder(h: &SparseParityCheckMatrix) -> Result<SystematicEncoder> {
    let (n, m) = (h.n_vars(), h.n_checks());
    let mut dense = BitRows::zeros(m, n);
    for (r, row) in h.rows().iter().enumerate() {
        for &c in row {
            dense.set(r, c);
        }
    }

    let mut pivots = Vec::with_capacity(m);
    let mut rank = 0;
    for col in (0..n).rev() {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&r| dense.get(r, col)) else {
            continue;
        };
        dense.swap(p, rank);
        for r in 0..m {
            if r != rank && dense.get(r, col) {
                dense.xor_into(rank, r);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rank < m {
        return Err(Error::RankDeficient { rank, checks: m });
    }

    // Row i of `dense` now has its pivot at pivots[i]. Lay parity columns out
    // in ascending order so an already-systematic matrix keeps its order.
    let mut parity_cols: Vec<(usize, usize)> = pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
    parity_cols.sort_unstable();
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let systematic_cols: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let k = n - m;

    let mut parity_rows = BitRows::zeros(m, k);
    for (i, &(_, r)) in parity_cols.iter().enumerate() {
        for (j, &c) in systematic_cols.iter().enumerate() {
            if dense.get(r, c) {
                parity_rows.set(i, j);
            }
        }
    }

    let mut column_order = systematic_cols;
    column_order.extend(parity_cols.iter().map(|&(c, _)| c));
    Ok(SystematicEncoder {
        n,
        m,
        column_order,
        parity_rows,
    })
}

/// Encodes `systematic_bits` into a codeword of the encoder's layout.
pub fn ldpc_encode(encoder: &SystematicEncoder, systematic_bits: &[u8]) -> Result<Vec<u8>> {
    encoder.encode(systematic_bits)
}

/// A parity-check matrix in systematic layout together with its encoder.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    pub h: SparseParityCheckMatrix,
    pub encoder: SystematicEncoder,
}

impl LdpcCode {
    /// Rearranges `h` into systematic layout and derives its encoder.
    pub fn from_matrix(h: &SparseParityCheckMatrix) -> Result<Self> {
        let raw = derive_systematic_encoder(h)?;
        let h = raw.systematic_matrix(h)?;
        let mut encoder = derive_systematic_encoder(&h)?;
        encoder.column_order = raw.column_order;
        Ok(Self { h, encoder })
    }

    /// Generates codes from `spec`, moving to the next seed while the matrix
    /// is rank deficient. Returns the code and the seed that produced it.
    pub fn generate(spec: &CodeSpec) -> Result<(Self, u64)> {
        let mut last = None;
        for offset in 0..MAX_ATTEMPTS {
            let seed = spec.seed.wrapping_add(offset);
            let h = generate_code(&CodeSpec { seed, ..spec.clone() })?;
            match Self::from_matrix(&h) {
                Ok(code) => return Ok((code, seed)),
                Err(e @ Error::RankDeficient { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap_or_else(|| Error::Infeasible("no full-rank code".into())))
    }

    pub fn n(&self) -> usize {
        self.h.n_vars()
    }

    pub fn k(&self) -> usize {
        self.encoder.k()
    }

    pub fn m(&self) -> usize {
        self.h.n_checks()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_code_is_regular_and_girth_six() {
        let spec = CodeSpec::new(96, 48, 3, 7);
        let h = generate_code(&spec).unwrap();
        assert!(h.cols().iter().all(|c| c.len() == 3));
        let (lo, hi) = spec.row_weight_bounds();
        assert!(h.rows().iter().all(|r| (lo..=hi).contains(&r.len())));
        assert!(!h.has_four_cycle());
    }

    #[test]
    fn same_seed_same_code() {
        let spec = CodeSpec::new(120, 60, 3, 42);
        assert_eq!(generate_code(&spec).unwrap(), generate_code(&spec).unwrap());
        let other = CodeSpec { seed: 43, ..spec.clone() };
        assert_ne!(generate_code(&spec).unwrap(), generate_code(&other).unwrap());
    }

    #[test]
    fn infeasible_girth_is_reported() {
        let spec = CodeSpec { target_girth: 12, ..CodeSpec::new(40, 20, 3, 1) };
        assert!(matches!(generate_code(&spec), Err(Error::Infeasible(_))));
        assert!(generate_code(&CodeSpec::new(10, 10, 3, 1)).is_err());
        assert!(generate_code(&CodeSpec { target_girth: 5, ..CodeSpec::new(10, 5, 3, 1) }).is_err());
    }

    #[test]
    fn hamming_encoder_matches_codebook() {
        let h = SparseParityCheckMatrix::hamming_7_4();
        let code = LdpcCode::from_matrix(&h).unwrap();
        assert_eq!(code.k(), 4);
        let mut words = std::collections::HashSet::new();
        for s in 0u8..16 {
            let bits: Vec<u8> = (0..4).map(|i| s >> i & 1).collect();
            let c = ldpc_encode(&code.encoder, &bits).unwrap();
            assert_eq!(&c[..4], &bits[..]);
            assert!(code.h.is_codeword(&c).unwrap());
            // Undo the column permutation and check against the original H.
            let mut original = vec![0u8; 7];
            for (j, &col) in code.encoder.column_order().iter().enumerate() {
                original[col] = c[j];
            }
            assert!(h.is_codeword(&original).unwrap());
            words.insert(original);
        }
        // All 16 codewords of the original code are reached.
        let codebook: std::collections::HashSet<Vec<u8>> = (0u8..128)
            .map(|x| (0..7).map(|i| x >> i & 1).collect::<Vec<u8>>())
            .filter(|w| h.is_codeword(w).unwrap())
            .collect();
        assert_eq!(words, codebook);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let h = SparseParityCheckMatrix::from_rows(4, vec![vec![0, 1], vec![2, 3], vec![0, 1, 2, 3]])
            .unwrap();
        assert!(matches!(
            derive_systematic_encoder(&h),
            Err(Error::RankDeficient { rank: 2, checks: 3 })
        ));
    }

    #[test]
    fn systematic_layout_is_stable() {
        let (code, _) = LdpcCode::generate(&CodeSpec::new(60, 30, 3, 3)).unwrap();
        let again = derive_systematic_encoder(&code.h).unwrap();
        assert_eq!(again.column_order(), (0..60).collect::<Vec<_>>());
        let zero = ldpc_encode(&code.encoder, &vec![0; code.k()]).unwrap();
        assert!(zero.iter().all(|&b| b == 0));
    }
}
