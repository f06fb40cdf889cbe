//! Rate-2/3 d=1 run-length-limited code and the 1T precoder.
//!
//! The encoder is a finite-state machine taking 2 user bits to 3 differential
//! channel bits. Decoding is sliding-block: each user pair is recovered from
//! its own codeword and a fixed number of following codewords, so a channel
//! error corrupts a bounded number of user pairs.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

pub const INPUT_BITS: usize = 2;
pub const OUTPUT_BITS: usize = 3;
const INPUTS: usize = 1 << INPUT_BITS;
const MAX_ANTICIPATION: usize = 4;
const MAX_RUN: usize = 64;

/// The embedded 4-state (d=1, k=7) table.
pub const DEFAULT_TABLE: &str = include_str!("../data/rll_d1k7_4state.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RllEdge {
    pub next: usize,
    pub output: [u8; OUTPUT_BITS],
}

/// A rate-2/3 RLL code with its derived sliding-block decoder.
#[derive(Debug, Clone)]
pub struct RllCode {
    edges: Vec<[RllEdge; INPUTS]>,
    d: usize,
    k: usize,
    anticipation: usize,
    windows: HashMap<u32, u8>,
}

impl Default for RllCode {
    fn default() -> Self {
        Self::from_table(DEFAULT_TABLE).expect("embedded RLL table is valid")
    }
}

impl RllCode {
    /// Parses a table of `state input next output` lines (`#` starts a
    /// comment), e.g. `0 01 1 000`. Every `(state, input)` pair must appear
    /// exactly once and the state machine must start in state 0.
    pub fn from_table(text: &str) -> Result<Self> {
        let mut entries: HashMap<(usize, usize), (usize, RllEdge)> = HashMap::new();
        let mut n_states = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [state, input, next, output] = fields[..] else {
                return Err(Error::parse(line_no, "expected: state input next output"));
            };
            let state: usize = state
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad state {state:?}")))?;
            let next: usize = next
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad next state {next:?}")))?;
            let input = parse_bits::<INPUT_BITS>(input)
                .ok_or_else(|| Error::parse(line_no, format!("input must be {INPUT_BITS} bits")))?;
            let output = parse_bits::<OUTPUT_BITS>(output).ok_or_else(|| {
                Error::parse(line_no, format!("output must be {OUTPUT_BITS} bits"))
            })?;
            let input = input.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
            if entries
                .insert((state, input), (line_no, RllEdge { next, output }))
                .is_some()
            {
                return Err(Error::parse(line_no, "duplicate (state, input) entry"));
            }
            n_states = n_states.max(state + 1).max(next + 1);
        }
        if n_states == 0 {
            return Err(Error::parse(0, "empty RLL table"));
        }

        let mut edges = Vec::with_capacity(n_states);
        for s in 0..n_states {
            let mut row = [RllEdge { next: 0, output: [0; OUTPUT_BITS] }; INPUTS];
            for (input, slot) in row.iter_mut().enumerate() {
                let (_, edge) = entries.get(&(s, input)).ok_or_else(|| {
                    Error::parse(0, format!("missing entry for state {s}, input {input:02b}"))
                })?;
                *slot = *edge;
            }
            edges.push(row);
        }

        let (d, k) = run_lengths(&edges)?;
        if d < 1 {
            return Err(Error::InvalidParameter(
                "RLL table violates the d=1 constraint".into(),
            ));
        }
        let (anticipation, windows) = derive_decoder(&edges)?;
        Ok(Self {
            edges,
            d,
            k,
            anticipation,
            windows,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_table(&std::fs::read_to_string(path)?)
    }

    pub fn n_states(&self) -> usize {
        self.edges.len()
    }

    /// Edge leaving `state` on the user pair with value `input` (MSB first).
    pub fn edge(&self, state: usize, input: usize) -> RllEdge {
        self.edges[state][input]
    }

    /// Minimum number of zeros between ones in the differential stream.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Maximum zero run in the differential stream.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Codewords after the current one that the decoder inspects.
    pub fn anticipation(&self) -> usize {
        self.anticipation
    }

    /// Codewords in one decoder window.
    pub fn window(&self) -> usize {
        self.anticipation + 1
    }

    /// Zero pairs appended by [`rll_encode`] so the last user pair decodes.
    pub fn padding_pairs(&self) -> usize {
        self.anticipation
    }

    /// Channel bits produced by [`rll_encode`] for `user_len` user bits.
    pub fn encoded_len(&self, user_len: usize) -> usize {
        (user_len / INPUT_BITS + self.padding_pairs()) * OUTPUT_BITS
    }

    /// User bits carried by a terminated frame of `channel_len` channel bits.
    pub fn user_len(&self, channel_len: usize) -> Option<usize> {
        if !channel_len.is_multiple_of(OUTPUT_BITS) {
            return None;
        }
        (channel_len / OUTPUT_BITS)
            .checked_sub(self.padding_pairs())
            .map(|pairs| pairs * INPUT_BITS)
    }

    /// Unterminated encoding from state 0. Returns the channel bits and the
    /// final state.
    pub fn encode_stream(&self, user_bits: &[u8]) -> Result<(Vec<u8>, usize)> {
        if !user_bits.len().is_multiple_of(INPUT_BITS) {
            return Err(Error::InvalidParameter(format!(
                "RLL input length {} is not a multiple of {INPUT_BITS}",
                user_bits.len()
            )));
        }
        let mut state = 0;
        let mut out = Vec::with_capacity(user_bits.len() / INPUT_BITS * OUTPUT_BITS);
        for pair in user_bits.chunks_exact(INPUT_BITS) {
            let edge = self.edges[state][pair_index(pair)];
            out.extend_from_slice(&edge.output);
            state = edge.next;
        }
        Ok((out, state))
    }

    fn decode_window(&self, window: &[u8]) -> u8 {
        let key = pack(window);
        if let Some(&input) = self.windows.get(&key) {
            return input;
        }
        // Corrupted window: take the closest valid one, lowest key on ties.
        self.windows
            .iter()
            .min_by_key(|(&k, _)| ((k ^ key).count_ones(), k))
            .map_or(0, |(_, &input)| input)
    }
}

/// Terminated RLL encoding: appends [`RllCode::padding_pairs`] zero pairs.
pub fn rll_encode(user_bits: &[u8], code: &RllCode) -> Result<Vec<u8>> {
    if !user_bits.len().is_multiple_of(INPUT_BITS) {
        return Err(Error::InvalidParameter(format!(
            "RLL input length {} is odd",
            user_bits.len()
        )));
    }
    let mut padded = user_bits.to_vec();
    padded.resize(user_bits.len() + code.padding_pairs() * INPUT_BITS, 0);
    Ok(code.encode_stream(&padded)?.0)
}

/// Sliding-block decoding of a terminated frame; the padding pairs are dropped.
pub fn rll_decode(channel_bits: &[u8], code: &RllCode) -> Result<Vec<u8>> {
    if !channel_bits.len().is_multiple_of(OUTPUT_BITS) {
        return Err(Error::InvalidParameter(format!(
            "RLL channel length {} is not a multiple of {OUTPUT_BITS}",
            channel_bits.len()
        )));
    }
    let Some(user_len) = code.user_len(channel_bits.len()) else {
        return if channel_bits.is_empty() {
            Ok(Vec::new())
        } else {
            Err(Error::InvalidParameter(
                "RLL frame is shorter than its termination".into(),
            ))
        };
    };
    let span = code.window() * OUTPUT_BITS;
    let mut out = Vec::with_capacity(user_len);
    for pair in 0..user_len / INPUT_BITS {
        let start = pair * OUTPUT_BITS;
        let input = code.decode_window(&channel_bits[start..start + span]);
        out.push(input >> 1 & 1);
        out.push(input & 1);
    }
    Ok(out)
}

/// Running state of the 1T precoder.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrecoderState {
    pub last_bit: u8,
}

/// Modulo-2 integration: `y_n = y_{n-1} xor x_n`.
pub fn precode(diff_bits: &[u8], state: &mut PrecoderState) -> Vec<u8> {
    diff_bits
        .iter()
        .map(|&x| {
            state.last_bit ^= x & 1;
            state.last_bit
        })
        .collect()
}

/// Modulo-2 differentiation: `x_n = y_n xor y_{n-1}`, with `y_{-1} = initial`.
pub fn inverse_precode(unipolar_bits: &[u8], initial: u8) -> Vec<u8> {
    let mut prev = initial & 1;
    unipolar_bits
        .iter()
        .map(|&y| {
            let x = (y & 1) ^ prev;
            prev = y & 1;
            x
        })
        .collect()
}

fn parse_bits<const N: usize>(s: &str) -> Option<[u8; N]> {
    let bytes = s.as_bytes();
    if bytes.len() != N {
        return None;
    }
    let mut out = [0u8; N];
    for (o, &c) in out.iter_mut().zip(bytes) {
        *o = match c {
            b'0' => 0,
            b'1' => 1,
            _ => return None,
        };
    }
    Some(out)
}

fn pair_index(pair: &[u8]) -> usize {
    ((pair[0] & 1) as usize) << 1 | (pair[1] & 1) as usize
}

fn pack(bits: &[u8]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| acc << 1 | (b & 1) as u32)
}

/// Exact (d, k) of every stream the encoder can emit from state 0.
fn run_lengths(edges: &[[RllEdge; INPUTS]]) -> Result<(usize, usize)> {
    // (state, zeros since last one, a one has been seen)
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(0usize, 0usize, false)];
    let mut d = usize::MAX;
    let mut k = 0;
    while let Some((s, run, one)) = stack.pop() {
        if !seen.insert((s, run, one)) {
            continue;
        }
        for edge in &edges[s] {
            if edge.next >= edges.len() {
                return Err(Error::InvalidParameter(format!(
                    "RLL table references undefined state {}",
                    edge.next
                )));
            }
            let (mut run, mut one) = (run, one);
            for &bit in &edge.output {
                if bit == 1 {
                    if one {
                        d = d.min(run);
                    }
                    k = k.max(run);
                    run = 0;
                    one = true;
                } else {
                    run += 1;
                }
            }
            if run > MAX_RUN {
                return Err(Error::InvalidParameter(
                    "RLL table allows unbounded zero runs".into(),
                ));
            }
            k = k.max(run);
            stack.push((edge.next, run, one));
        }
    }
    Ok((if d == usize::MAX { 0 } else { d }, k))
}

/// Smallest anticipation for which every window of `anticipation + 1`
/// codewords determines the first user pair, together with that table.
fn derive_decoder(edges: &[[RllEdge; INPUTS]]) -> Result<(usize, HashMap<u32, u8>)> {
    'outer: for anticipation in 0..=MAX_ANTICIPATION {
        let mut table = HashMap::new();
        for s in 0..edges.len() {
            for input in 0..INPUTS {
                let first = edges[s][input];
                let mut paths = vec![(first.next, pack(&first.output))];
                for _ in 0..anticipation {
                    paths = paths
                        .into_iter()
                        .flat_map(|(state, label)| {
                            edges[state].iter().map(move |e| {
                                (e.next, label << OUTPUT_BITS | pack(&e.output))
                            })
                        })
                        .collect();
                }
                for (_, label) in paths {
                    match table.insert(label, input as u8) {
                        Some(prev) if prev != input as u8 => continue 'outer,
                        _ => {}
                    }
                }
            }
        }
        return Ok((anticipation, table));
    }
    Err(Error::InvalidParameter(format!(
        "RLL table is not sliding-block decodable within {MAX_ANTICIPATION} codewords"
    )))
}
