//! Brute-force reference implementations and the self-test suites built on
//! them. Everything here is deliberately naive: enumerate, sort, sum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::constraint::{co, Arm, ConstraintBank};
use crate::error::Result;
use crate::llr::{Llr, MAX_LLR};
use crate::matrix::SparseParityCheckMatrix;
use crate::minsum::{chk_update, var_update, DecoderParams, MinSumDecoder};
use crate::rll::RllCode;
use crate::trellis::{bcjr, build_precoder_trellis, build_rll_unipolar_trellis, SisoMode, Trellis};

/// Variable update as a plain left-to-right sum, clamped by comparison.
pub fn reference_var(inputs: &[Llr]) -> Llr {
    let mut total = 0.0;
    for &x in inputs {
        total += x;
    }
    if total > MAX_LLR {
        MAX_LLR
    } else if total < -MAX_LLR {
        -MAX_LLR
    } else {
        total
    }
}

/// Check update from a sorted copy of the magnitudes and a count of
/// negative inputs.
pub fn reference_chk(inputs: &[Llr], alpha: f64) -> Llr {
    let mut magnitudes: Vec<Llr> = inputs.iter().map(|x| x.abs()).collect();
    magnitudes.sort_by(f64::total_cmp);
    let negatives = inputs.iter().filter(|x| x.is_sign_negative() && **x != 0.0).count();
    let magnitude = (alpha * magnitudes[0]).min(MAX_LLR);
    if magnitude == 0.0 {
        0.0
    } else if negatives % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

/// Constraint-node message by exhaustive min-cost search over the two other
/// bits of the triple. The cost of a hypothesis is the total magnitude of the
/// inputs it contradicts; `010` and `101` are excluded.
pub fn reference_co(arm: Arm, x: Llr, y: Llr, beta: f64) -> Llr {
    let (ax, ay) = arm.inputs();
    let cost_given = |target: u8| {
        let mut best = f64::INFINITY;
        for bx in 0..2u8 {
            for by in 0..2u8 {
                let mut triple = [0u8; 3];
                triple[arm as usize] = target;
                triple[ax as usize] = bx;
                triple[ay as usize] = by;
                if triple == [0, 1, 0] || triple == [1, 0, 1] {
                    continue;
                }
                let against = |bit: u8, l: Llr| if (l < 0.0) != (bit == 1) { l.abs() } else { 0.0 };
                best = best.min(against(bx, x) + against(by, y));
            }
        }
        best
    };
    beta * (cost_given(1) - cost_given(0))
}

/// All codewords of a small code, by enumeration of every binary word.
pub fn enumerate_codewords(h: &SparseParityCheckMatrix) -> Vec<Vec<u8>> {
    let n = h.n_vars();
    assert!(n <= 24, "enumeration limited to 24 bits");
    (0u32..1 << n)
        .map(|w| (0..n).map(|i| (w >> i & 1) as u8).collect::<Vec<u8>>())
        .filter(|bits| h.is_codeword(bits).unwrap_or(false))
        .collect()
}

/// Maximum-likelihood codeword: the one whose ones carry the least total LLR.
pub fn ml_decode<'c>(codewords: &'c [Vec<u8>], llrs: &[Llr]) -> &'c [u8] {
    codewords
        .iter()
        .min_by(|a, b| cost(a, llrs).total_cmp(&cost(b, llrs)))
        .expect("at least the zero codeword")
}

fn cost(word: &[u8], llrs: &[Llr]) -> f64 {
    word.iter().zip(llrs).filter(|(b, _)| **b == 1).map(|(_, l)| l).sum()
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Posterior input and output LLRs by listing every path from state 0.
pub fn enumerate_posteriors(trellis: &Trellis, prior_in: &[Llr], channel_out: &[Llr]) -> (Vec<Llr>, Vec<Llr>) {
    let k = trellis.inputs_per_step();
    let steps = prior_in.len() / k;
    let mut paths: Vec<(Vec<u8>, Vec<u8>, f64)> = Vec::new();
    for word in 0u64..1 << (steps * k) {
        let input: Vec<u8> = (0..steps * k).map(|i| (word >> i & 1) as u8).collect();
        let Ok(output) = trellis.encode(&input) else { continue };
        let metric = half_metric(&input, prior_in) + half_metric(&output, channel_out);
        paths.push((input, output, metric));
    }
    let posterior = |pick: &dyn Fn(&(Vec<u8>, Vec<u8>, f64)) -> u8| {
        let zero: Vec<f64> = paths.iter().filter(|p| pick(p) == 0).map(|p| p.2).collect();
        let one: Vec<f64> = paths.iter().filter(|p| pick(p) == 1).map(|p| p.2).collect();
        log_sum_exp(&zero) - log_sum_exp(&one)
    };
    let inputs = (0..prior_in.len()).map(|i| posterior(&|p| p.0[i])).collect();
    let outputs = (0..channel_out.len()).map(|i| posterior(&|p| p.1[i])).collect();
    (inputs, outputs)
}

fn half_metric(bits: &[u8], llrs: &[Llr]) -> f64 {
    bits.iter()
        .zip(llrs)
        .map(|(&b, &l)| {
            if l.is_infinite() {
                if (l > 0.0) == (b == 0) { 0.0 } else { f64::NEG_INFINITY }
            } else if b == 0 {
                l / 2.0
            } else {
                -l / 2.0
            }
        })
        .sum()
}

/// Dense flooding min-sum without constraint nodes, written from the
/// message-passing equations with no shared code.
pub fn reference_minsum(rows: &[Vec<usize>], n: usize, channel: &[Llr], alpha: f64, iterations: usize) -> Vec<Llr> {
    let clamp = |x: f64| x.clamp(-MAX_LLR, MAX_LLR);
    let t: Vec<Llr> = channel.iter().map(|&x| clamp(x)).collect();
    let mut v: Vec<Vec<Llr>> = rows.iter().map(|r| vec![0.0; r.len()]).collect();
    let mut w = t.clone();
    for _ in 0..iterations {
        let mut incoming = vec![0.0; n];
        for (row, msgs) in rows.iter().zip(&v) {
            for (&var, &m) in row.iter().zip(msgs) {
                incoming[var] += m;
            }
        }
        let u: Vec<Vec<Llr>> = rows
            .iter()
            .zip(&v)
            .map(|(row, msgs)| row.iter().zip(msgs).map(|(&var, &m)| clamp(t[var] + (incoming[var] - m))).collect())
            .collect();
        for (msgs, inputs) in v.iter_mut().zip(&u) {
            for j in 0..inputs.len() {
                let others: Vec<Llr> = (0..inputs.len()).filter(|&i| i != j).map(|i| inputs[i]).collect();
                msgs[j] = reference_chk(&others, alpha);
            }
        }
        let mut total = t.clone();
        for (row, msgs) in rows.iter().zip(&v) {
            for (&var, &m) in row.iter().zip(msgs) {
                total[var] += m;
            }
        }
        w = total.into_iter().map(clamp).collect();
    }
    w
}

/// Outcome of one self-test suite.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

fn random_llr<R: Rng>(rng: &mut R) -> Llr {
    match rng.random_range(0..20) {
        0 => 0.0,
        1 => if rng.random() { MAX_LLR } else { -MAX_LLR },
        2 => rng.random_range(-200.0..200.0),
        _ => rng.random_range(-20.0..20.0),
    }
}

/// Operators against their references, bit for bit, on `trials` inputs each.
pub fn check_operators(trials: usize, seed: u64) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = [0usize; 3];
    for _ in 0..trials {
        let degree = rng.random_range(1..12);
        let inputs: Vec<Llr> = (0..degree).map(|_| random_llr(&mut rng)).collect();
        let alpha = if rng.random() { 1.0 } else { rng.random_range(0.05..1.0) };
        mismatches[0] += usize::from(var_update(&inputs).to_bits() != reference_var(&inputs).to_bits());
        mismatches[1] += usize::from(chk_update(&inputs, alpha).to_bits() != reference_chk(&inputs, alpha).to_bits());
        let arm = Arm::ALL[rng.random_range(0..3)];
        let (x, y) = (random_llr(&mut rng), random_llr(&mut rng));
        mismatches[2] += usize::from(co(arm, x, y, alpha).to_bits() != reference_co(arm, x, y, alpha).to_bits());
    }
    CheckResult::new(
        "operator exactness",
        mismatches == [0, 0, 0],
        format!("{trials} inputs each, mismatches var/chk/co = {mismatches:?}"),
    )
}

/// Per-triple outcome of one constraint-node pass at saturated LLRs.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleReport {
    pub bits: [u8; 3],
    pub outputs: [Llr; 3],
    pub forbidden: bool,
}

impl TripleReport {
    /// Every output is nonzero and points away from the bit it arrives at.
    pub fn pushes_away(&self) -> bool {
        self.outputs.iter().zip(self.bits).all(|(&m, b)| m != 0.0 && (m < 0.0) == (b == 0))
    }

    /// No output points away from the bit it arrives at.
    pub fn never_opposes(&self) -> bool {
        self.outputs.iter().zip(self.bits).all(|(&m, b)| m == 0.0 || (m < 0.0) == (b == 1))
    }

    pub fn all_zero(&self) -> bool {
        self.outputs.iter().all(|&m| m == 0.0)
    }
}

/// Runs all eight hard triples through one constraint node.
pub fn co_triple_reports() -> Vec<TripleReport> {
    (0..8u8)
        .map(|pattern| {
            let bits = [pattern >> 2 & 1, pattern >> 1 & 1, pattern & 1];
            let llrs: Vec<Llr> = bits.iter().map(|&b| if b == 0 { MAX_LLR } else { -MAX_LLR }).collect();
            let mut bank = ConstraintBank::with_centers(vec![1], 1.0).expect("valid bank");
            bank.flood_pass(&llrs, MAX_LLR);
            TripleReport {
                bits,
                outputs: bank.b()[0],
                forbidden: bits == [0, 1, 0] || bits == [1, 0, 1],
            }
        })
        .collect()
}

/// Forbidden triples are pushed away on all three arms; compliant triples
/// are never pushed away from their current values.
pub fn check_co_triples() -> CheckResult {
    let reports = co_triple_reports();
    let failures: Vec<String> = reports
        .iter()
        .filter(|r| if r.forbidden { !r.pushes_away() } else { !r.never_opposes() })
        .map(|r| format!("{:?} -> {:?}", r.bits, r.outputs))
        .collect();
    CheckResult::new("constraint triple exhaustion", failures.is_empty(), format!("8 triples, failures {failures:?}"))
}

/// LogMap BCJR against path enumeration on random frames of every length up
/// to `precoder_steps` and `rll_steps`. Returns the largest deviation too.
pub fn check_bcjr(precoder_steps: usize, rll_steps: usize, frames_per_length: usize, seed: u64) -> (CheckResult, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rll = RllCode::default();
    let trellises = [(build_precoder_trellis(), precoder_steps), (build_rll_unipolar_trellis(&rll), rll_steps)];
    let mut worst = 0.0f64;
    let mut frames = 0;
    for (trellis, max_steps) in &trellises {
        for steps in 1..=*max_steps {
            for _ in 0..frames_per_length {
                let prior: Vec<Llr> = (0..steps * trellis.inputs_per_step()).map(|_| rng.random_range(-4.0..4.0)).collect();
                let channel: Vec<Llr> =
                    (0..steps * trellis.outputs_per_step()).map(|_| rng.random_range(-6.0..6.0)).collect();
                let (inputs, outputs) = enumerate_posteriors(trellis, &prior, &channel);
                let siso = bcjr(trellis, &prior, &channel, SisoMode::LogMap).expect("lengths match");
                for (a, b) in siso.input_posterior.iter().zip(&inputs).chain(siso.output_posterior.iter().zip(&outputs)) {
                    worst = worst.max((a - b).abs());
                }
                frames += 1;
            }
        }
    }
    (
        CheckResult::new("BCJR exactness", worst <= 1e-9, format!("{frames} frames, max deviation {worst:.3e}")),
        worst,
    )
}

/// Min-sum on the (7,4) Hamming code against ML decoding at 4 dB. Returns
/// the match fraction too. Only alpha and the iteration cap are pinned; the
/// rest is the decoder default, including early exit, without which a decode
/// that reached a codeword can oscillate off it around the 4-cycles.
pub fn check_hamming_ml(vectors: usize, threshold: f64, seed: u64) -> (CheckResult, f64) {
    let h = SparseParityCheckMatrix::hamming_7_4();
    let codewords = enumerate_codewords(&h);
    let params = DecoderParams {
        max_iterations: 20,
        alpha: 1.0,
        ..DecoderParams::default()
    };
    let mut decoder = MinSumDecoder::new(&h, params).expect("valid parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rate = 4.0 / 7.0;
    let sigma = (1.0 / (2.0 * rate * 10f64.powf(0.4))).sqrt();
    let mut matches = 0;
    for _ in 0..vectors {
        let word = &codewords[rng.random_range(0..codewords.len())];
        let llrs: Vec<Llr> = word
            .iter()
            .map(|&b| {
                let z: f64 = StandardNormal.sample(&mut rng);
                2.0 * (1.0 - 2.0 * f64::from(b) + sigma * z) / (sigma * sigma)
            })
            .collect();
        let out = decoder.decode(&llrs).expect("length matches");
        matches += usize::from(out.hard_bits == ml_decode(&codewords, &llrs));
    }
    let fraction = matches as f64 / vectors as f64;
    (
        CheckResult::new(
            "Hamming ML agreement",
            fraction >= threshold,
            format!("{matches}/{vectors} = {:.4} (need {threshold})", fraction),
        ),
        fraction,
    )
}

/// Runs the brute-force suites at reduced size.
pub fn run_selftest(seed: u64) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_operators(20_000, seed),
        check_co_triples(),
        check_bcjr(12, 6, 3, seed).0,
        check_hamming_ml(2_000, 0.99, seed).0,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_has_sixteen_codewords() {
        assert_eq!(enumerate_codewords(&SparseParityCheckMatrix::hamming_7_4()).len(), 16);
    }

    #[test]
    fn reference_co_matches_rules() {
        assert_eq!(reference_co(Arm::Center, 3.0, 5.0, 1.0), 3.0);
        assert_eq!(reference_co(Arm::Center, 3.0, -5.0, 1.0), 0.0);
        assert_eq!(reference_co(Arm::Left, -4.0, 2.0, 0.5), -1.0);
    }

    #[test]
    fn enumeration_single_precoder_step() {
        // One step from state 0: output equals input, so both LLRs add.
        let (inputs, outputs) = enumerate_posteriors(&build_precoder_trellis(), &[1.0], &[2.0]);
        assert!((inputs[0] - 3.0).abs() < 1e-12);
        assert!((outputs[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn selftest_passes() {
        for r in run_selftest(3).unwrap() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
