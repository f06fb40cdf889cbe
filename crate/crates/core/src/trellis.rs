//! Trellises and log-domain BCJR soft-in/soft-out decoding.

use crate::error::{Error, Result};
use crate::llr::Llr;
use crate::rll::RllCode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub input: Vec<u8>,
    pub output: Vec<u8>,
}

/// A time-invariant trellis. Every frame starts in state 0.
#[derive(Debug, Clone)]
pub struct Trellis {
    n_states: usize,
    inputs_per_step: usize,
    outputs_per_step: usize,
    branches: Vec<Branch>,
}

impl Trellis {
    /// Validates bit counts, determinism (`from` and `input` fix the branch)
    /// and that every state is reachable from state 0 and has a successor.
    pub fn new(n_states: usize, branches: Vec<Branch>) -> Result<Self> {
        let inputs_per_step = branches.first().map_or(0, |b| b.input.len());
        let outputs_per_step = branches.first().map_or(0, |b| b.output.len());
        let mut seen = std::collections::HashSet::new();
        for b in &branches {
            if b.from >= n_states || b.to >= n_states {
                return Err(Error::InvalidParameter(format!(
                    "branch {}->{} leaves the {n_states}-state space",
                    b.from, b.to
                )));
            }
            if b.input.len() != inputs_per_step || b.output.len() != outputs_per_step {
                return Err(Error::InvalidParameter(
                    "branches disagree on bits per step".into(),
                ));
            }
            if !seen.insert((b.from, b.input.clone())) {
                return Err(Error::InvalidParameter(format!(
                    "state {} has two branches for input {:?}",
                    b.from, b.input
                )));
            }
        }

        let mut reached = vec![false; n_states];
        let mut stack = vec![0];
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut reached[s], true) {
                continue;
            }
            stack.extend(branches.iter().filter(|b| b.from == s).map(|b| b.to));
        }
        if let Some(s) = reached.iter().position(|&r| !r) {
            return Err(Error::InvalidParameter(format!("state {s} is unreachable")));
        }
        if let Some(s) = (0..n_states).find(|&s| branches.iter().all(|b| b.from != s)) {
            return Err(Error::InvalidParameter(format!("state {s} is a dead end")));
        }

        Ok(Self {
            n_states,
            inputs_per_step,
            outputs_per_step,
            branches,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn inputs_per_step(&self) -> usize {
        self.inputs_per_step
    }

    pub fn outputs_per_step(&self) -> usize {
        self.outputs_per_step
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Branch taken from `state` on `input`.
    pub fn branch(&self, state: usize, input: &[u8]) -> Option<&Branch> {
        self.branches
            .iter()
            .find(|b| b.from == state && b.input == input)
    }

    /// Runs the state machine from state 0 and returns the emitted bits.
    pub fn encode(&self, input: &[u8]) -> Result<Vec<u8>> {
        let k = self.inputs_per_step.max(1);
        if !input.len().is_multiple_of(k) {
            return Err(Error::mismatch("trellis input", input.len() / k * k + k, input.len()));
        }
        let mut state = 0;
        let mut out = Vec::with_capacity(input.len() / k * self.outputs_per_step);
        for step in input.chunks_exact(k) {
            let b = self.branch(state, step).ok_or_else(|| {
                Error::InvalidParameter(format!("no branch from state {state} on {step:?}"))
            })?;
            out.extend_from_slice(&b.output);
            state = b.to;
        }
        Ok(out)
    }

    fn steps(&self, prior_in: &[Llr], channel_out: &[Llr]) -> Result<usize> {
        let k_in = self.inputs_per_step;
        let k_out = self.outputs_per_step;
        if k_in == 0 || !prior_in.len().is_multiple_of(k_in) {
            return Err(Error::mismatch("input priors", k_in, prior_in.len()));
        }
        let steps = prior_in.len() / k_in;
        if channel_out.len() != steps * k_out {
            return Err(Error::mismatch("channel LLRs", steps * k_out, channel_out.len()));
        }
        Ok(steps)
    }

    /// Branch metric for one step: half the LLR, signed by the branch bit.
    /// An infinite LLR contributes 0 when the bit agrees and -inf otherwise,
    /// which differs from the finite rule only by a constant per bit.
    fn metric(&self, b: &Branch, prior: &[Llr], channel: &[Llr]) -> f64 {
        let half = |bit: u8, llr: Llr| {
            if llr.is_infinite() {
                if (llr > 0.0) == (bit == 0) { 0.0 } else { f64::NEG_INFINITY }
            } else if bit == 0 {
                0.5 * llr
            } else {
                -0.5 * llr
            }
        };
        b.input.iter().zip(prior).map(|(&x, &l)| half(x, l)).sum::<f64>()
            + b.output.iter().zip(channel).map(|(&x, &l)| half(x, l)).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SisoMode {
    /// Exact log-sum-exp.
    LogMap,
    /// Max-log approximation.
    MaxLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SisoOutput {
    pub input_posterior: Vec<Llr>,
    /// Input posterior minus the prior.
    pub input_extrinsic: Vec<Llr>,
    pub output_posterior: Vec<Llr>,
}

#[inline]
fn max_star(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Forward-backward over `trellis`, starting in state 0 and ending anywhere.
///
/// `prior_in` holds one LLR per input bit, `channel_out` one per output bit.
/// A bit that no path can take gets an infinite LLR.
pub fn bcjr(
    trellis: &Trellis,
    prior_in: &[Llr],
    channel_out: &[Llr],
    mode: SisoMode,
) -> Result<SisoOutput> {
    let steps = trellis.steps(prior_in, channel_out)?;
    let combine = match mode {
        SisoMode::LogMap => max_star,
        SisoMode::MaxLog => f64::max,
    };
    let s = trellis.n_states;
    let k_in = trellis.inputs_per_step;
    let k_out = trellis.outputs_per_step;
    let ninf = f64::NEG_INFINITY;

    let mut gamma = vec![0.0; steps * trellis.branches.len()];
    for t in 0..steps {
        let prior = &prior_in[t * k_in..(t + 1) * k_in];
        let channel = &channel_out[t * k_out..(t + 1) * k_out];
        for (j, b) in trellis.branches.iter().enumerate() {
            gamma[t * trellis.branches.len() + j] = trellis.metric(b, prior, channel);
        }
    }
    let g = |t: usize, j: usize| gamma[t * trellis.branches.len() + j];

    let mut alpha = vec![ninf; (steps + 1) * s];
    alpha[0] = 0.0;
    for t in 0..steps {
        let (cur, next) = alpha.split_at_mut((t + 1) * s);
        let cur = &cur[t * s..];
        let next = &mut next[..s];
        for (j, b) in trellis.branches.iter().enumerate() {
            next[b.to] = combine(next[b.to], cur[b.from] + g(t, j));
        }
        normalize(next);
    }

    let mut beta = vec![ninf; (steps + 1) * s];
    beta[steps * s..].fill(0.0);
    for t in (0..steps).rev() {
        let (cur, next) = beta.split_at_mut((t + 1) * s);
        let cur = &mut cur[t * s..];
        for (j, b) in trellis.branches.iter().enumerate() {
            cur[b.from] = combine(cur[b.from], next[b.to] + g(t, j));
        }
        normalize(cur);
    }

    let mut input_posterior = vec![0.0; steps * k_in];
    let mut output_posterior = vec![0.0; steps * k_out];
    let mut in_acc = vec![[ninf; 2]; k_in];
    let mut out_acc = vec![[ninf; 2]; k_out];
    for t in 0..steps {
        in_acc.iter_mut().for_each(|a| *a = [ninf; 2]);
        out_acc.iter_mut().for_each(|a| *a = [ninf; 2]);
        for (j, b) in trellis.branches.iter().enumerate() {
            let m = alpha[t * s + b.from] + g(t, j) + beta[(t + 1) * s + b.to];
            if m == ninf {
                continue;
            }
            for (acc, &bit) in in_acc.iter_mut().zip(&b.input) {
                acc[bit as usize] = combine(acc[bit as usize], m);
            }
            for (acc, &bit) in out_acc.iter_mut().zip(&b.output) {
                acc[bit as usize] = combine(acc[bit as usize], m);
            }
        }
        for (i, acc) in in_acc.iter().enumerate() {
            input_posterior[t * k_in + i] = llr_of(acc);
        }
        for (i, acc) in out_acc.iter().enumerate() {
            output_posterior[t * k_out + i] = llr_of(acc);
        }
    }

    let input_extrinsic = input_posterior
        .iter()
        .zip(prior_in)
        .map(|(&p, &a)| if p.is_finite() { p - a } else { p })
        .collect();
    Ok(SisoOutput {
        input_posterior,
        input_extrinsic,
        output_posterior,
    })
}

fn llr_of(acc: &[f64; 2]) -> Llr {
    match (acc[0] == f64::NEG_INFINITY, acc[1] == f64::NEG_INFINITY) {
        (true, true) => 0.0,
        (false, true) => f64::INFINITY,
        (true, false) => f64::NEG_INFINITY,
        (false, false) => acc[0] - acc[1],
    }
}

fn normalize(metrics: &mut [f64]) {
    let top = metrics.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top.is_finite() {
        metrics.iter_mut().for_each(|m| *m -= top);
    }
}

/// Most likely input sequence from state 0, free ending. Ties favour the
/// lower branch index.
pub fn viterbi(trellis: &Trellis, prior_in: &[Llr], channel_out: &[Llr]) -> Result<Vec<u8>> {
    let steps = trellis.steps(prior_in, channel_out)?;
    let s = trellis.n_states;
    let k_in = trellis.inputs_per_step;
    let k_out = trellis.outputs_per_step;
    let mut metric = vec![f64::NEG_INFINITY; s];
    metric[0] = 0.0;
    let mut survivors = vec![usize::MAX; steps * s];
    for t in 0..steps {
        let prior = &prior_in[t * k_in..(t + 1) * k_in];
        let channel = &channel_out[t * k_out..(t + 1) * k_out];
        let mut next = vec![f64::NEG_INFINITY; s];
        for (j, b) in trellis.branches.iter().enumerate() {
            let m = metric[b.from] + trellis.metric(b, prior, channel);
            if m > next[b.to] {
                next[b.to] = m;
                survivors[t * s + b.to] = j;
            }
        }
        metric = next;
    }
    let mut state = (0..s)
        .max_by(|&a, &b| metric[a].total_cmp(&metric[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    let mut bits = vec![0u8; steps * k_in];
    for t in (0..steps).rev() {
        let b = &trellis.branches[survivors[t * s + state]];
        bits[t * k_in..(t + 1) * k_in].copy_from_slice(&b.input);
        state = b.from;
    }
    Ok(bits)
}

/// The 1T precoder: state is the last unipolar bit, one differential bit in,
/// one unipolar bit out.
pub fn build_precoder_trellis() -> Trellis {
    let mut branches = Vec::new();
    for from in 0..2u8 {
        for x in 0..2u8 {
            let y = from ^ x;
            branches.push(Branch {
                from: from as usize,
                to: y as usize,
                input: vec![x],
                output: vec![y],
            });
        }
    }
    Trellis::new(2, branches).expect("precoder trellis is valid")
}

/// The RLL encoder followed by the precoder. State `2 * e + p` pairs encoder
/// state `e` with the last unipolar bit `p`; 2 user bits in, 3 unipolar bits
/// out per step.
pub fn build_rll_unipolar_trellis(code: &RllCode) -> Trellis {
    let mut branches = Vec::new();
    for e in 0..code.n_states() {
        for polarity in 0..2u8 {
            for u in 0..4usize {
                let edge = code.edge(e, u);
                let mut p = polarity;
                let output = edge
                    .output
                    .iter()
                    .map(|&x| {
                        p ^= x;
                        p
                    })
                    .collect();
                branches.push(Branch {
                    from: 2 * e + polarity as usize,
                    to: 2 * edge.next + p as usize,
                    input: vec![(u >> 1) as u8, (u & 1) as u8],
                    output,
                });
            }
        }
    }
    Trellis::new(2 * code.n_states(), branches).expect("RLL trellis is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rll::{precode, rll_encode, PrecoderState};

    #[test]
    fn precoder_trellis_reproduces_precode() {
        let t = build_precoder_trellis();
        assert_eq!(t.n_states(), 2);
        let x = [1, 0, 0, 1, 0];
        assert_eq!(t.encode(&x).unwrap(), precode(&x, &mut PrecoderState::default()));
    }

    #[test]
    fn rll_trellis_doubles_states_and_reproduces_chain() {
        let code = RllCode::default();
        let t = build_rll_unipolar_trellis(&code);
        assert_eq!(t.n_states(), 2 * code.n_states());
        assert_eq!((t.inputs_per_step(), t.outputs_per_step()), (2, 3));
        let user = [1, 0, 0, 1, 1, 1, 0, 0, 0, 1];
        let mut padded = user.to_vec();
        padded.extend([0, 0, 0, 0]);
        let expected = precode(&rll_encode(&user, &code).unwrap(), &mut PrecoderState::default());
        assert_eq!(t.encode(&padded).unwrap(), expected);
    }

    #[test]
    fn one_step_precoder_closed_form() {
        // From state 0 the output equals the input, so the differential
        // posterior is exactly the channel LLR.
        let t = build_precoder_trellis();
        let out = bcjr(&t, &[0.0], &[1.7], SisoMode::LogMap).unwrap();
        assert!((out.input_posterior[0] - 1.7).abs() < 1e-12);
        assert!((out.output_posterior[0] - 1.7).abs() < 1e-12);
    }

    #[test]
    fn two_step_precoder_closed_form() {
        // x1 = y0 xor y1: LLR(x1) = log((e^{(a+b)/2} + e^{-(a+b)/2}) / (e^{(a-b)/2} + e^{(b-a)/2})).
        let t = build_precoder_trellis();
        let (a, b) = (1.3, -0.4);
        let out = bcjr(&t, &[0.0, 0.0], &[a, b], SisoMode::LogMap).unwrap();
        let expected = ((a + b) / 2.0f64).cosh().ln() - ((a - b) / 2.0f64).cosh().ln();
        assert!((out.input_posterior[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn erasures_in_erasures_out() {
        let t = build_precoder_trellis();
        let out = bcjr(&t, &[0.0; 5], &[0.0; 5], SisoMode::LogMap).unwrap();
        assert!(out.input_posterior.iter().all(|&x| x == 0.0));
        assert!(out.output_posterior.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn rejects_inconsistent_lengths() {
        let t = build_rll_unipolar_trellis(&RllCode::default());
        assert!(bcjr(&t, &[0.0; 4], &[0.0; 5], SisoMode::LogMap).is_err());
        assert!(bcjr(&t, &[0.0; 3], &[0.0; 3], SisoMode::LogMap).is_err());
        assert!(viterbi(&t, &[0.0; 4], &[0.0; 7]).is_err());
    }

    #[test]
    fn rejects_nondeterministic_or_untrimmed() {
        let b = |from, to, x| Branch { from, to, input: vec![x], output: vec![x] };
        assert!(Trellis::new(2, vec![b(0, 1, 0), b(0, 0, 0), b(1, 0, 1)]).is_err());
        assert!(Trellis::new(3, vec![b(0, 1, 0), b(1, 0, 1)]).is_err());
        assert!(Trellis::new(2, vec![b(0, 1, 0)]).is_err());
    }

    #[test]
    fn noiseless_rll_frame_decodes() {
        let code = RllCode::default();
        let t = build_rll_unipolar_trellis(&code);
        let user = [0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0];
        let tx = t.encode(&user).unwrap();
        let llrs: Vec<_> = tx.iter().map(|&b| if b == 0 { 20.0 } else { -20.0 }).collect();
        let out = bcjr(&t, &[0.0; 12], &llrs, SisoMode::LogMap).unwrap();
        let hard: Vec<u8> = out.input_posterior.iter().map(|&l| u8::from(l < 0.0)).collect();
        // The last steps have no lookahead; check the ones the decoder window covers.
        assert_eq!(&hard[..8], &user[..8]);
    }
}
