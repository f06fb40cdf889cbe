//! Normalized min-sum decoding, optionally augmented with d=1 constraint nodes.
//!
//! Messages follow the usual naming: `t` channel input, `u` variable to check,
//! `v` check to variable, `w` decoder output. Constraint node messages live in
//! [`ConstraintBank`].
//!
//! Two schedules are provided. [`Schedule::Flooding`] updates all checks, then
//! all constraint nodes, from the previous half-iteration. [`Schedule::Serial`]
//! keeps a running posterior per variable and updates one check or constraint
//! node at a time, refreshing the posteriors of its neighbours immediately.

use std::ops::Range;

use crate::constraint::ConstraintBank;
use crate::error::{Error, Result};
use crate::llr::{hard_decisions, saturate, sign_bit, Llr, MAX_LLR};
use crate::matrix::SparseParityCheckMatrix;

/// Variable node operator: the sum of its inputs, saturated at [`MAX_LLR`].
pub fn var_update(inputs: &[Llr]) -> Llr {
    saturate(inputs.iter().sum(), MAX_LLR)
}

/// Check node operator: `alpha * min |x|` with the XOR of the input sign bits.
pub fn chk_update(inputs: &[Llr], alpha: f64) -> Llr {
    let mut magnitude = f64::INFINITY;
    let mut parity = 0u8;
    for &x in inputs {
        magnitude = magnitude.min(x.abs());
        parity ^= sign_bit(x);
    }
    let magnitude = saturate(alpha * magnitude, MAX_LLR);
    signed(magnitude, parity)
}

#[inline]
fn signed(magnitude: Llr, sign: u8) -> Llr {
    if magnitude == 0.0 {
        0.0
    } else if sign == 1 {
        -magnitude
    } else {
        magnitude
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Flooding,
    Serial,
}

impl std::str::FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flooding" => Ok(Schedule::Flooding),
            "serial" => Ok(Schedule::Serial),
            other => Err(Error::InvalidParameter(format!(
                "unknown schedule {other:?} (expected flooding or serial)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderParams {
    pub max_iterations: usize,
    /// Check node scaling factor.
    pub alpha: f64,
    /// Constraint node scaling factor.
    pub beta: f64,
    pub schedule: Schedule,
    pub constraint_nodes_enabled: bool,
    /// Systematic positions covered by constraint nodes.
    pub constraint_range: Range<usize>,
    /// Stop as soon as the hard decisions satisfy every check.
    pub early_exit: bool,
    pub max_llr: Llr,
}

impl Default for DecoderParams {
    fn default() -> Self {
        Self {
            max_iterations: 16,
            alpha: 0.75,
            beta: 0.75,
            schedule: Schedule::Serial,
            constraint_nodes_enabled: false,
            constraint_range: 0..0,
            early_exit: true,
            max_llr: MAX_LLR,
        }
    }
}

impl DecoderParams {
    /// Enables constraint nodes over `span`.
    pub fn with_constraints(mut self, span: Range<usize>) -> Self {
        self.constraint_nodes_enabled = true;
        self.constraint_range = span;
        self
    }

    pub fn without_constraints(mut self) -> Self {
        self.constraint_nodes_enabled = false;
        self.constraint_range = 0..0;
        self
    }

    pub fn validate(&self, n_vars: usize) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        if !(self.max_llr > 0.0 && self.max_llr.is_finite()) {
            return Err(Error::InvalidParameter("max_llr must be positive".into()));
        }
        let r = &self.constraint_range;
        if self.constraint_nodes_enabled {
            if r.start > r.end || r.end > n_vars {
                return Err(Error::InvalidParameter(format!(
                    "constraint range {r:?} does not fit in {n_vars} variables"
                )));
            }
        } else if !r.is_empty() {
            return Err(Error::InvalidParameter(
                "constraint range must be empty when constraint nodes are disabled".into(),
            ));
        }
        Ok(())
    }
}

/// Per-variable and per-edge messages of the LDPC part of the factor graph.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MessageStore {
    pub t: Vec<Llr>,
    pub u: Vec<Llr>,
    pub v: Vec<Llr>,
    pub w: Vec<Llr>,
}

impl MessageStore {
    pub fn new(h: &SparseParityCheckMatrix) -> Self {
        Self {
            t: vec![0.0; h.n_vars()],
            u: vec![0.0; h.n_edges()],
            v: vec![0.0; h.n_edges()],
            w: vec![0.0; h.n_vars()],
        }
    }

    fn load(&mut self, channel: &[Llr], max_llr: Llr) {
        for (t, &x) in self.t.iter_mut().zip(channel) {
            *t = saturate(x, max_llr);
        }
        self.u.fill(0.0);
        self.v.fill(0.0);
        self.w.fill(0.0);
    }
}

/// Flooding variable half-iteration: `u_mn = t_n + sum_{m' != m} v_m'n + b`,
/// where `extra[n]` carries the constraint node messages into `n`.
pub fn variable_to_check(
    h: &SparseParityCheckMatrix,
    store: &mut MessageStore,
    extra: Option<&[Llr]>,
    max_llr: Llr,
) {
    for n in 0..h.n_vars() {
        let edges = h.col_edges(n);
        let mut total = store.t[n];
        for &e in edges {
            total += store.v[e];
        }
        if let Some(extra) = extra {
            total += extra[n];
        }
        for &e in edges {
            store.u[e] = saturate(total - store.v[e], max_llr);
        }
    }
}

/// Flooding check half-iteration over every check.
pub fn check_to_variable(h: &SparseParityCheckMatrix, store: &mut MessageStore, alpha: f64, max_llr: Llr) {
    for m in 0..h.n_checks() {
        let edges = h.row_edges(m);
        check_row(&store.u[edges.clone()], &mut store.v[edges], alpha, max_llr);
    }
}

/// Writes the extrinsic min-sum output for every edge of one check.
#[inline]
fn check_row(u: &[Llr], v: &mut [Llr], alpha: f64, max_llr: Llr) {
    if u.len() == 1 {
        v[0] = max_llr;
        return;
    }
    let mut min1 = f64::INFINITY;
    let mut min2 = f64::INFINITY;
    let mut argmin = 0;
    let mut parity = 0u8;
    for (i, &x) in u.iter().enumerate() {
        let a = x.abs();
        if a < min1 {
            min2 = min1;
            min1 = a;
            argmin = i;
        } else if a < min2 {
            min2 = a;
        }
        parity ^= sign_bit(x);
    }
    let m1 = saturate(alpha * min1, max_llr);
    let m2 = saturate(alpha * min2, max_llr);
    for (i, (out, &x)) in v.iter_mut().zip(u).enumerate() {
        let magnitude = if i == argmin { m2 } else { m1 };
        *out = signed(magnitude, parity ^ sign_bit(x));
    }
}

/// Flooding constraint pass: recomputes every `a` from `t`, all check
/// messages and the other nodes' outputs, then every `b`.
pub fn constraint_pass(
    bank: &mut ConstraintBank,
    store: &MessageStore,
    h: &SparseParityCheckMatrix,
    max_llr: Llr,
) {
    let base: Vec<Llr> = (0..h.n_vars())
        .map(|n| store.t[n] + h.col_edges(n).iter().map(|&e| store.v[e]).sum::<Llr>())
        .collect();
    bank.flood_pass(&base, max_llr);
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    pub hard_bits: Vec<u8>,
    pub soft_out: Vec<Llr>,
    pub iterations_run: usize,
    /// The final hard decisions satisfy every parity check.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceLevel {
    #[default]
    Summary,
    /// Also snapshot every message array.
    Messages,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MessageSnapshot {
    pub u: Vec<Llr>,
    pub v: Vec<Llr>,
    pub a: Vec<[Llr; 3]>,
    pub b: Vec<[Llr; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub iteration: usize,
    pub syndrome_weight: usize,
    pub w: Vec<Llr>,
    pub hard_bits: Vec<u8>,
    pub messages: Option<MessageSnapshot>,
}

#[derive(Debug, Clone, Copy)]
enum Step {
    Check(usize),
    Constraint(usize),
}

/// Reusable decoder for one parity-check matrix.
#[derive(Debug, Clone)]
pub struct MinSumDecoder<'h> {
    h: &'h SparseParityCheckMatrix,
    params: DecoderParams,
    store: MessageStore,
    bank: Option<ConstraintBank>,
    posterior: Vec<Llr>,
    scratch: Vec<Llr>,
    plan: Vec<Step>,
}

impl<'h> MinSumDecoder<'h> {
    /// Builds a decoder; when constraints are enabled the constraint nodes
    /// cover `params.constraint_range`.
    pub fn new(h: &'h SparseParityCheckMatrix, params: DecoderParams) -> Result<Self> {
        params.validate(h.n_vars())?;
        let bank = if params.constraint_nodes_enabled {
            Some(ConstraintBank::over_span(params.constraint_range.clone(), params.beta)?)
        } else {
            None
        };
        Self::with_bank(h, params, bank)
    }

    /// Builds a decoder around an explicit bank. The bank is ignored when
    /// constraint nodes are disabled in `params`.
    pub fn with_bank(
        h: &'h SparseParityCheckMatrix,
        params: DecoderParams,
        bank: Option<ConstraintBank>,
    ) -> Result<Self> {
        params.validate(h.n_vars())?;
        let bank = bank.filter(|_| params.constraint_nodes_enabled);
        if let Some(bank) = &bank {
            if bank.required_vars() > h.n_vars() {
                return Err(Error::mismatch(
                    "constraint bank span",
                    h.n_vars(),
                    bank.required_vars(),
                ));
            }
        }
        let plan = serial_plan(h.n_checks(), bank.as_ref().map_or(0, ConstraintBank::len));
        Ok(Self {
            h,
            store: MessageStore::new(h),
            posterior: vec![0.0; h.n_vars()],
            scratch: vec![0.0; h.n_vars()],
            params,
            bank,
            plan,
        })
    }

    pub fn params(&self) -> &DecoderParams {
        &self.params
    }

    pub fn store(&self) -> &MessageStore {
        &self.store
    }

    pub fn bank(&self) -> Option<&ConstraintBank> {
        self.bank.as_ref()
    }

    pub fn decode(&mut self, channel: &[Llr]) -> Result<DecodeOutput> {
        self.run(channel, None)
    }

    pub fn decode_traced(
        &mut self,
        channel: &[Llr],
        level: TraceLevel,
    ) -> Result<(DecodeOutput, Vec<IterationTrace>)> {
        let mut trace = Vec::new();
        let out = self.run(channel, Some((level, &mut trace)))?;
        Ok((out, trace))
    }

    fn run(
        &mut self,
        channel: &[Llr],
        mut trace: Option<(TraceLevel, &mut Vec<IterationTrace>)>,
    ) -> Result<DecodeOutput> {
        let h = self.h;
        if channel.len() != h.n_vars() {
            return Err(Error::mismatch("channel LLRs", h.n_vars(), channel.len()));
        }
        if let Some(&bad) = channel.iter().find(|x| x.is_nan()) {
            return Err(Error::InvalidParameter(format!("channel LLR {bad} is not a number")));
        }
        let max_llr = self.params.max_llr;
        self.store.load(channel, max_llr);
        self.posterior.copy_from_slice(&self.store.t);
        if let Some(bank) = &mut self.bank {
            bank.reset();
        }

        let mut hard = hard_decisions(&self.store.t);
        let mut converged = false;
        let mut iterations_run = 0;
        for iteration in 1..=self.params.max_iterations {
            match self.params.schedule {
                Schedule::Flooding => self.flooding_iteration(),
                Schedule::Serial => self.serial_iteration(),
            }
            iterations_run = iteration;
            hard = hard_decisions(&self.store.w);
            let weight = h.syndrome_weight(&hard)?;
            converged = weight == 0;
            if let Some((level, trace)) = trace.as_mut() {
                trace.push(IterationTrace {
                    iteration,
                    syndrome_weight: weight,
                    w: self.store.w.clone(),
                    hard_bits: hard.clone(),
                    messages: (*level == TraceLevel::Messages).then(|| self.snapshot()),
                });
            }
            if converged && self.params.early_exit {
                break;
            }
        }
        if iterations_run == 0 {
            self.store.w.copy_from_slice(&self.store.t);
            converged = h.syndrome_weight(&hard)? == 0;
        }

        Ok(DecodeOutput {
            hard_bits: hard,
            soft_out: self.store.w.clone(),
            iterations_run,
            converged,
        })
    }

    fn snapshot(&self) -> MessageSnapshot {
        let (a, b) = self
            .bank
            .as_ref()
            .map(|bank| (bank.a().to_vec(), bank.b().to_vec()))
            .unwrap_or_default();
        MessageSnapshot {
            u: self.store.u.clone(),
            v: self.store.v.clone(),
            a,
            b,
        }
    }

    fn flooding_iteration(&mut self) {
        let h = self.h;
        let max_llr = self.params.max_llr;
        let extra = self.bank.as_ref().map(|bank| {
            self.scratch.fill(0.0);
            bank.add_outputs_to(&mut self.scratch);
            &self.scratch[..]
        });
        variable_to_check(h, &mut self.store, extra, max_llr);
        check_to_variable(h, &mut self.store, self.params.alpha, max_llr);
        if let Some(bank) = &mut self.bank {
            constraint_pass(bank, &self.store, h, max_llr);
        }

        let store = &mut self.store;
        for n in 0..h.n_vars() {
            let mut total = store.t[n];
            for &e in h.col_edges(n) {
                total += store.v[e];
            }
            store.w[n] = total;
        }
        if let Some(bank) = &self.bank {
            bank.add_outputs_to(&mut store.w);
        }
        for w in &mut store.w {
            *w = saturate(*w, max_llr);
        }
    }

    fn serial_iteration(&mut self) {
        let h = self.h;
        let max_llr = self.params.max_llr;
        let alpha = self.params.alpha;
        let store = &mut self.store;
        let post = &mut self.posterior;
        let old = &mut self.scratch;
        for step in &self.plan {
            match *step {
                Step::Check(m) => {
                    let edges = h.row_edges(m);
                    let row = h.row(m);
                    for (e, &n) in edges.clone().zip(row) {
                        store.u[e] = saturate(post[n] - store.v[e], max_llr);
                    }
                    old.clear();
                    old.extend_from_slice(&store.v[edges.clone()]);
                    check_row(&store.u[edges.clone()], &mut store.v[edges.clone()], alpha, max_llr);
                    // Exact running sum, so clipping of u never leaks into P.
                    for ((e, &n), v_old) in edges.zip(row).zip(old.iter()) {
                        post[n] += store.v[e] - v_old;
                    }
                }
                Step::Constraint(i) => {
                    if let Some(bank) = &mut self.bank {
                        bank.update_node(i, post, max_llr);
                    }
                }
            }
        }
        for (w, &p) in store.w.iter_mut().zip(post.iter()) {
            *w = saturate(p, max_llr);
        }
    }
}

/// Interleaves constraint nodes between checks: after check `m` come the
/// nodes `i` with `floor(i * checks / nodes) == m`.
fn serial_plan(checks: usize, nodes: usize) -> Vec<Step> {
    let mut plan = Vec::with_capacity(checks + nodes);
    let mut next = 0;
    for m in 0..checks {
        plan.push(Step::Check(m));
        while next < nodes && next * checks / nodes == m {
            plan.push(Step::Constraint(next));
            next += 1;
        }
    }
    plan.extend((next..nodes).map(Step::Constraint));
    plan
}

/// One-shot decode. A supplied bank is used only when constraint nodes are
/// enabled in `params`; otherwise one is built from `params` if needed.
pub fn decode(
    h: &SparseParityCheckMatrix,
    params: &DecoderParams,
    channel: &[Llr],
    constraints: Option<ConstraintBank>,
) -> Result<DecodeOutput> {
    let mut decoder = match constraints {
        Some(bank) => MinSumDecoder::with_bank(h, params.clone(), Some(bank))?,
        None => MinSumDecoder::new(h, params.clone())?,
    };
    decoder.decode(channel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_update_examples() {
        assert_eq!(var_update(&[1.0, -0.5, 2.0]), 2.5);
        assert_eq!(var_update(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(var_update(&[-3.25]), -3.25);
        assert_eq!(var_update(&[60.0, 60.0]), MAX_LLR);
    }

    #[test]
    fn chk_update_examples() {
        assert_eq!(chk_update(&[2.0, -3.0, 5.0], 1.0), -2.0);
        assert_eq!(chk_update(&[4.0, 4.0], 0.75), 3.0);
        let z = chk_update(&[0.0, -9.0], 1.0);
        assert_eq!(z, 0.0);
        assert!(z.is_sign_positive());
    }

    #[test]
    fn check_row_is_extrinsic_chk_update() {
        let u = [2.0, -3.0, 5.0, -0.5, 7.0];
        let mut v = [0.0; 5];
        check_row(&u, &mut v, 0.75, MAX_LLR);
        for i in 0..u.len() {
            let others: Vec<_> = u.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            assert_eq!(v[i], chk_update(&others, 0.75));
        }
    }

    #[test]
    fn params_validation() {
        let ok = DecoderParams::default();
        assert!(ok.validate(10).is_ok());
        assert!(DecoderParams { alpha: 0.0, ..ok.clone() }.validate(10).is_err());
        assert!(DecoderParams { alpha: 1.2, ..ok.clone() }.validate(10).is_err());
        assert!(DecoderParams { beta: 0.0, ..ok.clone() }.validate(10).is_err());
        assert!(ok.clone().with_constraints(0..11).validate(10).is_err());
        assert!(DecoderParams { constraint_range: 0..4, ..ok.clone() }.validate(10).is_err());
        assert!(ok.with_constraints(2..8).validate(10).is_ok());
    }

    #[test]
    fn serial_plan_covers_everything_once() {
        for (checks, nodes) in [(3, 0), (3, 10), (162, 1564), (5, 2), (0, 4)] {
            let plan = serial_plan(checks, nodes);
            let c: Vec<_> = plan.iter().filter_map(|s| match s { Step::Check(m) => Some(*m), _ => None }).collect();
            let k: Vec<_> = plan.iter().filter_map(|s| match s { Step::Constraint(i) => Some(*i), _ => None }).collect();
            assert_eq!(c, (0..checks).collect::<Vec<_>>());
            assert_eq!(k, (0..nodes).collect::<Vec<_>>());
        }
    }

    #[test]
    fn noiseless_hamming_converges_at_first_iteration() {
        let h = SparseParityCheckMatrix::hamming_7_4();
        for schedule in [Schedule::Flooding, Schedule::Serial] {
            let params = DecoderParams { schedule, ..Default::default() };
            let out = decode(&h, &params, &[10.0; 7], None).unwrap();
            assert_eq!(out.hard_bits, vec![0; 7]);
            assert!(out.converged);
            assert_eq!(out.iterations_run, 1);
        }
    }

    #[test]
    fn rejects_wrong_length() {
        let h = SparseParityCheckMatrix::hamming_7_4();
        assert!(matches!(
            decode(&h, &DecoderParams::default(), &[1.0; 6], None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn extrinsic_variable_messages() {
        let h = SparseParityCheckMatrix::hamming_7_4();
        let mut store = MessageStore::new(&h);
        store.t = vec![1.5, -0.5, 2.0, 0.25, -1.0, 3.0, 0.5];
        for (e, v) in store.v.iter_mut().enumerate() {
            *v = (e as f64 * 0.37).sin();
        }
        variable_to_check(&h, &mut store, None, MAX_LLR);
        let before = store.u.clone();
        for e in 0..h.n_edges() {
            let mut perturbed = store.clone();
            perturbed.v[e] += 5.0;
            variable_to_check(&h, &mut perturbed, None, MAX_LLR);
            assert!((perturbed.u[e] - before[e]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_iterations_returns_channel_decisions() {
        let h = SparseParityCheckMatrix::hamming_7_4();
        let params = DecoderParams { max_iterations: 0, ..Default::default() };
        let out = decode(&h, &params, &[1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0], None).unwrap();
        assert_eq!(out.iterations_run, 0);
        assert_eq!(out.hard_bits, vec![0, 1, 0, 0, 0, 0, 0]);
        assert!(!out.converged);
    }
}
