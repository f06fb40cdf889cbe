//! d=1 run-length constraint nodes.
//!
//! A constraint node centred on variable `n` watches the hard decisions of
//! `n - 1, n, n + 1` and forbids the patterns `010` and `101`. It receives one
//! message `a` per arm and answers with one message `b` per arm, each output
//! computed only from the other two arms.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::llr::{saturate, sign_bit, Llr};

/// Number of variables joined by a d=1 constraint node (`d + 2`).
pub const NODE_DEGREE: usize = 3;

/// Which variable of the triple an output message is addressed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arm {
    /// Variable `n - 1`; inputs are the centre and right arms.
    Left = 0,
    /// Variable `n`; inputs are the left and right arms.
    Center = 1,
    /// Variable `n + 1`; inputs are the left and centre arms.
    Right = 2,
}

impl Arm {
    pub const ALL: [Arm; 3] = [Arm::Left, Arm::Center, Arm::Right];

    /// Position offset relative to the node centre.
    pub fn offset(self) -> isize {
        self as isize - 1
    }

    /// The two arms whose inputs drive this arm's output, in argument order.
    pub fn inputs(self) -> (Arm, Arm) {
        match self {
            Arm::Left => (Arm::Center, Arm::Right),
            Arm::Center => (Arm::Left, Arm::Right),
            Arm::Right => (Arm::Left, Arm::Center),
        }
    }
}

/// Output function of a constraint node arm.
///
/// The magnitude is `beta * min(|x|, |y|)` when the two hard decisions leave
/// the addressed bit as the only way to avoid a forbidden pattern, zero
/// otherwise; any erased input gives zero.
///
/// * `Center(left, right)`: outer bits agree, so the centre must agree too.
/// * `Left(center, right)`: centre differs from right, so the left bit must
///   match the centre.
/// * `Right(left, center)`: left differs from centre, so the right bit must
///   match the centre.
#[inline]
pub fn co(arm: Arm, x: Llr, y: Llr, beta: f64) -> Llr {
    if x == 0.0 || y == 0.0 {
        return 0.0;
    }
    let agree = sign_bit(x) == sign_bit(y);
    let towards = match arm {
        Arm::Center if agree => x,
        Arm::Left if !agree => x,
        Arm::Right if !agree => y,
        _ => return 0.0,
    };
    let magnitude = beta * x.abs().min(y.abs());
    if magnitude == 0.0 {
        0.0
    } else {
        magnitude.copysign(towards)
    }
}

/// Message state of all constraint nodes over one systematic span.
#[derive(Debug, Clone)]
pub struct ConstraintBank {
    centers: Vec<usize>,
    beta: f64,
    a: Vec<[Llr; NODE_DEGREE]>,
    b: Vec<[Llr; NODE_DEGREE]>,
    incoming: Vec<Llr>,
}

impl ConstraintBank {
    /// One node per position whose two neighbours also lie inside `span`.
    pub fn over_span(span: Range<usize>, beta: f64) -> Result<Self> {
        let centers = if span.len() >= NODE_DEGREE {
            (span.start + 1..span.end - 1).collect()
        } else {
            Vec::new()
        };
        Self::with_centers(centers, beta)
    }

    pub fn with_centers(centers: Vec<usize>, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "constraint scaling factor must lie in (0, 1], got {beta}"
            )));
        }
        if centers.contains(&0) {
            return Err(Error::InvalidParameter(
                "a constraint node cannot be centred on variable 0".into(),
            ));
        }
        let len = centers.len();
        Ok(Self {
            centers,
            beta,
            a: vec![[0.0; NODE_DEGREE]; len],
            b: vec![[0.0; NODE_DEGREE]; len],
            incoming: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Messages into each node, `[left, center, right]`.
    pub fn a(&self) -> &[[Llr; NODE_DEGREE]] {
        &self.a
    }

    /// Messages out of each node, `[left, center, right]`.
    pub fn b(&self) -> &[[Llr; NODE_DEGREE]] {
        &self.b
    }

    /// Largest variable index touched by any node, plus one.
    pub fn required_vars(&self) -> usize {
        self.centers.iter().map(|&c| c + 2).max().unwrap_or(0)
    }

    pub fn reset(&mut self) {
        self.a.iter_mut().for_each(|x| *x = [0.0; NODE_DEGREE]);
        self.b.iter_mut().for_each(|x| *x = [0.0; NODE_DEGREE]);
    }

    /// Adds every node's current output to the variable it is addressed to.
    pub fn add_outputs_to(&self, totals: &mut [Llr]) {
        for (&c, b) in self.centers.iter().zip(&self.b) {
            totals[c - 1] += b[0];
            totals[c] += b[1];
            totals[c + 1] += b[2];
        }
    }

    /// Updates every node at once from `base[n] = t_n + sum of check messages`.
    ///
    /// Each arm input excludes the output this node last sent on that arm but
    /// includes the outputs of neighbouring nodes.
    pub fn flood_pass(&mut self, base: &[Llr], max_llr: Llr) {
        let mut incoming = std::mem::take(&mut self.incoming);
        incoming.clear();
        incoming.resize(base.len(), 0.0);
        self.add_outputs_to(&mut incoming);

        for i in 0..self.centers.len() {
            let c = self.centers[i];
            let mut a = [0.0; NODE_DEGREE];
            for (j, slot) in a.iter_mut().enumerate() {
                let n = c + j - 1;
                *slot = saturate(base[n] + (incoming[n] - self.b[i][j]), max_llr);
            }
            self.a[i] = a;
            self.b[i] = node_outputs(&a, self.beta, max_llr);
        }
        self.incoming = incoming;
    }

    /// Serial update of node `i` against running posteriors, which include
    /// this node's previous outputs. Posteriors are refreshed in place.
    pub fn update_node(&mut self, i: usize, posterior: &mut [Llr], max_llr: Llr) {
        let c = self.centers[i];
        let mut a = [0.0; NODE_DEGREE];
        for (j, slot) in a.iter_mut().enumerate() {
            *slot = saturate(posterior[c + j - 1] - self.b[i][j], max_llr);
        }
        let b = node_outputs(&a, self.beta, max_llr);
        for j in 0..NODE_DEGREE {
            posterior[c + j - 1] += b[j] - self.b[i][j];
        }
        self.a[i] = a;
        self.b[i] = b;
    }
}

fn node_outputs(a: &[Llr; NODE_DEGREE], beta: f64, max_llr: Llr) -> [Llr; NODE_DEGREE] {
    let mut out = [0.0; NODE_DEGREE];
    for arm in Arm::ALL {
        let (x, y) = arm.inputs();
        out[arm as usize] = saturate(co(arm, a[x as usize], a[y as usize], beta), max_llr);
    }
    out
}

/// Number of positions `n` with `n - 1`, `n`, `n + 1` inside `span` where the
/// hard decisions form `010` or `101`.
pub fn count_violations(bits: &[u8], span: Range<usize>) -> usize {
    let end = span.end.min(bits.len());
    if end < span.start + NODE_DEGREE {
        return 0;
    }
    bits[span.start..end]
        .windows(NODE_DEGREE)
        .filter(|w| w[0] != w[1] && w[1] != w[2])
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit_llr(bit: u8) -> Llr {
        if bit == 0 {
            9.0
        } else {
            -9.0
        }
    }

    #[test]
    fn co_examples() {
        assert_eq!(co(Arm::Center, 3.0, 5.0, 1.0), 3.0);
        assert_eq!(co(Arm::Right, 2.0, -7.0, 1.0), -2.0);
        assert_eq!(co(Arm::Center, 0.0, -4.0, 1.0), 0.0);
        assert_eq!(co(Arm::Left, 2.0, -7.0, 1.0), 2.0);
    }

    /// Brute force over the eight hard triples: an arm output is nonzero
    /// exactly when fixing the other two bits leaves one forbidden value for
    /// the addressed bit, and then it points at the allowed value.
    #[test]
    fn sign_rules_match_pattern_enumeration() {
        let forbidden = |t: [u8; 3]| t[0] != t[1] && t[1] != t[2];
        for arm in Arm::ALL {
            let (xa, ya) = arm.inputs();
            for x in 0..2u8 {
                for y in 0..2u8 {
                    let mut bad = Vec::new();
                    for v in 0..2u8 {
                        let mut t = [0u8; 3];
                        t[xa as usize] = x;
                        t[ya as usize] = y;
                        t[arm as usize] = v;
                        if forbidden(t) {
                            bad.push(v);
                        }
                    }
                    let out = co(arm, bit_llr(x), bit_llr(y), 1.0);
                    match bad.as_slice() {
                        [] => assert_eq!(out, 0.0, "{arm:?} {x}{y}"),
                        [v] => assert_eq!(sign_bit(out), 1 - v, "{arm:?} {x}{y}"),
                        _ => unreachable!(),
                    }
                }
            }
        }
    }

    #[test]
    fn erasure_and_scaling() {
        for arm in Arm::ALL {
            assert_eq!(co(arm, 0.0, -3.0, 0.75), 0.0);
            assert_eq!(co(arm, 3.0, 0.0, 0.75), 0.0);
        }
        assert_eq!(co(Arm::Center, -4.0, -8.0, 0.75), -3.0);
    }

    #[test]
    fn lone_triple_flood_pass() {
        let mut bank = ConstraintBank::over_span(0..3, 1.0).unwrap();
        assert_eq!(bank.centers(), &[1]);
        bank.flood_pass(&[5.0, 5.0, 5.0], 64.0);
        assert_eq!(bank.a()[0], [5.0, 5.0, 5.0]);
        assert_eq!(bank.b()[0], [0.0, 5.0, 0.0]);

        bank.reset();
        bank.flood_pass(&[5.0, -5.0, 5.0], 64.0);
        assert_eq!(bank.b()[0], [-5.0, 5.0, -5.0]);

        bank.reset();
        bank.flood_pass(&[5.0, 0.0, -5.0], 64.0);
        assert_eq!(bank.b()[0][0], 0.0);
        assert_eq!(bank.b()[0][2], 0.0);
    }

    #[test]
    fn serial_update_matches_flood_on_single_node() {
        let t = [3.0, -1.5, 4.0];
        let mut flood = ConstraintBank::over_span(0..3, 0.75).unwrap();
        flood.flood_pass(&t, 64.0);
        let mut serial = ConstraintBank::over_span(0..3, 0.75).unwrap();
        let mut post = t;
        serial.update_node(0, &mut post, 64.0);
        assert_eq!(flood.b(), serial.b());
        for j in 0..3 {
            assert_eq!(post[j], t[j] + serial.b()[0][j]);
        }
    }

    #[test]
    fn span_boundaries() {
        let bank = ConstraintBank::over_span(4..10, 0.5).unwrap();
        assert_eq!(bank.centers(), &[5, 6, 7, 8]);
        assert_eq!(bank.required_vars(), 10);
        assert!(ConstraintBank::over_span(0..2, 0.5).unwrap().is_empty());
        assert!(ConstraintBank::over_span(0..5, 0.0).is_err());
        assert!(ConstraintBank::over_span(0..5, 1.5).is_err());
    }

    #[test]
    fn violation_counts() {
        assert_eq!(count_violations(&[0, 0, 1, 1, 0, 0], 0..6), 0);
        assert_eq!(count_violations(&[0, 1, 0], 0..3), 1);
        assert_eq!(count_violations(&[0, 1, 0, 1, 0], 0..5), 3);
        assert_eq!(count_violations(&[0, 1, 0, 1, 0], 1..5), 2);
        assert_eq!(count_violations(&[0, 1], 0..2), 0);
    }
}
