//! Bliss-scheme frames and the paired Monte Carlo BER sweep.
//!
//! Encoding: user bits are RLL encoded and precoded into the systematic
//! channel bits, LDPC parity is computed over those unipolar bits, and the
//! parity is itself RLL encoded and precoded. The receiver feeds the
//! systematic LLRs straight to the LDPC decoder and recovers parity LLRs with
//! a BCJR pass over the RLL trellis.
//!
//! Each frame is decoded twice from the same LLRs, once with plain min-sum and
//! once with constraint nodes, so the two BER curves share their noise.

use std::fmt::Write as _;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::constraint::count_violations;
use crate::construction::LdpcCode;
use crate::error::{Error, Result};
use crate::llr::{hard_decision, saturate, Llr};
use crate::minsum::{DecoderParams, MinSumDecoder};
use crate::rll::{inverse_precode, precode, rll_decode, rll_encode, PrecoderState, RllCode, INPUT_BITS};
use crate::trellis::{bcjr, build_rll_unipolar_trellis, SisoMode, Trellis};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontEnd {
    /// Parity bits are sent uncoded; every LLR is `2y / sigma^2`.
    Genie,
    /// Parity bits are RLL encoded and recovered by BCJR.
    FullBliss,
}

impl std::str::FromStr for FrontEnd {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "genie" => Ok(FrontEnd::Genie),
            "bliss" | "full" | "fullbliss" => Ok(FrontEnd::FullBliss),
            other => Err(Error::InvalidParameter(format!(
                "unknown front end {other:?} (expected genie or bliss)"
            ))),
        }
    }
}

/// Sizes of the pieces of a frame for one LDPC code and RLL code.
///
/// LDPC codeword layout: `[systematic channel bits | filler | parity]`. The
/// filler pads the systematic part when `K` is not a multiple of three; it is
/// all zeros, not transmitted, and known to the receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlissLayout {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub systematic_span: usize,
    pub filler: usize,
    pub user_bits: usize,
    /// LDPC parity bits rounded up to whole RLL input pairs.
    pub parity_rll_inputs: usize,
    pub parity_channel_bits: usize,
}

impl BlissLayout {
    pub fn new(code: &LdpcCode, rll: &RllCode) -> Result<Self> {
        let (n, k, m) = (code.n(), code.k(), code.m());
        let systematic_span = k / 3 * 3;
        let user_bits = rll.user_len(systematic_span).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "systematic part of {k} bits cannot hold an RLL frame"
            ))
        })?;
        let parity_rll_inputs = m.div_ceil(INPUT_BITS) * INPUT_BITS;
        Ok(Self {
            n,
            k,
            m,
            systematic_span,
            filler: k - systematic_span,
            user_bits,
            parity_rll_inputs,
            parity_channel_bits: rll.encoded_len(parity_rll_inputs),
        })
    }

    /// Positions covered by constraint nodes.
    pub fn constraint_span(&self) -> Range<usize> {
        0..self.systematic_span
    }

    pub fn transmitted_len(&self, front_end: FrontEnd) -> usize {
        self.systematic_span
            + match front_end {
                FrontEnd::Genie => self.m,
                FrontEnd::FullBliss => self.parity_channel_bits,
            }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlissFrame {
    pub user_bits: Vec<u8>,
    /// Unipolar, precoded, `systematic_span` long.
    pub systematic_channel_bits: Vec<u8>,
    pub ldpc_parity_bits: Vec<u8>,
    /// Unipolar, RLL encoded and precoded parity.
    pub parity_channel_bits: Vec<u8>,
    /// Full LDPC codeword in systematic layout.
    pub codeword: Vec<u8>,
}

impl BlissFrame {
    /// Bits put on the channel, in order.
    pub fn transmitted_bits(&self, front_end: FrontEnd) -> Vec<u8> {
        let parity = match front_end {
            FrontEnd::Genie => &self.ldpc_parity_bits,
            FrontEnd::FullBliss => &self.parity_channel_bits,
        };
        let mut bits = self.systematic_channel_bits.clone();
        bits.extend_from_slice(parity);
        bits
    }
}

/// Encodes one frame of `layout.user_bits` user bits.
pub fn bliss_encode(
    user_bits: &[u8],
    code: &LdpcCode,
    rll: &RllCode,
    layout: &BlissLayout,
) -> Result<BlissFrame> {
    if user_bits.len() != layout.user_bits {
        return Err(Error::mismatch("Bliss user bits", layout.user_bits, user_bits.len()));
    }
    let systematic_channel_bits = precode(&rll_encode(user_bits, rll)?, &mut PrecoderState::default());
    let mut systematic = systematic_channel_bits.clone();
    systematic.resize(layout.k, 0);
    let codeword = code.encoder.encode(&systematic)?;
    let ldpc_parity_bits = codeword[layout.k..].to_vec();

    let mut parity_input = ldpc_parity_bits.clone();
    parity_input.resize(layout.parity_rll_inputs, 0);
    let parity_channel_bits = precode(&rll_encode(&parity_input, rll)?, &mut PrecoderState::default());

    Ok(BlissFrame {
        user_bits: user_bits.to_vec(),
        systematic_channel_bits,
        ldpc_parity_bits,
        parity_channel_bits,
        codeword,
    })
}

/// BPSK over AWGN: bit `b` becomes `1 - 2b` plus `N(0, sigma^2)` noise.
pub fn transmit_awgn<R: Rng + ?Sized>(bits: &[u8], sigma: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise sigma must be >= 0, got {sigma}")));
    }
    Ok(bits
        .iter()
        .map(|&b| {
            let symbol = 1.0 - 2.0 * f64::from(b & 1);
            if sigma == 0.0 {
                symbol
            } else {
                let z: f64 = StandardNormal.sample(rng);
                symbol + sigma * z
            }
        })
        .collect())
}

/// Per-bit channel LLR `2y / sigma^2`, saturated at `max_llr`.
pub fn channel_llr(sample: f64, sigma: f64, max_llr: Llr) -> Llr {
    saturate(2.0 * sample / (sigma * sigma), max_llr)
}

/// Receiver: turns channel samples into one LLR per LDPC codeword bit.
#[derive(Debug, Clone)]
pub struct FrontEndDecoder {
    layout: BlissLayout,
    trellis: Trellis,
    max_llr: Llr,
}

impl FrontEndDecoder {
    pub fn new(layout: BlissLayout, rll: &RllCode, max_llr: Llr) -> Self {
        Self {
            layout,
            trellis: build_rll_unipolar_trellis(rll),
            max_llr,
        }
    }

    pub fn layout(&self) -> &BlissLayout {
        &self.layout
    }

    pub fn receive(&self, samples: &[f64], sigma: f64, mode: FrontEnd) -> Result<Vec<Llr>> {
        let layout = &self.layout;
        let expected = layout.transmitted_len(mode);
        if samples.len() != expected {
            return Err(Error::mismatch("received samples", expected, samples.len()));
        }
        let max = self.max_llr;
        let (systematic, parity) = samples.split_at(layout.systematic_span);

        let mut llrs = Vec::with_capacity(layout.n);
        llrs.extend(systematic.iter().map(|&y| channel_llr(y, sigma, max)));
        llrs.extend(std::iter::repeat_n(max, layout.filler));
        match mode {
            FrontEnd::Genie => llrs.extend(parity.iter().map(|&y| channel_llr(y, sigma, max))),
            FrontEnd::FullBliss => {
                // Unsaturated into the detector; only its posteriors are clipped.
                let channel: Vec<Llr> = parity.iter().map(|&y| 2.0 * y / (sigma * sigma)).collect();
                // Known zeros: the odd-length pad bit and the termination pairs.
                let mut prior = vec![0.0; channel.len() / 3 * 2];
                prior[layout.m..].fill(f64::INFINITY);
                let siso = bcjr(&self.trellis, &prior, &channel, SisoMode::LogMap)?;
                llrs.extend(siso.input_posterior[..layout.m].iter().map(|&l| saturate(l, max)));
            }
        }
        Ok(llrs)
    }
}

/// One-shot front end; see [`FrontEndDecoder`].
pub fn receive_front_end(
    samples: &[f64],
    layout: &BlissLayout,
    rll: &RllCode,
    mode: FrontEnd,
    sigma: f64,
    max_llr: Llr,
) -> Result<Vec<Llr>> {
    FrontEndDecoder::new(layout.clone(), rll, max_llr).receive(samples, sigma, mode)
}

/// Recovers user bits from decoded LDPC hard decisions.
pub fn bliss_user_bits(hard_bits: &[u8], layout: &BlissLayout, rll: &RllCode) -> Result<Vec<u8>> {
    if hard_bits.len() < layout.systematic_span {
        return Err(Error::mismatch("decoded bits", layout.n, hard_bits.len()));
    }
    let diff = inverse_precode(&hard_bits[..layout.systematic_span], 0);
    rll_decode(&diff, rll)
}

/// Noise standard deviation for `Eb/N0` in dB at code rate `rate`, with unit
/// symbol energy.
pub fn sigma_for_ebn0(ebn0_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Eb/N0 points in dB, with Eb taken at the LDPC code rate.
    pub snr_db: Vec<f64>,
    /// Maximum frames per point.
    pub frames_per_point: usize,
    /// Stop a point once the weaker arm (the one with more bit errors)
    /// reaches this many; 0 runs every frame.
    pub target_errors: u64,
    /// Shared decoder settings; the constraint flag is set per arm.
    pub decoder: DecoderParams,
    pub seed: u64,
    pub front_end: FrontEnd,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![4.0, 4.5, 5.0],
            frames_per_point: 1000,
            target_errors: 100,
            decoder: DecoderParams::default(),
            seed: 1,
            front_end: FrontEnd::Genie,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("SNR points must be finite".into()));
        }
        self.decoder.clone().without_constraints().validate(usize::MAX)
    }
}

/// Counts accumulated over the frames of one SNR point. Errors are counted on
/// the systematic channel bits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub sigma: f64,
    pub frames: u64,
    /// Bits compared per arm.
    pub bits: u64,
    pub raw_errors: u64,
    pub plain_errors: u64,
    pub constrained_errors: u64,
    pub plain_frame_errors: u64,
    pub constrained_frame_errors: u64,
    /// d-constraint violations left in the decoded systematic bits.
    pub plain_violations: u64,
    pub constrained_violations: u64,
    /// Sums of the per-frame error difference (plain minus constrained) and of its square.
    pub diff_sum: i64,
    pub diff_sq_sum: u64,
}

impl BerRecord {
    fn ratio(errors: u64, bits: u64) -> f64 {
        if bits == 0 {
            0.0
        } else {
            errors as f64 / bits as f64
        }
    }

    pub fn ber_raw(&self) -> f64 {
        Self::ratio(self.raw_errors, self.bits)
    }

    pub fn ber_plain(&self) -> f64 {
        Self::ratio(self.plain_errors, self.bits)
    }

    pub fn ber_constrained(&self) -> f64 {
        Self::ratio(self.constrained_errors, self.bits)
    }

    /// BER gain of the constrained arm (plain minus constrained).
    pub fn ber_difference(&self) -> f64 {
        Self::ratio(self.plain_errors, self.bits) - Self::ratio(self.constrained_errors, self.bits)
    }

    /// 95% normal half-width of the paired BER difference.
    pub fn ci_halfwidth(&self) -> f64 {
        if self.frames < 2 || self.bits == 0 {
            return 0.0;
        }
        let f = self.frames as f64;
        let mean = self.diff_sum as f64 / f;
        let var = ((self.diff_sq_sum as f64 - f * mean * mean) / (f - 1.0)).max(0.0);
        let bits_per_frame = self.bits as f64 / f;
        1.96 * (var / f).sqrt() / bits_per_frame
    }

    /// `Q(1 / sigma)`, the raw BER the channel should produce.
    pub fn raw_ber_theory(&self) -> f64 {
        if self.sigma == 0.0 {
            0.0
        } else {
            q_function(1.0 / self.sigma)
        }
    }

    /// Binomial standard error of the raw BER around its theoretical value.
    pub fn raw_std_error(&self) -> f64 {
        let p = self.raw_ber_theory();
        if self.bits == 0 {
            0.0
        } else {
            (p * (1.0 - p) / self.bits as f64).sqrt()
        }
    }

    fn absorb(&mut self, f: &FrameOutcome) {
        self.frames += 1;
        self.bits += f.bits;
        self.raw_errors += f.raw_errors;
        self.plain_errors += f.plain_errors;
        self.constrained_errors += f.constrained_errors;
        self.plain_frame_errors += u64::from(f.plain_errors > 0);
        self.constrained_frame_errors += u64::from(f.constrained_errors > 0);
        self.plain_violations += f.plain_violations;
        self.constrained_violations += f.constrained_violations;
        let d = f.plain_errors as i64 - f.constrained_errors as i64;
        self.diff_sum += d;
        self.diff_sq_sum += (d * d) as u64;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrameOutcome {
    pub bits: u64,
    pub raw_errors: u64,
    pub plain_errors: u64,
    pub constrained_errors: u64,
    pub plain_violations: u64,
    pub constrained_violations: u64,
}

/// Everything needed to simulate frames for one code.
#[derive(Debug, Clone)]
pub struct BlissSimulator<'a> {
    code: &'a LdpcCode,
    rll: &'a RllCode,
    front: FrontEndDecoder,
    plain: DecoderParams,
    constrained: DecoderParams,
}

/// Frames simulated between stopping-rule checks.
const BATCH: usize = 256;

impl<'a> BlissSimulator<'a> {
    pub fn new(code: &'a LdpcCode, rll: &'a RllCode, decoder: &DecoderParams) -> Result<Self> {
        let layout = BlissLayout::new(code, rll)?;
        let plain = decoder.clone().without_constraints();
        let constrained = decoder.clone().with_constraints(layout.constraint_span());
        constrained.validate(code.n())?;
        Ok(Self {
            code,
            rll,
            front: FrontEndDecoder::new(layout, rll, decoder.max_llr),
            plain,
            constrained,
        })
    }

    pub fn layout(&self) -> &BlissLayout {
        self.front.layout()
    }

    pub fn decoders(&self) -> Result<(MinSumDecoder<'a>, MinSumDecoder<'a>)> {
        Ok((
            MinSumDecoder::new(&self.code.h, self.plain.clone())?,
            MinSumDecoder::new(&self.code.h, self.constrained.clone())?,
        ))
    }

    /// Deterministic generator for frame `frame` of point `point`.
    pub fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((point as u64) << 40 | frame);
        rng
    }

    /// Encodes random user bits, sends them and returns the frame with the
    /// receiver's LDPC input LLRs.
    pub fn draw_frame<R: Rng>(&self, rng: &mut R, sigma: f64, mode: FrontEnd) -> Result<(BlissFrame, Vec<Llr>)> {
        let layout = self.layout();
        let user: Vec<u8> = (0..layout.user_bits).map(|_| rng.random_range(0..2u8)).collect();
        let frame = bliss_encode(&user, self.code, self.rll, layout)?;
        let samples = transmit_awgn(&frame.transmitted_bits(mode), sigma, rng)?;
        let llrs = self.front.receive(&samples, sigma, mode)?;
        Ok((frame, llrs))
    }

    /// Simulates one frame through both decoders.
    pub fn run_frame<R: Rng>(
        &self,
        rng: &mut R,
        sigma: f64,
        mode: FrontEnd,
        plain: &mut MinSumDecoder<'_>,
        constrained: &mut MinSumDecoder<'_>,
    ) -> Result<FrameOutcome> {
        let (frame, llrs) = self.draw_frame(rng, sigma, mode)?;
        let span = self.layout().constraint_span();
        let truth = &frame.systematic_channel_bits;
        let errors = |bits: &mut dyn Iterator<Item = u8>| {
            bits.zip(truth).filter(|(a, b)| a != *b).count() as u64
        };

        let raw_errors = errors(&mut llrs[span.clone()].iter().map(|&l| hard_decision(l)));
        let p = plain.decode(&llrs)?;
        let c = constrained.decode(&llrs)?;
        Ok(FrameOutcome {
            bits: span.len() as u64,
            raw_errors,
            plain_errors: errors(&mut p.hard_bits[span.clone()].iter().copied()),
            constrained_errors: errors(&mut c.hard_bits[span.clone()].iter().copied()),
            plain_violations: count_violations(&p.hard_bits, span.clone()) as u64,
            constrained_violations: count_violations(&c.hard_bits, span) as u64,
        })
    }

    /// Runs one SNR point. Frames are processed in fixed batches so the
    /// stopping rule, and hence the result, does not depend on thread count.
    pub fn run_point(&self, config: &SimConfig, point: usize) -> Result<BerRecord> {
        let snr_db = config.snr_db[point];
        let sigma = sigma_for_ebn0(snr_db, self.code.k() as f64 / self.code.n() as f64);
        let mut record = BerRecord {
            snr_db,
            sigma,
            ..Default::default()
        };
        let total = config.frames_per_point as u64;
        let mut next = 0u64;
        while next < total {
            let end = (next + BATCH as u64).min(total);
            let outcomes: Vec<FrameOutcome> = (next..end)
                .into_par_iter()
                .map_init(
                    || self.decoders(),
                    |decoders, frame| {
                        let (plain, constrained) = decoders.as_mut().map_err(|e| Error::InvalidParameter(e.to_string()))?;
                        let mut rng = Self::frame_rng(config.seed, point, frame);
                        self.run_frame(&mut rng, sigma, config.front_end, plain, constrained)
                    },
                )
                .collect::<Result<_>>()?;
            outcomes.iter().for_each(|f| record.absorb(f));
            next = end;
            if config.target_errors > 0
                && record.plain_errors.max(record.constrained_errors) >= config.target_errors
            {
                break;
            }
        }
        Ok(record)
    }
}

/// Runs every SNR point of `config`.
pub fn run_sweep(config: &SimConfig, code: &LdpcCode, rll: &RllCode) -> Result<Vec<BerRecord>> {
    config.validate()?;
    let sim = BlissSimulator::new(code, rll, &config.decoder)?;
    (0..config.snr_db.len())
        .map(|point| sim.run_point(config, point))
        .collect()
}

pub const CSV_HEADER: &str =
    "snr_db,ber_raw,ber_plain,ber_constrained,frames,bit_errors_plain,bit_errors_constrained,ci_halfwidth";

pub fn to_csv(records: &[BerRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{:e},{},{},{},{:e}",
            r.snr_db,
            r.ber_raw(),
            r.ber_plain(),
            r.ber_constrained(),
            r.frames,
            r.plain_errors,
            r.constrained_errors,
            r.ci_halfwidth()
        );
    }
    out
}

/// Whitespace table for gnuplot: `snr raw plain constrained`.
pub fn to_plot_table(records: &[BerRecord]) -> String {
    let mut out = String::from("# snr_db ber_raw ber_plain ber_constrained\n");
    for r in records {
        let _ = writeln!(
            out,
            "{} {:e} {:e} {:e}",
            r.snr_db,
            r.ber_raw(),
            r.ber_plain(),
            r.ber_constrained()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::CodeSpec;

    fn small() -> (LdpcCode, RllCode) {
        let (code, _) = LdpcCode::generate(&CodeSpec::new(204, 48, 3, 5)).unwrap();
        (code, RllCode::default())
    }

    #[test]
    fn layout_sizes() {
        let (code, rll) = small();
        let layout = BlissLayout::new(&code, &rll).unwrap();
        assert_eq!(layout.k, 156);
        assert_eq!(layout.systematic_span, 156);
        assert_eq!(layout.filler, 0);
        assert_eq!(layout.user_bits, 100);
        assert_eq!(layout.parity_channel_bits, (24 + 2) * 3);
        assert_eq!(layout.systematic_span + layout.filler + layout.m, layout.n);
    }

    #[test]
    fn encode_rejects_wrong_size() {
        let (code, rll) = small();
        let layout = BlissLayout::new(&code, &rll).unwrap();
        match bliss_encode(&[0; 10], &code, &rll, &layout) {
            Err(Error::DimensionMismatch { expected, .. }) => assert_eq!(expected, 100),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn all_zero_user_bits_are_deterministic() {
        let (code, rll) = small();
        let layout = BlissLayout::new(&code, &rll).unwrap();
        let a = bliss_encode(&[0; 100], &code, &rll, &layout).unwrap();
        let b = bliss_encode(&[0; 100], &code, &rll, &layout).unwrap();
        assert_eq!(a, b);
        let expected = precode(&rll_encode(&[0; 100], &rll).unwrap(), &mut PrecoderState::default());
        assert_eq!(a.systematic_channel_bits, expected);
        assert!(code.h.is_codeword(&a.codeword).unwrap());
    }

    #[test]
    fn noiseless_samples_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(transmit_awgn(&[0, 1, 1], 0.0, &mut rng).unwrap(), vec![1.0, -1.0, -1.0]);
        assert!(transmit_awgn(&[0], -1.0, &mut rng).is_err());
    }

    #[test]
    fn genie_llr_magnitude() {
        let (code, rll) = small();
        let layout = BlissLayout::new(&code, &rll).unwrap();
        let sigma = 0.8;
        let samples: Vec<f64> = (0..layout.transmitted_len(FrontEnd::Genie))
            .map(|i| if i % 3 == 0 { -1.0 } else { 1.0 })
            .collect();
        let llrs = receive_front_end(&samples, &layout, &rll, FrontEnd::Genie, sigma, 64.0).unwrap();
        for l in llrs {
            assert!((l.abs() - 2.0 / (sigma * sigma)).abs() < 1e-12);
        }
        assert!(receive_front_end(&samples[1..], &layout, &rll, FrontEnd::Genie, sigma, 64.0).is_err());
    }

    #[test]
    fn noiseless_chain_round_trip_both_modes() {
        let (code, rll) = small();
        let sim = BlissSimulator::new(&code, &rll, &DecoderParams::default()).unwrap();
        let (mut plain, mut constrained) = sim.decoders().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for mode in [FrontEnd::Genie, FrontEnd::FullBliss] {
            let (frame, llrs) = sim.draw_frame(&mut rng, 0.0, mode).unwrap();
            for dec in [&mut plain, &mut constrained] {
                let out = dec.decode(&llrs).unwrap();
                assert_eq!(out.hard_bits, frame.codeword);
                assert_eq!(bliss_user_bits(&out.hard_bits, sim.layout(), &rll).unwrap(), frame.user_bits);
            }
        }
    }

    #[test]
    fn zero_frames_gives_empty_record() {
        let (code, rll) = small();
        let config = SimConfig {
            snr_db: vec![3.0],
            frames_per_point: 0,
            ..Default::default()
        };
        let records = run_sweep(&config, &code, &rll).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].frames, 0);
        assert_eq!(records[0].ber_plain(), 0.0);
    }

    #[test]
    fn empty_grid_gives_header_only_csv() {
        let (code, rll) = small();
        let config = SimConfig {
            snr_db: vec![],
            ..Default::default()
        };
        let records = run_sweep(&config, &code, &rll).unwrap();
        assert_eq!(to_csv(&records), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn sweep_is_reproducible() {
        let (code, rll) = small();
        let config = SimConfig {
            snr_db: vec![3.0, 4.0],
            frames_per_point: 300,
            target_errors: 50,
            ..Default::default()
        };
        let a = run_sweep(&config, &code, &rll).unwrap();
        let b = run_sweep(&config, &code, &rll).unwrap();
        assert_eq!(a, b);
        assert!(a[0].frames > 0);
    }

    #[test]
    fn q_function_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-15);
        assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-12);
        assert!((q_function(3.0) - 1.349_898_031_630_094_6e-3).abs() < 1e-15);
    }

    #[test]
    fn sigma_from_ebn0() {
        // Rate 1/2 at 0 dB gives unit noise variance.
        assert!((sigma_for_ebn0(0.0, 0.5) - 1.0).abs() < 1e-12);
    }
}
