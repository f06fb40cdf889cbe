//! Message-level trace of a small decode with constraint nodes: a noisy
//! codeword of a toy code whose systematic bits hold a planted 010 pattern.
//!
//! Run: `cargo run --example decode_trace`

use bliss_ldpc::construction::{CodeSpec, LdpcCode};
use bliss_ldpc::llr::from_bit;
use bliss_ldpc::minsum::{DecoderParams, MinSumDecoder, TraceLevel};

fn main() -> bliss_ldpc::error::Result<()> {
    let (code, _) = LdpcCode::generate(&CodeSpec {
        target_girth: 4,
        ..CodeSpec::new(12, 6, 3, 1)
    })?;
    // Systematic bits 000111, sent cleanly except bit 1, which arrives weakly as a 1.
    let word = code.encoder.encode(&[0, 0, 0, 1, 1, 1])?;
    let mut llrs: Vec<f64> = word.iter().map(|&b| from_bit(b, 4.0)).collect();
    llrs[1] = -1.0;

    let params = DecoderParams {
        max_iterations: 3,
        early_exit: false,
        ..DecoderParams::default()
    }
    .with_constraints(0..code.k());
    let mut decoder = MinSumDecoder::new(&code.h, params)?;
    let (out, trace) = decoder.decode_traced(&llrs, TraceLevel::Messages)?;
    println!("sent     {word:?}");
    for it in &trace {
        let msgs = it.messages.as_ref().expect("message trace");
        println!("iteration {} syndrome weight {}", it.iteration, it.syndrome_weight);
        for (i, (a, b)) in msgs.a.iter().zip(&msgs.b).enumerate() {
            println!("  node {i}: a = {a:+.3?}  b = {b:+.3?}");
        }
        println!("  w = {:+.3?}", it.w);
    }
    println!("decoded  {:?}", out.hard_bits);
    Ok(())
}
