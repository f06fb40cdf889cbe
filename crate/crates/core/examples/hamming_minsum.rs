//! Min-sum decoding of the (7,4) Hamming code next to exhaustive ML decoding.
//!
//! Run: `cargo run --example hamming_minsum`

use bliss_ldpc::matrix::SparseParityCheckMatrix;
use bliss_ldpc::minsum::{DecoderParams, MinSumDecoder, Schedule};
use bliss_ldpc::oracle::{enumerate_codewords, ml_decode};

fn main() -> bliss_ldpc::error::Result<()> {
    let h = SparseParityCheckMatrix::hamming_7_4();
    let codewords = enumerate_codewords(&h);
    println!("{} checks, {} variables, {} codewords", h.n_checks(), h.n_vars(), codewords.len());

    // Codeword 0000000 sent, bit 2 received unreliably on the wrong side.
    let llrs = [2.5, 1.8, -0.9, 3.1, 2.2, 1.4, 2.9];
    let params = DecoderParams {
        alpha: 1.0,
        max_iterations: 20,
        schedule: Schedule::Flooding,
        ..DecoderParams::default()
    };
    let mut decoder = MinSumDecoder::new(&h, params)?;
    let out = decoder.decode(&llrs)?;
    println!("channel   {:?}", llrs);
    println!("min-sum   {:?} after {} iterations", out.hard_bits, out.iterations_run);
    println!("ML        {:?}", ml_decode(&codewords, &llrs));
    println!("soft out  {:?}", out.soft_out);
    Ok(())
}
