//! Soft-in soft-out detection over the RLL-plus-precoder trellis: LogMap and
//! MaxLog BCJR on a noisy frame, next to Viterbi.
//!
//! Run: `cargo run --example bcjr_siso`

use bliss_ldpc::rll::{precode, rll_encode, PrecoderState, RllCode};
use bliss_ldpc::trellis::{bcjr, build_rll_unipolar_trellis, viterbi, SisoMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> bliss_ldpc::error::Result<()> {
    let code = RllCode::default();
    let trellis = build_rll_unipolar_trellis(&code);
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let user: Vec<u8> = (0..16).map(|_| rng.random_range(0..2)).collect();
    let channel_bits = precode(&rll_encode(&user, &code)?, &mut PrecoderState::default());
    let sigma = 0.8;
    let noise = Normal::new(0.0, sigma).expect("positive sigma");
    let llrs: Vec<f64> = channel_bits
        .iter()
        .map(|&b| 2.0 * (1.0 - 2.0 * f64::from(b) + noise.sample(&mut rng)) / (sigma * sigma))
        .collect();

    // Padding pairs are known zeros.
    let mut prior = vec![0.0; channel_bits.len() / 3 * 2];
    prior[user.len()..].fill(f64::INFINITY);

    let log_map = bcjr(&trellis, &prior, &llrs, SisoMode::LogMap)?;
    let max_log = bcjr(&trellis, &prior, &llrs, SisoMode::MaxLog)?;
    let path = viterbi(&trellis, &prior, &llrs)?;
    println!("bit  sent  LogMap    MaxLog    Viterbi");
    for i in 0..user.len() {
        println!(
            "{i:>3}  {}     {:>8.3}  {:>8.3}  {}",
            user[i], log_map.input_posterior[i], max_log.input_posterior[i], path[i]
        );
    }
    Ok(())
}
