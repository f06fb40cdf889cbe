//! The rate-2/3 (d=1, k=7) RLL code with its 1T precoder: encode, check the
//! run lengths, undo both steps.
//!
//! Run: `cargo run --example rll_chain`

use bliss_ldpc::constraint::count_violations;
use bliss_ldpc::rll::{inverse_precode, precode, rll_decode, rll_encode, PrecoderState, RllCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| char::from(b'0' + b)).collect()
}

fn main() -> bliss_ldpc::error::Result<()> {
    let code = RllCode::default();
    println!(
        "{} states, d = {}, k = {}, decoder window {} codewords, {} padding pairs",
        code.n_states(),
        code.d(),
        code.k(),
        code.window(),
        code.padding_pairs()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let user: Vec<u8> = (0..24).map(|_| rng.random_range(0..2)).collect();
    let nrzi = rll_encode(&user, &code)?;
    let channel = precode(&nrzi, &mut PrecoderState::default());
    println!("user     {}", bits(&user));
    println!("rll      {}", bits(&nrzi));
    println!("precoded {}  (010/101 patterns: {})", bits(&channel), count_violations(&channel, 0..channel.len()));

    let back = rll_decode(&inverse_precode(&channel, 0), &code)?;
    println!("decoded  {}  round trip {}", bits(&back), if back == user { "ok" } else { "FAILED" });
    Ok(())
}
