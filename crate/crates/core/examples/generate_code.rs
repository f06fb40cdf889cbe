//! Builds a regular column-weight-3 code by progressive edge growth, derives
//! its systematic encoder and writes the alist file.
//!
//! Run: `cargo run --release --example generate_code -- [n] [m] [seed] [out.alist]`

use std::time::Instant;

use bliss_ldpc::alist::write_alist;
use bliss_ldpc::construction::{CodeSpec, LdpcCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> bliss_ldpc::error::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: u64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(default);
    let spec = CodeSpec::new(arg(0, 1728) as usize, arg(1, 162) as usize, 3, arg(2, 1));

    let start = Instant::now();
    let (code, seed) = LdpcCode::generate(&spec)?;
    let h = &code.h;
    println!("N = {}, M = {}, K = {}, rate = {:.6}", code.n(), code.m(), code.k(), code.k() as f64 / code.n() as f64);
    println!("seed used {seed}, built in {:.2?}", start.elapsed());
    println!("row weights {}..{}, 4-cycles: {}", h.rows().iter().map(Vec::len).min().unwrap_or(0), h.max_row_weight(), h.has_four_cycle());

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let systematic: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
    let word = code.encoder.encode(&systematic)?;
    println!("random codeword has syndrome weight {}", h.syndrome_weight(&word)?);

    if let Some(path) = args.get(3) {
        write_alist(h, path)?;
        println!("wrote {path}");
    }
    Ok(())
}
