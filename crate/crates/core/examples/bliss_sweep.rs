//! Paired BER sweep of plain and constrained min-sum on the short Bliss code.
//!
//! Usage: `cargo run --release --example bliss_sweep -- [frames] [snr...]`

use std::time::Instant;

use bliss_ldpc::construction::{CodeSpec, LdpcCode};
use bliss_ldpc::pipeline::{run_sweep, to_csv, FrontEnd, SimConfig};
use bliss_ldpc::rll::RllCode;

fn main() -> bliss_ldpc::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let frames = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let snr: Vec<f64> = args.filter_map(|s| s.parse().ok()).collect();
    let (code, seed) = LdpcCode::generate(&CodeSpec::short_code(1))?;
    eprintln!("code N={} K={} (seed {seed})", code.n(), code.k());
    let rll = RllCode::default();
    for front_end in [FrontEnd::Genie, FrontEnd::FullBliss] {
        let config = SimConfig {
            snr_db: if snr.is_empty() { vec![4.0, 4.5, 5.0] } else { snr.clone() },
            frames_per_point: frames,
            target_errors: 0,
            front_end,
            ..SimConfig::default()
        };
        let start = Instant::now();
        let records = run_sweep(&config, &code, &rll)?;
        eprintln!("{front_end:?}: {:.2?}", start.elapsed());
        print!("{}", to_csv(&records));
    }
    Ok(())
}
