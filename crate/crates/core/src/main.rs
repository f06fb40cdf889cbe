use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bliss_ldpc::alist::{read_alist, to_alist};
use bliss_ldpc::config::{RunConfig, KEYS};
use bliss_ldpc::construction::LdpcCode;
use bliss_ldpc::error::{Error, Result};
use bliss_ldpc::llr::Llr;
use bliss_ldpc::matrix::SparseParityCheckMatrix;
use bliss_ldpc::minsum::{MinSumDecoder, TraceLevel};
use bliss_ldpc::oracle::run_selftest;
use bliss_ldpc::pipeline::{run_sweep, to_csv, to_plot_table};
use bliss_ldpc::rll::RllCode;

#[derive(Parser)]
#[command(name = "bliss", version, about = "LDPC min-sum decoding with d=1 constraint nodes", after_help = key_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write its alist and encoder description.
    Gencode(Common),
    /// Decode one vector of channel LLRs (whitespace separated).
    DecodeOne {
        llr_file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a paired BER sweep and write ber.csv and ber.dat.
    Sweep(Common),
    /// Run the brute-force oracle suites.
    Selftest(Common),
}

/// Options shared by every subcommand. Flags override `--set`, which
/// overrides the config file.
#[derive(Args)]
struct Common {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Any configuration key, as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// alist file holding the parity-check matrix.
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Eb/N0 grid in dB: `4,4.5` or `start:step:stop`.
    #[arg(long, allow_hyphen_values = true)]
    snr: Option<String>,
    #[arg(long)]
    frames: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    iters: Option<String>,
    /// flooding or serial.
    #[arg(long)]
    schedule: Option<String>,
    /// on or off.
    #[arg(long)]
    constraints: Option<String>,
    /// genie or bliss.
    #[arg(long)]
    frontend: Option<String>,
    /// Dump a, b, u and v messages after every iteration.
    #[arg(long)]
    trace: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

fn key_help() -> String {
    let mut text = String::from("Configuration keys (file lines `key = value`, or --set key=value):\n");
    for (key, doc) in KEYS {
        text.push_str(&format!("  {key:<14} {doc}\n"));
    }
    text
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        for pair in &self.set {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("--set expects KEY=VALUE, got {pair:?}")))?;
            config.set(key.trim(), value.trim())?;
        }
        let flags = [
            ("code", &self.code),
            ("seed", &self.seed),
            ("snr", &self.snr),
            ("frames", &self.frames),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("iters", &self.iters),
            ("schedule", &self.schedule),
            ("constraints", &self.constraints),
            ("frontend", &self.frontend),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                config.set(key, value)?;
            }
        }
        Ok(config)
    }
}

fn gencode(config: &RunConfig) -> Result<()> {
    let (code, seed) = config.code.load()?;
    let (n, m) = (code.n(), code.m());
    fs::create_dir_all(&config.out)?;
    let stem = match seed {
        Some(seed) => format!("code_{n}_{m}_s{seed}"),
        None => format!("code_{n}_{m}"),
    };
    let alist = config.out.join(format!("{stem}.alist"));
    let sidecar = config.out.join(format!("{stem}.enc"));
    fs::write(&alist, to_alist(&code.h))?;
    fs::write(&sidecar, code.encoder.to_sidecar())?;
    println!("N {n}");
    println!("M {m}");
    println!("K {}", code.k());
    println!("rate {}", code.k() as f64 / n as f64);
    println!("girth>=6 {}", if code.h.has_four_cycle() { "no" } else { "yes" });
    if let Some(seed) = seed {
        println!("seed {seed}");
    }
    println!("wrote {} and {}", alist.display(), sidecar.display());
    Ok(())
}

fn read_llrs(path: &Path) -> Result<Vec<Llr>> {
    let text = fs::read_to_string(path)?;
    let mut llrs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for token in line.split('#').next().unwrap_or("").split_whitespace() {
            llrs.push(
                token
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("{}:{}: bad LLR {token:?}", path.display(), i + 1)))?,
            );
        }
    }
    Ok(llrs)
}

fn format_values(values: &[Llr]) -> String {
    values.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
}

fn decode_one(config: &RunConfig, llr_file: &Path, trace: bool) -> Result<()> {
    // The matrix is decoded in the column order of the file. Constraint nodes
    // cover the first K positions, which is where gencode puts the
    // systematic bits.
    let h: SparseParityCheckMatrix = match &config.code {
        bliss_ldpc::config::CodeSource::Alist(path) => read_alist(path)?,
        source => source.load()?.0.h,
    };
    let span = 0..LdpcCode::from_matrix(&h)?.k();
    let mut params = config.sim.decoder.clone();
    params = if config.constraints { params.with_constraints(span) } else { params.without_constraints() };

    let llrs = read_llrs(llr_file)?;
    let mut decoder = MinSumDecoder::new(&h, params)?;
    let level = if trace { TraceLevel::Messages } else { TraceLevel::Summary };
    let (out, iterations) = decoder.decode_traced(&llrs, level)?;
    for it in &iterations {
        println!("iteration {} syndrome_weight {}", it.iteration, it.syndrome_weight);
        if let Some(msgs) = &it.messages {
            println!("  u {}", format_values(&msgs.u));
            println!("  v {}", format_values(&msgs.v));
            let flat = |m: &[[Llr; 3]]| format_values(&m.iter().flatten().copied().collect::<Vec<_>>());
            println!("  a {}", flat(&msgs.a));
            println!("  b {}", flat(&msgs.b));
            println!("  w {}", format_values(&it.w));
        }
    }
    println!("iterations {}", out.iterations_run);
    println!("converged {}", u8::from(out.converged));
    println!("bits {}", out.hard_bits.iter().map(|b| char::from(b'0' + b)).collect::<String>());
    Ok(())
}

fn sweep(config: &RunConfig) -> Result<()> {
    let (code, _) = config.code.load()?;
    let records = run_sweep(&config.sim, &code, &RllCode::default())?;
    fs::create_dir_all(&config.out)?;
    let csv = to_csv(&records);
    fs::write(config.out.join("ber.csv"), &csv)?;
    fs::write(config.out.join("ber.dat"), to_plot_table(&records))?;
    print!("{csv}");
    Ok(())
}

fn selftest(config: &RunConfig) -> Result<bool> {
    let results = run_selftest(config.sim.seed)?;
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    Ok(results.iter().all(|r| r.passed))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gencode(common) => gencode(&common.resolve()?).map(|()| true),
        Command::DecodeOne { llr_file, common } => {
            decode_one(&common.resolve()?, &llr_file, common.trace).map(|()| true)
        }
        Command::Sweep(common) => sweep(&common.resolve()?).map(|()| true),
        Command::Selftest(common) => selftest(&common.resolve()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
