//! Flat `key = value` run configuration shared by the command-line driver
//! and the examples.
//!
//! Blank lines and `#` comments are ignored. Unknown keys are errors, and
//! every error names its line. The same keys can be set one at a time with
//! [`RunConfig::set`], which is how command-line flags override a file.

use std::path::{Path, PathBuf};

use crate::construction::{CodeSpec, LdpcCode};
use crate::error::{Error, Result};
use crate::pipeline::SimConfig;

/// Every recognised key with a one-line description, for `--help` output.
pub const KEYS: &[(&str, &str)] = &[
    ("code", "alist file to load instead of generating a code"),
    ("n", "generated code length (default 1728)"),
    ("m", "generated number of checks (default 162)"),
    ("col_weight", "generated column weight (default 3)"),
    ("code_seed", "seed for code construction (default 1)"),
    ("girth", "minimum girth for code construction (default 6)"),
    ("snr", "Eb/N0 points in dB: a list `4,4.5,5` or a range `start:step:stop`"),
    ("frames", "maximum frames per SNR point"),
    ("target_errors", "stop a point at this many bit errors in the weaker arm, 0 = never"),
    ("seed", "simulation seed; all randomness derives from it"),
    ("alpha", "check node scaling factor in (0, 1]"),
    ("beta", "constraint node scaling factor in (0, 1]"),
    ("iters", "decoder iterations"),
    ("schedule", "flooding or serial"),
    ("early_exit", "stop decoding once the syndrome is zero (on/off)"),
    ("max_llr", "LLR saturation magnitude"),
    ("constraints", "use constraint nodes in single-frame decoding (on/off)"),
    ("frontend", "genie or bliss"),
    ("out", "output directory"),
];

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSource {
    Generate(CodeSpec),
    Alist(PathBuf),
}

impl CodeSource {
    /// Builds or loads the code. Returns the code and, for generated codes,
    /// the seed that produced a full-rank matrix.
    pub fn load(&self) -> Result<(LdpcCode, Option<u64>)> {
        match self {
            CodeSource::Generate(spec) => {
                let (code, seed) = LdpcCode::generate(spec)?;
                Ok((code, Some(seed)))
            }
            CodeSource::Alist(path) => {
                let h = crate::alist::read_alist(path)?;
                Ok((LdpcCode::from_matrix(&h)?, None))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub code: CodeSource,
    pub sim: SimConfig,
    /// Constraint nodes on or off for single-frame decoding. Sweeps always
    /// run both arms.
    pub constraints: bool,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            code: CodeSource::Generate(CodeSpec::short_code(1)),
            sim: SimConfig::default(),
            constraints: true,
            out: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, format!("expected key = value, got {line:?}")))?;
            config
                .set(key.trim(), value.trim())
                .map_err(|e| Error::parse(i + 1, e.to_string()))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn spec_mut(&mut self) -> &mut CodeSpec {
        if let CodeSource::Alist(_) = self.code {
            self.code = CodeSource::Generate(CodeSpec::short_code(1));
        }
        match &mut self.code {
            CodeSource::Generate(spec) => spec,
            CodeSource::Alist(_) => unreachable!(),
        }
    }

    /// Sets one key. Setting any construction key switches back to a
    /// generated code.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let sim = &mut self.sim;
        match key {
            "code" => self.code = CodeSource::Alist(PathBuf::from(value)),
            "n" => self.spec_mut().n = number(key, value)?,
            "m" => self.spec_mut().m = number(key, value)?,
            "col_weight" => self.spec_mut().col_weight = number(key, value)?,
            "code_seed" => self.spec_mut().seed = number(key, value)?,
            "girth" => self.spec_mut().target_girth = number(key, value)?,
            "snr" => sim.snr_db = parse_snr_grid(value)?,
            "frames" => sim.frames_per_point = number(key, value)?,
            "target_errors" => sim.target_errors = number(key, value)?,
            "seed" => sim.seed = number(key, value)?,
            "alpha" => sim.decoder.alpha = number(key, value)?,
            "beta" => sim.decoder.beta = number(key, value)?,
            "iters" => sim.decoder.max_iterations = number(key, value)?,
            "schedule" => sim.decoder.schedule = value.parse()?,
            "early_exit" => sim.decoder.early_exit = switch(key, value)?,
            "max_llr" => sim.decoder.max_llr = number(key, value)?,
            "constraints" => self.constraints = switch(key, value)?,
            "frontend" => sim.front_end = value.parse()?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(Error::InvalidParameter(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad value {value:?} for {key}")))
}

fn switch(key: &str, value: &str) -> Result<bool> {
    match value {
        "on" | "true" | "1" | "yes" => Ok(true),
        "off" | "false" | "0" | "no" => Ok(false),
        _ => Err(Error::InvalidParameter(format!("bad value {value:?} for {key}, expected on or off"))),
    }
}

/// Parses `4,4.5,5` or `start:step:stop` (inclusive). An empty string is an
/// empty grid.
pub fn parse_snr_grid(value: &str) -> Result<Vec<f64>> {
    let value = value.trim();
    if value.is_empty() {
        return Ok(Vec::new());
    }
    if let [start, step, stop] = value.split(':').collect::<Vec<_>>()[..] {
        let (start, step, stop): (f64, f64, f64) =
            (number("snr", start)?, number("snr", step)?, number("snr", stop)?);
        if step.is_nan() || step <= 0.0 {
            return Err(Error::InvalidParameter("SNR step must be positive".into()));
        }
        let count = ((stop - start) / step + 1e-9).floor();
        if count < 0.0 {
            return Ok(Vec::new());
        }
        // Rounding keeps `4.2:0.1:4.6` from printing as 4.6000000000000005.
        return Ok((0..=count as usize)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect());
    }
    value.split(',').map(|s| number("snr", s.trim())).collect()
}
