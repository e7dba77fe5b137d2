//! Monte Carlo WER/BER estimation.
//!
//! Trial `t` at SNR `s` draws everything (message, noise) from a generator
//! seeded by `(master_seed, s, t)`. Trials are decoded in parallel batches
//! but accumulated in trial order, and the stopping rule is evaluated in
//! that order, so a record does not depend on the thread count. Every
//! decoder sees the same noise realizations at a given SNR.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admm::{L2BoxParams, PenalizedParams};
use crate::channel::{self, ChannelParams};
use crate::code::{self, BinaryWord, GeneratorMatrix, ParityCheckMatrix};
use crate::decoder::DecoderConfig;
use crate::error::{Error, Result};

/// Seed of the built-in (3,6)-regular length-96 test code.
pub const REGULAR96_SEED: u64 = 96;

pub const DEFAULT_STOP_WORD_ERRORS: usize = 200;
pub const DEFAULT_MAX_TRIALS: usize = 10_000_000;

/// Built-in codes addressable by name instead of an alist path.
pub const REGISTRY: &[(&str, &str)] = &[
    ("regular96", "(3,6)-regular, N=96, 4-cycle free"),
    ("regular2640", "(3,6)-regular, N=2640, M=1320"),
    ("single-check3", "one parity check over three bits"),
];

/// Loads a code from the registry or, failing that, from an alist file.
pub fn load_code(code_ref: &str) -> Result<ParityCheckMatrix> {
    match code_ref {
        "regular96" => code::regular_code(96, 3, 6, REGULAR96_SEED),
        "regular2640" => code::regular_code(2640, 3, 6, 2640),
        "single-check3" => ParityCheckMatrix::from_rows(3, vec![vec![0, 1, 2]]),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io { path: path.to_string(), msg: e.to_string() })?;
            code::parse_alist(&text)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmitMode {
    AllZero,
    RandomCodeword,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub code_ref: String,
    pub decoder: DecoderConfig,
    pub snr_points: Vec<f64>,
    pub stop_word_errors: usize,
    pub max_trials: usize,
    pub transmit_mode: TransmitMode,
    pub master_seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(code_ref: impl Into<String>, decoder: DecoderConfig, snr_points: Vec<f64>) -> Self {
        Self {
            code_ref: code_ref.into(),
            decoder,
            snr_points,
            stop_word_errors: DEFAULT_STOP_WORD_ERRORS,
            max_trials: DEFAULT_MAX_TRIALS,
            transmit_mode: TransmitMode::AllZero,
            master_seed: 0,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stop_word_errors == 0 {
            return Err(Error::InvalidParams("stop_word_errors must be at least 1".into()));
        }
        if self.snr_points.is_empty() {
            return Err(Error::InvalidParams("no SNR points given".into()));
        }
        if let Some(s) = self.snr_points.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidParams(format!("SNR point {s} is not finite")));
        }
        if self.max_trials < self.stop_word_errors {
            return Err(Error::InvalidParams(format!(
                "max_trials ({}) is below stop_word_errors ({})",
                self.max_trials, self.stop_word_errors
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParams("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// One row of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub decoder: String,
    pub code: String,
    pub snr_db: f64,
    pub alpha: Option<f64>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub trials: usize,
    pub word_errors: usize,
    pub bit_errors: usize,
    pub wer: f64,
    pub wer_ci_low: f64,
    pub wer_ci_high: f64,
    pub ber: f64,
    pub avg_iterations: f64,
    pub avg_decode_seconds: f64,
    pub seed: u64,
    /// Set when the point could not be run (e.g. invalid parameters).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRecord {
    fn labelled(decoder: &DecoderConfig, code: &str, snr_db: f64, seed: u64) -> Self {
        let (alpha, mu1, mu2) = match decoder {
            DecoderConfig::L2box(p) => (None, Some(p.mu1), Some(p.mu2)),
            DecoderConfig::Penalized(p) => (Some(p.alpha), Some(p.mu), None),
            DecoderConfig::Mp(_) => (None, None, None),
        };
        Self {
            decoder: decoder.kind().to_string(),
            code: code.to_string(),
            snr_db,
            alpha,
            mu1,
            mu2,
            trials: 0,
            word_errors: 0,
            bit_errors: 0,
            wer: 0.0,
            wer_ci_low: 0.0,
            wer_ci_high: 1.0,
            ber: 0.0,
            avg_iterations: 0.0,
            avg_decode_seconds: 0.0,
            seed,
            error: None,
        }
    }

    /// Copy with the wall-clock field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        Self { avg_decode_seconds: 0.0, ..self.clone() }
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// 95% Wilson score interval for `errors` successes in `trials`.
pub fn wilson_interval(errors: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.96;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if errors == 0 { 0.0 } else { (centre - half).clamp(0.0, p) };
    let high = if errors == trials { 1.0 } else { (centre + half).clamp(p, 1.0) };
    (low, high)
}

struct TrialOutcome {
    word_error: bool,
    bit_errors: usize,
    iterations: usize,
    seconds: f64,
}

/// A loaded code plus the spec that drives it.
pub struct Experiment {
    spec: ExperimentSpec,
    code: ParityCheckMatrix,
    generator: GeneratorMatrix,
    pool: Option<rayon::ThreadPool>,
}

impl Experiment {
    pub fn new(spec: ExperimentSpec) -> Result<Self> {
        let code = load_code(&spec.code_ref)?;
        Self::with_code(spec, code)
    }

    /// Uses an already loaded code; `spec.code_ref` only labels the output.
    pub fn with_code(spec: ExperimentSpec, code: ParityCheckMatrix) -> Result<Self> {
        spec.validate()?;
        let generator = code::derive_generator(&code);
        if generator.k() == 0 {
            return Err(Error::InvalidMatrix("code has no nonzero codewords (k = 0)".into()));
        }
        let pool = spec
            .threads
            .map(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build())
            .transpose()
            .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
        Ok(Self { spec, code, generator, pool })
    }

    pub fn spec(&self) -> &ExperimentSpec {
        &self.spec
    }

    pub fn code(&self) -> &ParityCheckMatrix {
        &self.code
    }

    pub fn rate(&self) -> f64 {
        self.generator.k() as f64 / self.code.n_vars() as f64
    }

    fn trial(&self, decoder: &DecoderConfig, channel: &ChannelParams, stream: u64, t: u64) -> Result<TrialOutcome> {
        let mut rng = channel::stream_rng(self.spec.master_seed, stream, t);
        let sent = match self.spec.transmit_mode {
            TransmitMode::AllZero => BinaryWord::zeros(self.code.n_vars()),
            TransmitMode::RandomCodeword => {
                let msg: Vec<u8> = (0..self.generator.k()).map(|_| rng.random_range(0..2u8)).collect();
                code::encode(&self.generator, &msg)?
            }
        };
        let y = channel::add_awgn(&channel::modulate_bpsk(&sent), channel, &mut rng);
        let gamma = channel::llr_awgn(&y, channel)?;
        let r = decoder.decode(&self.code, &gamma)?;
        let bit_errors = r.word.distance(&sent);
        Ok(TrialOutcome { word_error: bit_errors > 0, bit_errors, iterations: r.iterations, seconds: r.wall_time })
    }

    /// Runs one (decoder, SNR) point until `stop_word_errors` word errors or
    /// `max_trials` trials. Invalid decoder parameters are returned as errors.
    pub fn run_point(&self, decoder: &DecoderConfig, snr_db: f64) -> Result<SweepRecord> {
        decoder.validate(&self.code)?;
        let channel = ChannelParams::new(snr_db, self.rate())?;
        let stream = snr_db.to_bits();
        let spec = &self.spec;
        let workers = self.pool.as_ref().map_or_else(rayon::current_num_threads, |p| p.current_num_threads());
        let batch = (64 * workers).max(256);

        let mut rec = SweepRecord::labelled(decoder, &spec.code_ref, snr_db, spec.master_seed);
        let (mut iters, mut seconds) = (0usize, 0.0f64);
        let mut next = 0usize;
        'outer: while next < spec.max_trials {
            let end = (next + batch).min(spec.max_trials);
            let run = || {
                (next..end)
                    .into_par_iter()
                    .map(|t| self.trial(decoder, &channel, stream, t as u64))
                    .collect::<Result<Vec<_>>>()
            };
            let outcomes = match &self.pool {
                Some(p) => p.install(run)?,
                None => run()?,
            };
            for o in outcomes {
                rec.trials += 1;
                rec.word_errors += usize::from(o.word_error);
                rec.bit_errors += o.bit_errors;
                iters += o.iterations;
                seconds += o.seconds;
                if rec.word_errors >= spec.stop_word_errors {
                    break 'outer;
                }
            }
            next = end;
        }
        let n = rec.trials as f64;
        rec.wer = rec.word_errors as f64 / n;
        rec.ber = rec.bit_errors as f64 / (n * self.code.n_vars() as f64);
        (rec.wer_ci_low, rec.wer_ci_high) = wilson_interval(rec.word_errors, rec.trials);
        rec.avg_iterations = iters as f64 / n;
        rec.avg_decode_seconds = seconds / n;
        Ok(rec)
    }

    /// Like [`Self::run_point`], but parameter errors become failed records.
    fn run_or_mark(&self, decoder: &DecoderConfig, snr_db: f64) -> Result<SweepRecord> {
        match self.run_point(decoder, snr_db) {
            Err(Error::InvalidParams(msg)) => {
                let mut rec = SweepRecord::labelled(decoder, &self.spec.code_ref, snr_db, self.spec.master_seed);
                rec.error = Some(msg);
                Ok(rec)
            }
            other => other,
        }
    }

    /// One record per SNR point with the spec's decoder.
    pub fn sweep_snr(&self) -> Result<Vec<SweepRecord>> {
        self.spec.snr_points.iter().map(|&s| self.run_point(&self.spec.decoder, s)).collect()
    }

    /// Penalized decoder at the first SNR point, one record per `alpha`.
    /// Other penalized parameters come from the spec's decoder when it is
    /// penalized, otherwise from the defaults.
    pub fn sweep_alpha(&self, alpha_grid: &[f64]) -> Result<Vec<SweepRecord>> {
        let base = match self.spec.decoder {
            DecoderConfig::Penalized(p) => p,
            _ => PenalizedParams::default(),
        };
        let snr = self.spec.snr_points[0];
        alpha_grid
            .iter()
            .map(|&alpha| self.run_or_mark(&DecoderConfig::Penalized(PenalizedParams { alpha, ..base }), snr))
            .collect()
    }

    /// l2-box decoder at the first SNR point over the `mu1 x mu2` grid,
    /// row-major in `mu1`.
    pub fn sweep_mu(&self, mu1_grid: &[f64], mu2_grid: &[f64]) -> Result<Vec<SweepRecord>> {
        let base = match self.spec.decoder {
            DecoderConfig::L2box(p) => p,
            _ => L2BoxParams::default(),
        };
        let snr = self.spec.snr_points[0];
        let mut out = Vec::with_capacity(mu1_grid.len() * mu2_grid.len());
        for &mu1 in mu1_grid {
            for &mu2 in mu2_grid {
                out.push(self.run_or_mark(&DecoderConfig::L2box(L2BoxParams { mu1, mu2, ..base }), snr)?);
            }
        }
        Ok(out)
    }
}

pub const CSV_HEADER: &str = "decoder,code,snr_db,alpha,mu1,mu2,trials,word_errors,bit_errors,wer,wer_ci_low,wer_ci_high,ber,avg_iterations,avg_decode_seconds,seed";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_csv<W: Write>(mut out: W, records: &[SweepRecord]) -> std::io::Result<()> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.decoder),
            csv_field(&r.code),
            r.snr_db,
            opt(r.alpha),
            opt(r.mu1),
            opt(r.mu2),
            r.trials,
            r.word_errors,
            r.bit_errors,
            r.wer,
            r.wer_ci_low,
            r.wer_ci_high,
            r.ber,
            r.avg_iterations,
            r.avg_decode_seconds,
            r.seed
        )?;
    }
    Ok(())
}

/// Version string embedded in result metadata.
pub fn version_string() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultMetadata {
    pub version: String,
    pub spec: ExperimentSpec,
    /// Which sweep produced the records and its grid, if any.
    #[serde(default)]
    pub sweep: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub metadata: ResultMetadata,
    pub records: Vec<SweepRecord>,
}

pub fn write_json<W: Write>(out: W, file: &ResultFile) -> std::io::Result<()> {
    serde_json::to_writer_pretty(out, file).map_err(std::io::Error::other)
}

pub fn save(path: &Path, json: bool, file: &ResultFile) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), msg: e.to_string() };
    let f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    if json {
        write_json(f, file).map_err(io)
    } else {
        write_csv(f, &file.records).map_err(io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::DecoderKind;

    #[test]
    fn wilson_examples() {
        assert_eq!(wilson_interval(0, 100).0, 0.0);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
        // closed form: half-width = 1.96 sqrt(0.25/100 + 1.96^2/40000) / (1 + 1.96^2/100)
        let half = 1.96 * (0.0025f64 + 1.96 * 1.96 / 40000.0).sqrt() / (1.0 + 1.96 * 1.96 / 100.0);
        assert!(((hi - lo) - 2.0 * half).abs() < 1e-12);
        assert!((hi - lo - 0.19).abs() < 0.005);
        assert_eq!(wilson_interval(200, 200).1, 1.0);
        for (e, n) in [(1, 7), (3, 1000), (999, 1000)] {
            let (lo, hi) = wilson_interval(e, n);
            let p = e as f64 / n as f64;
            assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
    }

    #[test]
    fn spec_validation() {
        let d = DecoderConfig::default_for(DecoderKind::Bp);
        let mut s = ExperimentSpec::new("regular96", d, vec![]);
        assert!(s.validate().is_err());
        s.snr_points = vec![1.0];
        assert!(s.validate().is_ok());
        s.max_trials = 10;
        assert!(s.validate().is_err());
        s.max_trials = 1000;
        s.stop_word_errors = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn registry_and_missing_file() {
        assert_eq!(load_code("regular96").unwrap().n_vars(), 96);
        assert!(matches!(load_code("/nonexistent/code.alist"), Err(Error::Io { .. })));
    }

    #[test]
    fn csv_layout() {
        let d = DecoderConfig::default_for(DecoderKind::Penalized);
        let rec = SweepRecord::labelled(&d, "regular96", 1.5, 7);
        let mut buf = Vec::new();
        write_csv(&mut buf, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("penalized,regular96,1.5,3,5,,0,0,0,0,0,1,0,0,0,7"));
    }
}
