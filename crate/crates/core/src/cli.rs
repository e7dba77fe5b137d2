//! Command-line front end.
//!
//! Exit codes: 0 success (or valid codeword), 1 decoded word is not a
//! codeword, 2 usage or configuration error, 3 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::admm::{self, TraceWriter};
use crate::code;
use crate::decoder::{DecoderConfig, DecoderKind};
use crate::error::Error;
use crate::harness::{self, Experiment, ExperimentSpec, ResultFile, ResultMetadata, SweepRecord, TransmitMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_WORD: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "l2box", version, about = "LDPC decoding workbench", args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print dimensions, rank and degree profile of a code.
    Info {
        /// alist file or built-in code name
        #[arg(long)]
        code: String,
        /// key=value file whose keys mirror the flags
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Decode one LLR vector.
    Decode(DecodeArgs),
    /// Run a Monte Carlo experiment.
    Simulate(SimulateArgs),
    /// Write a code (typically a built-in one) as an alist file.
    Export {
        #[arg(long)]
        code: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecoderArg {
    L2box,
    Penalized,
    Bp,
    Minsum,
    Normminsum,
}

impl From<DecoderArg> for DecoderKind {
    fn from(d: DecoderArg) -> Self {
        match d {
            DecoderArg::L2box => DecoderKind::L2box,
            DecoderArg::Penalized => DecoderKind::Penalized,
            DecoderArg::Bp => DecoderKind::Bp,
            DecoderArg::Minsum => DecoderKind::Minsum,
            DecoderArg::Normminsum => DecoderKind::Normminsum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransmitArg {
    Zero,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    Snr,
    Alpha,
    Mu,
}

/// Decoder selection and parameter overrides shared by `decode` and `simulate`.
#[derive(Debug, Clone, Args)]
pub struct DecoderFlags {
    #[arg(long, value_enum, default_value = "l2box")]
    pub decoder: DecoderArg,
    /// penalty weight (penalized)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// mu1 (l2box) or the single mu (penalized); a grid for `--sweep mu`
    #[arg(long)]
    pub mu1: Option<String>,
    /// mu2 (l2box); a grid for `--sweep mu`
    #[arg(long)]
    pub mu2: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,
    /// scale factor of normalized min-sum
    #[arg(long)]
    pub normalization: Option<f64>,
    /// stop the ADMM decoders as soon as the hard decision is a codeword
    #[arg(long = "early-exit", value_name = "BOOL")]
    pub early_exit: Option<bool>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub code: String,
    /// LLR file (whitespace-separated reals) or an inline comma/space separated list
    #[arg(long, allow_hyphen_values = true)]
    pub llr: String,
    #[command(flatten)]
    pub decoder: DecoderFlags,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// write a per-iteration residual trace (l2box only)
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub code: String,
    #[command(flatten)]
    pub decoder: DecoderFlags,
    /// SNR points in dB: a value, a comma list, or start:step:stop
    #[arg(long, allow_hyphen_values = true, default_value = "1:0.5:3")]
    pub snr: String,
    #[arg(long, value_enum, default_value = "snr")]
    pub sweep: SweepArg,
    /// alpha grid for `--sweep alpha`
    #[arg(long, default_value = "0.25:0.25:5")]
    pub grid: String,
    /// word errors after which a point stops
    #[arg(long, default_value_t = harness::DEFAULT_STOP_WORD_ERRORS)]
    pub errors: usize,
    /// trial cap per point
    #[arg(long, default_value_t = harness::DEFAULT_MAX_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "zero")]
    pub transmit: TransmitArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, msg: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Io { .. }) { EXIT_IO } else { EXIT_USAGE };
        Self { code, msg: e.to_string() }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError { code: EXIT_IO, msg: format!("{}: {e}", path.display()) }
}

/// Parses `start:step:stop` (inclusive), a comma list, or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if step.is_nan() || step <= 0.0 || b < a {
                return Err(format!("range '{s}' needs step > 0 and start <= stop"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        [single] => single.split(',').filter(|t| !t.trim().is_empty()).map(num).collect(),
        _ => Err(format!("cannot parse grid '{s}'")),
    }
}

/// Parses the inline form of `--llr` or falls back to reading a file.
fn read_llrs(arg: &str) -> Result<Vec<f64>, CliError> {
    let inline: Option<Vec<f64>> =
        arg.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(|t| t.parse().ok()).collect();
    if let Some(v) = inline.filter(|v| !v.is_empty()) {
        return Ok(v);
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    text.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| CliError::usage(format!("{arg}: '{t}' is not a real number"))))
        .collect()
}

fn single(v: &Option<String>, name: &str) -> Result<Option<f64>, CliError> {
    match v {
        None => Ok(None),
        Some(s) => s.trim().parse().map(Some).map_err(|_| CliError::usage(format!("--{name} expects a number, got '{s}'"))),
    }
}

fn build_decoder(f: &DecoderFlags) -> Result<DecoderConfig, CliError> {
    let mut cfg = DecoderConfig::default_for(f.decoder.into());
    let (mu1, mu2) = (single(&f.mu1, "mu1")?, single(&f.mu2, "mu2")?);
    match &mut cfg {
        DecoderConfig::L2box(p) => {
            p.mu1 = mu1.unwrap_or(p.mu1);
            p.mu2 = mu2.unwrap_or(p.mu2);
            p.epsilon = f.epsilon.unwrap_or(p.epsilon);
            p.max_iters = f.max_iters.unwrap_or(p.max_iters);
            p.early_exit_on_codeword = f.early_exit.unwrap_or(p.early_exit_on_codeword);
        }
        DecoderConfig::Penalized(p) => {
            p.alpha = f.alpha.unwrap_or(p.alpha);
            p.mu = mu1.unwrap_or(p.mu);
            p.epsilon = f.epsilon.unwrap_or(p.epsilon);
            p.max_iters = f.max_iters.unwrap_or(p.max_iters);
            p.early_exit_on_codeword = f.early_exit.unwrap_or(p.early_exit_on_codeword);
        }
        DecoderConfig::Mp(p) => {
            p.max_iters = f.max_iters.unwrap_or(p.max_iters);
            p.normalization = f.normalization.unwrap_or(p.normalization);
        }
    }
    Ok(cfg)
}

/// Loads `--code`. A reference that names neither a built-in code nor an
/// existing file is a configuration mistake (exit 2), not an I/O failure.
fn load_code(code_ref: &str) -> Result<code::ParityCheckMatrix, CliError> {
    harness::load_code(code_ref).map_err(|e| {
        let mut err = CliError::from(e);
        if !Path::new(code_ref).exists() {
            err.code = EXIT_USAGE;
        }
        err
    })
}

fn cmd_info(code_ref: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let h = load_code(code_ref)?;
    let rank = h.rank();
    let profile = |degs: Vec<usize>| {
        let mut hist = std::collections::BTreeMap::new();
        for d in degs {
            *hist.entry(d).or_insert(0usize) += 1;
        }
        hist.iter().map(|(d, c)| format!("{d}:{c}")).collect::<Vec<_>>().join(" ")
    };
    let w = |e: std::io::Error| CliError { code: EXIT_IO, msg: e.to_string() };
    writeln!(out, "N={} M={} rank={} k={}", h.n_vars(), h.n_checks(), rank, h.n_vars() - rank).map_err(w)?;
    writeln!(out, "variable degrees {}", profile(h.cols().iter().map(Vec::len).collect())).map_err(w)?;
    writeln!(out, "check degrees {}", profile(h.rows().iter().map(Vec::len).collect())).map_err(w)?;
    Ok(EXIT_OK)
}

fn cmd_export(code_ref: &str, dest: Option<&Path>, out: &mut dyn Write) -> Result<i32, CliError> {
    let h = load_code(code_ref)?;
    let text = code::emit_alist(&h);
    match dest {
        Some(p) => std::fs::write(p, text).map_err(io_err(p))?,
        None => out.write_all(text.as_bytes()).map_err(|e| CliError { code: EXIT_IO, msg: e.to_string() })?,
    }
    Ok(EXIT_OK)
}

fn cmd_decode(a: &DecodeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let h = load_code(&a.code)?;
    let gamma = read_llrs(&a.llr)?;
    let cfg = build_decoder(&a.decoder)?;
    let result = match (&cfg, &a.trace) {
        (DecoderConfig::L2box(p), Some(path)) => {
            let f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err(path))?);
            let mut tw = TraceWriter::new(f, &gamma).map_err(io_err(path))?;
            let r = admm::l2box_decode_observed(&h, &gamma, p, None, |s| tw.record(s))?;
            tw.finish().map_err(io_err(path))?;
            r
        }
        (_, Some(_)) => return Err(CliError::usage("--trace is only available for the l2box decoder")),
        _ => cfg.decode(&h, &gamma)?,
    };
    let w = |e: std::io::Error| CliError { code: EXIT_IO, msg: e.to_string() };
    match a.format {
        FormatArg::Json => {
            let doc = json!({ "config": cfg, "code": a.code, "result": result });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable")).map_err(w)?;
        }
        FormatArg::Csv => {
            writeln!(out, "decoder={}", cfg.kind()).map_err(w)?;
            writeln!(out, "word={}", result.word).map_err(w)?;
            writeln!(out, "valid={}", result.is_valid_codeword).map_err(w)?;
            writeln!(out, "iterations={}", result.iterations).map_err(w)?;
            writeln!(out, "termination={}", result.termination).map_err(w)?;
            writeln!(out, "objective={}", result.objective).map_err(w)?;
            writeln!(out, "seconds={:e}", result.wall_time).map_err(w)?;
        }
    }
    Ok(if result.is_valid_codeword { EXIT_OK } else { EXIT_INVALID_WORD })
}

fn print_summary(records: &[SweepRecord], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<11} {:>7} {:>6} {:>6} {:>6} {:>9} {:>7} {:>10} {:>22} {:>8}",
        "decoder", "snr_db", "alpha", "mu1", "mu2", "trials", "errors", "wer", "wer 95% CI", "iters"
    )?;
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x}"));
    for r in records {
        if let Some(e) = &r.error {
            writeln!(out, "{:<11} {:>7} {:>6} {:>6} {:>6}  failed: {e}", r.decoder, r.snr_db, opt(r.alpha), opt(r.mu1), opt(r.mu2))?;
            continue;
        }
        writeln!(
            out,
            "{:<11} {:>7} {:>6} {:>6} {:>6} {:>9} {:>7} {:>10.3e} [{:.3e}, {:.3e}] {:>8.1}",
            r.decoder,
            r.snr_db,
            opt(r.alpha),
            opt(r.mu1),
            opt(r.mu2),
            r.trials,
            r.word_errors,
            r.wer,
            r.wer_ci_low,
            r.wer_ci_high,
            r.avg_iterations
        )?;
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let snr_points = parse_grid(&a.snr).map_err(CliError::usage)?;
    let mut flags = a.decoder.clone();
    let (mut mu1_grid, mut mu2_grid) = (Vec::new(), Vec::new());
    match a.sweep {
        SweepArg::Alpha => flags.decoder = DecoderArg::Penalized,
        SweepArg::Mu => {
            flags.decoder = DecoderArg::L2box;
            mu1_grid = parse_grid(flags.mu1.as_deref().unwrap_or("10,50,200")).map_err(CliError::usage)?;
            mu2_grid = parse_grid(flags.mu2.as_deref().unwrap_or("10,50,200")).map_err(CliError::usage)?;
            flags.mu1 = None;
            flags.mu2 = None;
        }
        SweepArg::Snr => {}
    }
    let decoder = build_decoder(&flags)?;
    let spec = ExperimentSpec {
        code_ref: a.code.clone(),
        decoder,
        snr_points,
        stop_word_errors: a.errors,
        max_trials: a.trials,
        transmit_mode: match a.transmit {
            TransmitArg::Zero => TransmitMode::AllZero,
            TransmitArg::Random => TransmitMode::RandomCodeword,
        },
        master_seed: a.seed,
        threads: a.threads,
    };
    let exp = Experiment::with_code(spec.clone(), load_code(&a.code)?)?;
    let (records, sweep) = match a.sweep {
        SweepArg::Snr => (exp.sweep_snr()?, json!({ "kind": "snr" })),
        SweepArg::Alpha => {
            let grid = parse_grid(&a.grid).map_err(CliError::usage)?;
            (exp.sweep_alpha(&grid)?, json!({ "kind": "alpha", "alpha_grid": grid }))
        }
        SweepArg::Mu => {
            (exp.sweep_mu(&mu1_grid, &mu2_grid)?, json!({ "kind": "mu", "mu1_grid": mu1_grid, "mu2_grid": mu2_grid }))
        }
    };
    print_summary(&records, out).map_err(|e| CliError { code: EXIT_IO, msg: e.to_string() })?;
    let file = ResultFile {
        metadata: ResultMetadata { version: harness::version_string(), spec, sweep },
        records,
    };
    if let Some(path) = &a.out {
        let json = a.format == FormatArg::Json;
        harness::save(path, json, &file)?;
        if !json {
            // CSV cannot carry the configuration; keep it next to the data.
            let meta = path.with_extension("meta.json");
            let text = serde_json::to_string_pretty(&file.metadata).expect("serializable");
            std::fs::write(&meta, text).map_err(io_err(&meta))?;
        }
    }
    Ok(EXIT_OK)
}

/// Expands `--config FILE` into flags placed right after the subcommand,
/// so flags given explicitly on the command line override them.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let pos = args.iter().position(|a| a == "--config");
    let Some(pos) = pos else {
        if let Some(a) = args.iter().find_map(|a| a.to_str().and_then(|s| s.strip_prefix("--config="))) {
            let mut rest: Vec<OsString> = args.iter().filter(|x| !x.to_str().is_some_and(|s| s.starts_with("--config="))).cloned().collect();
            rest.splice(2.min(rest.len())..2.min(rest.len()), config_flags(Path::new(a))?);
            return Ok(rest);
        }
        return Ok(args);
    };
    let path = args.get(pos + 1).ok_or_else(|| CliError::usage("--config needs a file"))?;
    let extra = config_flags(Path::new(path))?;
    let mut rest: Vec<OsString> = args[..pos].iter().chain(&args[pos + 2..]).cloned().collect();
    let at = 2.min(rest.len());
    rest.splice(at..at, extra);
    Ok(rest)
}

fn config_flags(path: &Path) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut flags = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("{}:{}: expected key=value", path.display(), no + 1)))?;
        flags.push(format!("--{}", k.trim()).into());
        flags.push(v.trim().into());
    }
    Ok(flags)
}

/// Runs the CLI on `args` (including the program name), writing normal
/// output to `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let outcome = expand_config(args).and_then(|args| {
        let cli = Cli::try_parse_from(args).map_err(|e| {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            CliError { code, msg: e.render().to_string() }
        })?;
        match &cli.command {
            Command::Info { code, .. } => cmd_info(code, out),
            Command::Export { code, out: dest, .. } => cmd_export(code, dest.as_deref(), out),
            Command::Decode(a) => cmd_decode(a, out),
            Command::Simulate(a) => cmd_simulate(a, out),
        }
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            if e.code == EXIT_OK {
                let _ = write!(out, "{}", e.msg);
            } else {
                let msg = e.msg.trim_end();
                let msg = msg.strip_prefix("error: ").unwrap_or(msg);
                let _ = writeln!(err, "error: {msg}");
            }
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1:0.5:3").unwrap(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(parse_grid("0.25:0.25:5").unwrap().len(), 20);
        assert_eq!(parse_grid("10,50,200").unwrap(), vec![10.0, 50.0, 200.0]);
        assert_eq!(parse_grid("-1").unwrap(), vec![-1.0]);
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("a").is_err());
    }

    #[test]
    fn inline_llrs() {
        assert_eq!(read_llrs("-1,-2,3").unwrap(), vec![-1.0, -2.0, 3.0]);
        assert_eq!(read_llrs("-1 -2 3").unwrap(), vec![-1.0, -2.0, 3.0]);
        assert_eq!(read_llrs("/no/such/llrs").unwrap_err().code, EXIT_IO);
    }

    #[test]
    fn decoder_overrides() {
        let f = DecoderFlags {
            decoder: DecoderArg::Penalized,
            alpha: Some(2.0),
            mu1: Some("4".into()),
            mu2: None,
            epsilon: None,
            max_iters: Some(10),
            normalization: None,
            early_exit: Some(false),
        };
        let DecoderConfig::Penalized(p) = build_decoder(&f).unwrap() else { panic!() };
        assert_eq!((p.alpha, p.mu, p.max_iters, p.early_exit_on_codeword), (2.0, 4.0, 10, false));
    }
}
