//! `kac` command line: parses flags and an optional `key = value` file, runs
//! one verb and writes CSV.
//!
//! Output goes to `--output`, else `$KAC_OUTPUT_DIR/<verb>.csv`, else stdout.
//! Secondary tables (the final histogram of `simulate`, the moment comparison
//! of `chaos`) are written next to a file output as `<stem>_<suffix>.csv`.

mod commands;
mod config;
mod csv;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{error::ErrorKind, Args, Parser, Subcommand};

pub use commands::{execute, Output};
pub use config::{
    normalize_key, parse_header, parse_key_values, read_config_file, ConfigError, RunConfig, Verb,
};
pub use csv::{emit_csv, Cell, Table};

use crate::error::KacError;

pub const OUTPUT_DIR_ENV: &str = "KAC_OUTPUT_DIR";

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const IO: i32 = 4;
    pub const UNKNOWN_KEY: i32 = 5;
    pub const MALFORMED: i32 = 6;
}

#[derive(Parser, Debug)]
#[command(name = "kac", version, about = "Thermostatted Kac walk: simulation, spectra, moments, entropy and chaos")]
struct Cli {
    #[command(subcommand)]
    verb: VerbCmd,
}

#[derive(Subcommand, Debug)]
enum VerbCmd {
    /// Run the particle ensemble and record K, T and moments.
    #[command(allow_negative_numbers = true)]
    Simulate(Flags),
    /// Gap table from every available route.
    #[command(allow_negative_numbers = true)]
    Spectrum(Flags),
    /// Integrate the limiting moment hierarchy.
    #[command(allow_negative_numbers = true)]
    Boltzmann(Flags),
    /// One-particle relative entropy against its decay bound.
    #[command(allow_negative_numbers = true)]
    Entropy(Flags),
    /// Pair-correlation metric along an N ladder.
    #[command(allow_negative_numbers = true)]
    Chaos(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// File of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    replicas: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    k0: Option<String>,
    /// gaussian, two-temperature or uniform
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    temperature: Option<String>,
    #[arg(long)]
    mean: Option<String>,
    #[arg(long)]
    hot_fraction: Option<String>,
    #[arg(long)]
    t_hot: Option<String>,
    #[arg(long)]
    t_cold: Option<String>,
    #[arg(long)]
    half_width: Option<String>,
    #[arg(long)]
    order: Option<String>,
    /// Comma-separated particle numbers.
    #[arg(long)]
    ns: Option<String>,
    #[arg(long)]
    compare: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(String, String)> {
        let all = [
            ("n", &self.n),
            ("lambda", &self.lambda),
            ("mu", &self.mu),
            ("beta", &self.beta),
            ("seed", &self.seed),
            ("replicas", &self.replicas),
            ("horizon", &self.horizon),
            ("samples", &self.samples),
            ("k0", &self.k0),
            ("init", &self.init),
            ("temperature", &self.temperature),
            ("mean", &self.mean),
            ("hot_fraction", &self.hot_fraction),
            ("t_hot", &self.t_hot),
            ("t_cold", &self.t_cold),
            ("half_width", &self.half_width),
            ("order", &self.order),
            ("ns", &self.ns),
            ("compare", &self.compare),
        ];
        all.into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Run(KacError),
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(ConfigError::Usage(_)) => exit::USAGE,
            CliError::Config(ConfigError::UnknownKey(_)) => exit::UNKNOWN_KEY,
            CliError::Config(ConfigError::Malformed { .. }) => exit::MALFORMED,
            CliError::Config(ConfigError::Io { .. }) | CliError::Io { .. } => exit::IO,
            CliError::Run(KacError::InvalidParameter(_)) => exit::USAGE,
            CliError::Run(KacError::Io { .. }) => exit::IO,
            CliError::Run(_) => exit::NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => e.fmt(f),
            CliError::Run(e) => e.fmt(f),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

/// Parse `args` (program name first) into a verb, its effective config and
/// the explicit output path.
pub fn parse_config<I, T>(args: I) -> Result<(RunConfig, Option<PathBuf>), ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(ParseOutcome::Clap)?;
    let (verb, flags) = match cli.verb {
        VerbCmd::Simulate(f) => (Verb::Simulate, f),
        VerbCmd::Spectrum(f) => (Verb::Spectrum, f),
        VerbCmd::Boltzmann(f) => (Verb::Boltzmann, f),
        VerbCmd::Entropy(f) => (Verb::Entropy, f),
        VerbCmd::Chaos(f) => (Verb::Chaos, f),
    };
    let mut pairs = match &flags.config {
        Some(path) => read_config_file(path).map_err(|e| ParseOutcome::Failed(CliError::Config(e)))?,
        None => Vec::new(),
    };
    pairs.extend(flags.pairs());
    let cfg = RunConfig::from_pairs(verb, &pairs).map_err(|e| ParseOutcome::Failed(CliError::Config(e)))?;
    Ok((cfg, flags.output))
}

#[derive(Debug)]
pub enum ParseOutcome {
    Clap(clap::Error),
    Failed(CliError),
}

impl ParseOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            ParseOutcome::Clap(e) => match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::OK,
                ErrorKind::UnknownArgument => exit::UNKNOWN_KEY,
                ErrorKind::InvalidValue | ErrorKind::ValueValidation | ErrorKind::InvalidUtf8 => exit::MALFORMED,
                _ => exit::USAGE,
            },
            ParseOutcome::Failed(e) => e.exit_code(),
        }
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn write_file(path: &Path, comments: &[String], table: &Table) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    emit_csv(&mut w, comments, table).map_err(io)?;
    w.flush().map_err(io)
}

/// Run a parsed config, writing to `output` or the default destination.
pub fn run_config(cfg: &RunConfig, output: Option<PathBuf>) -> Result<(), CliError> {
    let outputs = execute(cfg).map_err(CliError::Run)?;
    let dest = output.or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{}.csv", cfg.verb.as_str())))
    });
    let comments = cfg.header_lines();
    for out in &outputs {
        match (&dest, out.suffix) {
            (Some(path), None) => write_file(path, &comments, &out.table)?,
            (Some(path), Some(sfx)) => write_file(&sibling(path, sfx), &comments, &out.table)?,
            (None, None) => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                emit_csv(&mut lock, &comments, &out.table).map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
            }
            (None, Some(_)) => {}
        }
    }
    Ok(())
}

/// Full program: returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (cfg, output) = match parse_config(args) {
        Ok(x) => x,
        Err(e) => {
            match &e {
                ParseOutcome::Clap(c) => {
                    let _ = c.print();
                }
                ParseOutcome::Failed(inner) => eprintln!("kac: {inner}"),
            }
            return e.exit_code();
        }
    };
    match run_config(&cfg, output) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("kac: {e}");
            e.exit_code()
        }
    }
}
