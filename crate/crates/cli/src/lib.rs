//! The `crscl` command-line tool.
//!
//! Every command writes its report to `out` and returns an exit code:
//! 0 when all checks pass, 1 on a numerical failure and 2 on usage or
//! input errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use crscl::oracle::{Engine, ProfileName};
use crscl::{Complex, Precision, Real};

pub mod bench;
pub mod reproduce;
pub mod scale;
pub mod stress;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Output(#[from] io::Error),
    #[error("{0}")]
    Input(#[from] crscl::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "crscl",
    version,
    about = "Scale complex vectors by 1/a without complex division"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor the two breakdown matrices with naive and crscl pivot scaling.
    ReproduceIssues(ReproduceArgs),
    /// Differential sweep against a wider-precision reference.
    Stress(StressArgs),
    /// Time crscl against per-element complex division.
    Bench(BenchArgs),
    /// Divide a vector read from a file by a complex scalar.
    Scale(ScaleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value = "binary32", value_parser = parse_precision)]
    pub precision: Precision,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub common: Common,
}

/// A profile name or `all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileChoice {
    One(ProfileName),
    All,
}

impl ProfileChoice {
    pub fn names(self) -> Vec<ProfileName> {
        match self {
            ProfileChoice::One(p) => vec![p],
            ProfileChoice::All => ProfileName::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct StressArgs {
    #[command(flatten)]
    pub common: Common,
    /// safe, huge, tiny, mixed, subnormal, special or all.
    #[arg(long, default_value = "safe", value_parser = parse_profile)]
    pub profile: ProfileChoice,
    /// Cases per profile. The special profile cycles through its 225 corner
    /// denominators, so 225 or more covers all of them.
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    /// crscl, naive_smith or naive_textbook; repeatable.
    #[arg(long = "engine", value_parser = parse_engine)]
    pub engines: Vec<Engine>,
    #[arg(long, env = "CRSCL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Evaluate on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    /// Vector lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 10_000, 1_000_000])]
    pub sizes: Vec<usize>,
    #[arg(long = "engine", value_parser = parse_engine)]
    pub engines: Vec<Engine>,
    /// Timed repetitions per size and engine; the median is reported.
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u32).range(1..))]
    pub reps: u32,
    #[arg(long, env = "CRSCL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Vector file, one `re im` element per line.
    pub input: PathBuf,
    /// Denominator as `"RE IM"`, hex-float or decimal.
    #[arg(long, allow_hyphen_values = true)]
    pub denominator: String,
    /// Print the case and the plan steps as `#` comment lines.
    #[arg(long)]
    pub explain: bool,
}

fn parse_precision(s: &str) -> Result<Precision, String> {
    s.parse().map_err(|e: crscl::Error| e.to_string())
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: crscl::Error| e.to_string())
}

fn parse_profile(s: &str) -> Result<ProfileChoice, String> {
    if s == "all" {
        return Ok(ProfileChoice::All);
    }
    s.parse()
        .map(ProfileChoice::One)
        .map_err(|e: crscl::Error| e.to_string())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::ReproduceIssues(args) => reproduce::run(&args, stdout),
        Command::Stress(args) => stress::run(&args, stdout),
        Command::Bench(args) => bench::run(&args, stdout),
        Command::Scale(args) => scale::run(&args, stdout),
    }
}

/// Sends `text` to `path`, or to `stdout` when no path is given.
pub(crate) fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => Ok(stdout.write_all(text.as_bytes())?),
    }
}

pub(crate) fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `re + im i` with both parts in hex-float.
pub fn format_signed<T: Real>(v: Complex<T>) -> String {
    let re = crscl::hexfloat::format(v.re);
    if v.im.is_sign_negative() && !v.im.is_nan() {
        format!("{re} - {} i", crscl::hexfloat::format(-v.im))
    } else {
        format!("{re} + {} i", crscl::hexfloat::format(v.im))
    }
}

/// Serializes `items` as one object, or as an array when there are several.
pub(crate) fn json_one_or_many<S: serde::Serialize>(items: &[S]) -> CliResult<String> {
    let text = match items {
        [one] => serde_json::to_string_pretty(one),
        many => serde_json::to_string_pretty(many),
    }
    .map_err(io::Error::from)?;
    Ok(text + "\n")
}
