//! `qmflab`: command-line front end.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmflab::wick::Ensemble;

#[derive(Parser, Debug)]
#[command(name = "qmflab", version, about = "Min cuts, exact moments and spectra of random tensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a network file and check that it is a connected network.
    Validate(NetworkArg),
    /// Minimum cut, flow paths and case label as JSON.
    Mincut(NetworkArg),
    /// Exact moment polynomial in N by enumerating pairings.
    MomentsExact(MomentsExactArgs),
    /// Monte-Carlo estimate of tr((L'L)^k).
    MomentsMc(MomentsMcArgs),
    /// Singular values of one sampled operator, or of a chGUE baseline.
    Spectrum(SpectrumArgs),
    /// Numerical rank of sampled operators over a range of N.
    RankScan(RankScanArgs),
    /// Compare the rank at N1*N2 (Kronecker-composed tensors) with the
    /// ranks at N1 and N2.
    KronCheck(KronCheckArgs),
}

#[derive(Args, Debug, Clone)]
pub struct NetworkArg {
    /// Network JSON file, or the name of a built-in fixture.
    #[arg(long)]
    pub network: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp comment line from CSV output.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum EnsembleArg {
    Identical,
    Independent,
}

impl From<EnsembleArg> for Ensemble {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Identical => Ensemble::Identical,
            EnsembleArg::Independent => Ensemble::Independent,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum NormalizationArg {
    /// Divide by N^((|E| - MC)/2).
    K,
    Raw,
}

#[derive(Args, Debug, Clone)]
pub struct MomentsExactArgs {
    #[command(flatten)]
    pub net: NetworkArg,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Product of traces instead of a single one, e.g. `1,2` for
    /// tr(L'L) tr((L'L)^2). Overrides --k.
    #[arg(long, value_delimiter = ',')]
    pub product: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "identical")]
    pub ensemble: EnsembleArg,
}

#[derive(Args, Debug, Clone)]
pub struct MomentsMcArgs {
    #[command(flatten)]
    pub net: NetworkArg,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "identical")]
    pub ensemble: EnsembleArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    /// Network file or fixture name; not needed with --chgue.
    #[arg(long, required_unless_present = "chgue")]
    pub network: Option<String>,
    #[arg(long = "N", required_unless_present = "chgue")]
    pub n: Option<usize>,
    /// Emit the spectrum of an n x n complex Gaussian matrix instead.
    #[arg(long, conflicts_with_all = ["network", "n"])]
    pub chgue: Option<usize>,
    #[arg(long, value_enum, default_value = "identical")]
    pub ensemble: EnsembleArg,
    #[arg(long, value_enum, default_value = "k")]
    pub normalization: NormalizationArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct RankScanArgs {
    #[command(flatten)]
    pub net: NetworkArg,
    /// Inclusive range `a..b`.
    #[arg(long = "N-range", value_parser = parse_range)]
    pub n_range: (usize, usize),
    /// Samples per N.
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "identical")]
    pub ensemble: EnsembleArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub abs_floor: f64,
    #[arg(long, default_value_t = qmflab::numeric::DEFAULT_REL_FLOOR)]
    pub rel_floor: f64,
}

#[derive(Args, Debug, Clone)]
pub struct KronCheckArgs {
    #[command(flatten)]
    pub net: NetworkArg,
    #[arg(long = "N1")]
    pub n1: usize,
    #[arg(long = "N2")]
    pub n2: usize,
    #[arg(long, value_enum, default_value = "identical")]
    pub ensemble: EnsembleArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub abs_floor: f64,
    #[arg(long, default_value_t = qmflab::numeric::DEFAULT_REL_FLOOR)]
    pub rel_floor: f64,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got `{s}`"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if a == 0 || a > b {
        return Err(format!("empty or invalid range {a}..{b}"));
    }
    Ok((a, b))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(a) => commands::validate(&a),
        Command::Mincut(a) => commands::mincut(&a),
        Command::MomentsExact(a) => commands::moments_exact(&a),
        Command::MomentsMc(a) => commands::moments_mc(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::RankScan(a) => commands::rank_scan(&a),
        Command::KronCheck(a) => commands::kron_check(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
