//! `shiftlab`: build, transform and test 2-variable weighted shifts.
//!
//! Exit codes: 0 when every verdict holds, 2 when some verdict is false,
//! 1 for usage errors, unreadable input and unsupported requests.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "shiftlab", version, about = "Toolkit for commuting 2-variable weighted shifts")]
struct Cli {
    /// Tolerance override; defaults are 1e-10 for PSD tests and 1e-12 for identities.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a named family and write its JSON description.
    Build(BuildArgs),
    /// Apply a toral or spherical Aluthge transform.
    Transform(TransformArgs),
    /// Windowed k-hyponormality through moment matrices.
    Check(CheckArgs),
    /// Region curves on a y grid, as CSV.
    Region(RegionArgs),
    /// Drury–Arveson commutators, transform gaps and bounds.
    DaVerify(DaVerifyArgs),
    /// Spectral radii of a diagram and of both transforms.
    Spectra(SpectraArgs),
    /// Spherically quasinormal diagram from a zeroth row.
    Quasinormal(QuasinormalArgs),
    /// Random perturbations and the resulting transform gaps.
    Probe(ProbeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Tensor,
    Diagonal,
    Da,
    Fig2,
    Fig2General,
    Example46,
    Quasinormal,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub x1: Option<f64>,
    #[arg(long)]
    pub y0: Option<f64>,
    #[arg(long)]
    pub y1: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Atomic measure, `mass@position,...`.
    #[arg(long)]
    pub xi: Option<String>,
    /// Weight sequences: `v0,v1,...` (last repeats), `periodic:...`, `berger:...`.
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub row: Option<String>,
    #[arg(long, default_value = "8x8")]
    pub window: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Toral,
    Spherical,
}

#[derive(Debug, Args, Serialize)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "6x6")]
    pub window: String,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Defaults to the certifying window when the tail has one, else 8x8.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curve {
    Example46,
}

#[derive(Debug, Args, Serialize)]
pub struct RegionArgs {
    #[arg(long, value_enum)]
    pub curve: Curve,
    /// `start:end:step`, end excluded.
    #[arg(long, default_value = "0:1:0.01")]
    pub ygrid: String,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DaVerifyArgs {
    #[arg(long, default_value_t = 50)]
    pub nmax: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectraArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct QuasinormalArgs {
    /// Zeroth-row weights, same syntax as the sequence flags of `build`.
    #[arg(long)]
    pub row: String,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    #[arg(long, default_value = "8x8")]
    pub window: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
    pub eps: Vec<f64>,
    #[arg(long, default_value = "6x6")]
    pub window: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Whether every verdict of the run held.
pub enum Outcome {
    Holds,
    Fails,
}

fn run(argv: impl IntoIterator<Item = String>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let tol = cli.tol;
    let result = match cli.command {
        Command::Build(a) => commands::build(a, tol),
        Command::Transform(a) => commands::transform(a, tol),
        Command::Check(a) => commands::check(a, tol),
        Command::Region(a) => commands::region(a, tol),
        Command::DaVerify(a) => commands::da_verify(a, tol),
        Command::Spectra(a) => commands::spectra(a, tol),
        Command::Quasinormal(a) => commands::quasinormal(a, tol),
        Command::Probe(a) => commands::probe(a, tol),
    };
    match result {
        Ok(Outcome::Holds) => 0,
        Ok(Outcome::Fails) => 2,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args()))
}
