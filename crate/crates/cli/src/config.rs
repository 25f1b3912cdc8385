use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use threebody4d::reduction::validate_momenta;
use threebody4d::MassTriple;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("check failed: {0}")]
    Check(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Check(_) => 1,
            Self::Config(_) | Self::Io(_) => 2,
            Self::Solver(_) => 3,
        }
    }
}

impl From<threebody4d::Error> for CliError {
    fn from(e: threebody4d::Error) -> Self {
        use threebody4d::Error as E;
        match e {
            E::InvalidParameter(_) | E::DegenerateMomenta(_) | E::KineticDomain { .. } => Self::Config(e.to_string()),
            _ => Self::Solver(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "threebody4d", version, about = "Reduced three-body problem in R^4: checks, equilibria, scans and integration")]
pub struct Cli {
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed of the random-point suites and perturbations [default: 0].
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Integrator tolerance, or the pass threshold of every `verify` check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Seeded numerical checks of the reduction.
    Verify(VerifyArgs),
    /// Solve for one relative equilibrium and write its report.
    Equilibrium(EquilibriumArgs),
    /// Equilibrium families and the stability region map.
    Scan(ScanArgs),
    /// Integrate the reduced system.
    Integrate(IntegrateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Symplectic,
    Composition,
    Invariant,
    Amatrix,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(short, long, value_delimiter = ',')]
    pub masses: Option<Vec<f64>>,
    /// Momenta to validate; the suites draw their own.
    #[arg(long)]
    pub mu1: Option<f64>,
    #[arg(long)]
    pub mu2: Option<f64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Option<Vec<Check>>,
    /// Points per suite (defaults: 100 symplectic/composition, 20 otherwise).
    #[arg(long)]
    pub points: Option<usize>,
    /// Integration steps of the invariant-set suite [default: 1000].
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EquilibriumArgs {
    #[arg(long, conflicts_with = "general")]
    pub isosceles: bool,
    #[arg(long)]
    pub general: bool,
    /// `m1 / m` of the isosceles masses `(n m, m, m)`.
    #[arg(short)]
    pub n: Option<f64>,
    /// Isosceles shape parameter in `(0, 1)`.
    #[arg(short)]
    pub t: Option<f64>,
    #[arg(short, long, value_delimiter = ',')]
    pub masses: Option<Vec<f64>>,
    /// Expansion parameter of the general family.
    #[arg(short)]
    pub u: Option<f64>,
    /// Bodies forming the binary, e.g. `2,3`.
    #[arg(long, value_delimiter = ',')]
    pub pair: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    Isosceles,
    General,
    Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(value_enum)]
    pub kind: Option<ScanKind>,
    #[arg(short)]
    pub n: Option<f64>,
    #[arg(short, long, value_delimiter = ',')]
    pub masses: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub pair: Option<Vec<usize>>,
    /// Lower end of the `t` or `u` grid.
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    /// Grid points (per axis for the region map).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Region map covers `n` in `(0, n_max]`.
    #[arg(long)]
    pub n_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    /// Adaptive Dormand-Prince 5(4).
    Dp,
    /// Fixed-step implicit midpoint.
    Midpoint,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[arg(short, long, value_delimiter = ',')]
    pub masses: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub q: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub p: Option<Vec<f64>>,
    #[arg(long)]
    pub mu1: Option<f64>,
    #[arg(long)]
    pub mu2: Option<f64>,
    /// Start at the isosceles equilibrium `n,t` instead of `q, p, mu`.
    #[arg(long, value_delimiter = ',')]
    pub isosceles: Option<Vec<f64>>,
    /// Seeded uniform perturbation of `q` of this size.
    #[arg(long)]
    pub perturb: Option<f64>,
    /// End time (one period by default for equilibrium starts).
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Step of the midpoint rule.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Also integrate the full system and report the deviation.
    #[arg(long)]
    pub compare: bool,
    /// Comparison sample times [default: 20].
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Contents of a `--config` file. Every key is optional and mirrors the
/// flag of the same name (with `_` for `-`).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub masses: Option<Vec<f64>>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub checks: Option<Vec<Check>>,
    pub points: Option<usize>,
    pub steps: Option<usize>,
    /// `"isosceles"` or `"general"` for the equilibrium command.
    pub mode: Option<String>,
    pub n: Option<f64>,
    pub t: Option<f64>,
    pub u: Option<f64>,
    pub pair: Option<Vec<usize>>,
    pub kind: Option<ScanKind>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
    pub n_max: Option<f64>,
    pub q: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub isosceles: Option<Vec<f64>>,
    pub perturb: Option<f64>,
    pub t_end: Option<f64>,
    pub method: Option<MethodArg>,
    pub step: Option<f64>,
    pub max_steps: Option<usize>,
    pub compare: Option<bool>,
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Global settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct Globals {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: u64,
    pub tol: Option<f64>,
}

impl Globals {
    pub fn merge(cli: &Cli, file: &RunConfig) -> CliResult<Self> {
        let tol = cli.tol.or(file.tol);
        if let Some(t) = tol {
            positive("tol", t)?;
        }
        Ok(Self {
            out: cli.out.clone().or_else(|| file.out.clone()),
            format: cli.format.or(file.format),
            seed: cli.seed.or(file.seed).unwrap_or(0),
            tol,
        })
    }
}

pub fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

pub fn required<T>(name: &str, v: Option<T>) -> CliResult<T> {
    v.ok_or_else(|| CliError::Config(format!("missing {name}")))
}

pub fn parse_masses(v: Option<Vec<f64>>) -> CliResult<MassTriple> {
    match v.as_deref() {
        None => Ok(MassTriple::new(1.0, 2.0, 3.0)?),
        Some(&[a, b, c]) => Ok(MassTriple::new(a, b, c)?),
        Some(other) => Err(CliError::Config(format!("expected three masses, got {}", other.len()))),
    }
}

pub fn parse_pair(v: Option<Vec<usize>>) -> CliResult<(usize, usize)> {
    match v.as_deref() {
        None => Ok((2, 3)),
        Some(&[i, j]) => Ok((i, j)),
        Some(_) => Err(CliError::Config("pair takes two body indices, e.g. 2,3".into())),
    }
}

/// `mu1 > mu2 >= 0`.
pub fn check_momenta(mu1: f64, mu2: f64) -> CliResult<()> {
    validate_momenta(mu1, mu2)?;
    if mu1 < mu2 {
        return Err(CliError::Config(format!("mu1 must exceed mu2, got ({mu1}, {mu2})")));
    }
    Ok(())
}

pub fn four(name: &str, v: Vec<f64>) -> CliResult<[f64; 4]> {
    v.try_into().map_err(|v: Vec<f64>| CliError::Config(format!("{name} takes four values, got {}", v.len())))
}
