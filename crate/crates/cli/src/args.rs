use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coexist_core::exact::parse_rational;
use coexist_core::{CoexistenceLevel, FadingModel, Rational, Scenario};

/// Spectrum co-existence of a primary and a secondary point-to-multipoint
/// network: closed-form throughput factors and Monte Carlo sweeps.
///
/// Rates are in bits per channel use. Powers are given in dB unless
/// `--linear` is set.
#[derive(Parser, Debug)]
#[command(name = "coexist", version, args_override_self = true)]
pub struct Cli {
    /// Flat `key=value` file; keys are flag names of the subcommand
    /// (without dashes). Flags on the command line take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads for Monte Carlo runs [default: all cores].
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Throughput factor, optimal activation exponents and time-division
    /// rates for one configuration.
    Theory(TheoryArgs),
    /// Ranges of f where simultaneous transmission beats time division.
    Crossover(CrossoverArgs),
    /// Throughput factor against 1 - f over a grid of f.
    Curve(CurveArgs),
    /// Simulated secondary sum-rate against its closed-form value over a
    /// grid of n (Rayleigh only).
    Sweep(SweepArgs),
    /// Concentration of the maximum or the lower order sum of n gains.
    Concentrate(ConcentrateArgs),
    /// One realization: least-interference rates, optionally against the
    /// exhaustive joint optimum and the upper bound.
    Scenario(ScenarioArgs),
}

#[derive(Args, Debug)]
pub struct TheoryArgs {
    /// Link directions: uu, ud, du or dd (primary first).
    #[arg(long, value_name = "SCENARIO")]
    pub scenario: Scenario,
    /// pure, asymmetric or symmetric [default: the most cooperative level
    /// the scenario allows].
    #[arg(long)]
    pub level: Option<CoexistenceLevel>,
    /// Protection factor in (0, 1], e.g. 0.6 or 3/5.
    #[arg(long, value_parser = rational)]
    pub f: Rational,
    /// Secondary size exponent, k = n^alpha.
    #[arg(long, value_parser = rational, default_value = "1")]
    pub alpha: Rational,
    /// Low-gain exponent of the gain law (1 for Rayleigh).
    #[arg(long, value_parser = rational, default_value = "1")]
    pub gamma: Rational,
    /// Print one CSV row instead of a table.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Args, Debug)]
pub struct CrossoverArgs {
    /// Link directions: uu, ud, du or dd (primary first).
    #[arg(long, value_name = "SCENARIO")]
    pub scenario: Scenario,
    /// Restrict to one level [default: every level with scheduling, or pure
    /// for dd].
    #[arg(long)]
    pub level: Option<CoexistenceLevel>,
    /// Secondary size exponent, k = n^alpha.
    #[arg(long, value_parser = rational, default_value = "1")]
    pub alpha: Rational,
    /// Low-gain exponent of the gain law (1 for Rayleigh).
    #[arg(long, value_parser = rational, default_value = "1")]
    pub gamma: Rational,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Link directions: uu, ud, du or dd (primary first).
    #[arg(long, value_name = "SCENARIO")]
    pub scenario: Scenario,
    /// One level [default: all levels of the scenario].
    #[arg(long)]
    pub level: Option<CoexistenceLevel>,
    /// Secondary size exponent, k = n^alpha.
    #[arg(long, value_parser = rational, default_value = "1")]
    pub alpha: Rational,
    /// Low-gain exponent of the gain law (1 for Rayleigh).
    #[arg(long, value_parser = rational, default_value = "1")]
    pub gamma: Rational,
    /// Spacing of the f grid, in (0, 0.5).
    #[arg(long, value_parser = rational, default_value = "1/100")]
    pub f_step: Rational,
    /// CSV output path; a JSON sidecar is written next to it. Without it
    /// the CSV goes to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct PowerArgs {
    /// Transmit power P of every node, in dB (linear with --linear).
    #[arg(
        long,
        default_value_t = 10.0,
        value_name = "DB",
        allow_negative_numbers = true
    )]
    pub p_db: f64,
    /// Noise power N0, in dB (linear with --linear).
    #[arg(
        long,
        default_value_t = 0.0,
        value_name = "DB",
        allow_negative_numbers = true
    )]
    pub n_db: f64,
    /// Read --p-db and --n-db as linear power ratios instead of dB.
    #[arg(long)]
    pub linear: bool,
}

impl PowerArgs {
    /// Linear `(P, N0)`.
    pub fn linear_powers(&self) -> (f64, f64) {
        if self.linear {
            (self.p_db, self.n_db)
        } else {
            (
                coexist_core::experiments::db_to_linear(self.p_db),
                coexist_core::experiments::db_to_linear(self.n_db),
            )
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineArg {
    /// Exact aggregate laws; handles k far beyond memory.
    Aggregate,
    /// Draw every gain.
    Full,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Link directions: uu, ud, du or dd (primary first).
    #[arg(long, value_name = "SCENARIO")]
    pub scenario: Scenario,
    /// Secondary size exponent, k = round(n^alpha).
    #[arg(long, default_value_t = 3.0)]
    pub alpha: f64,
    /// Level [default: symmetric for uu/ud, asymmetric for du, pure for dd].
    #[arg(long)]
    pub level: Option<CoexistenceLevel>,
    /// Secondary activation exponent [default: alpha/2 for a secondary
    /// uplink, alpha otherwise].
    #[arg(long)]
    pub alpha_bar: Option<f64>,
    /// Primary activation exponent [default: 0.5 at the symmetric level,
    /// 1 otherwise].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated, strictly increasing primary sizes, e.g.
    /// 100,1000,1e4.
    #[arg(long = "n", value_delimiter = ',', value_parser = count, required = true)]
    pub n: Vec<u64>,
    /// Monte Carlo trials per n.
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Seed of every random stream of the run.
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub power: PowerArgs,
    /// How trials are drawn.
    #[arg(long, value_enum, default_value_t = EngineArg::Aggregate)]
    pub engine: EngineArg,
    /// Most gains the run may draw.
    #[arg(long, value_parser = count, default_value = "1e9")]
    pub budget: u64,
    /// CSV output path; per-n summary and JSON sidecar are written next to
    /// it. Without it the rows go to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatArg {
    /// Largest of n gains, against ln(n)/c.
    Max,
    /// Sum of the f(n) smallest gains, against its closed form.
    LowerSum,
}

#[derive(Args, Debug)]
pub struct ConcentrateArgs {
    /// rayleigh, rician:K=<v> or nakagami:m=<v>.
    #[arg(long, default_value = "rayleigh")]
    pub model: FadingModel,
    /// Statistic to draw.
    #[arg(long, value_enum)]
    pub stat: StatArg,
    /// f(n) = ceil(n^e) for the lower sum.
    #[arg(long, default_value_t = 0.5)]
    pub f_exp: f64,
    /// Comma-separated, strictly increasing sizes.
    #[arg(long = "n", value_delimiter = ',', value_parser = count, required = true)]
    pub n: Vec<u64>,
    /// Monte Carlo trials per n.
    #[arg(long, default_value_t = 500)]
    pub trials: u64,
    /// Seed of every random stream of the run.
    #[arg(long)]
    pub seed: u64,
    /// Most gains the run may draw.
    #[arg(long, value_parser = count, default_value = "1e9")]
    pub budget: u64,
    /// CSV output path; per-n summary and JSON sidecar are written next to
    /// it. Without it the rows go to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScenarioArgs {
    /// Link directions: uu, ud, du or dd (primary first).
    #[arg(long, value_name = "SCENARIO")]
    pub scenario: Scenario,
    /// Level [default: symmetric for uu/ud, asymmetric for du, pure for dd].
    #[arg(long)]
    pub level: Option<CoexistenceLevel>,
    /// Primary users.
    #[arg(long = "n", value_parser = count, required_unless_present = "instance")]
    pub n: Option<u64>,
    /// Secondary users [default: round(n^alpha)].
    #[arg(long)]
    pub k: Option<u64>,
    /// Secondary size exponent when --k is not given.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Protection factor in [0, 1] of the joint optimum; also picks the
    /// activation exponents.
    #[arg(long, default_value_t = 0.5)]
    pub f: f64,
    /// rayleigh, rician:K=<v> or nakagami:m=<v>.
    #[arg(long, default_value = "rayleigh")]
    pub model: FadingModel,
    /// Seed of the realization.
    #[arg(long, required_unless_present = "instance")]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub power: PowerArgs,
    /// Active users (primary,secondary) instead of the optimal exponents.
    #[arg(long, value_parser = pair, value_name = "P,S")]
    pub counts: Option<(usize, usize)>,
    /// Also run the exhaustive joint optimum (n, k <= 14) and the upper
    /// bound.
    #[arg(long)]
    pub oracle: bool,
    /// Read the realization from a dump instead of drawing it.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["n", "k", "seed", "model", "p_db", "n_db", "linear"])]
    pub instance: Option<PathBuf>,
    /// Write the realization to this path.
    #[arg(long, value_name = "PATH")]
    pub dump_instance: Option<PathBuf>,
    /// CSV output path for the result row; a JSON sidecar is written next
    /// to it.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn pair(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("expected two counts like `3,5`, got `{s}`");
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// Accepts `100000` or `1e5`.
fn count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.trim().parse::<u64>() {
        return Ok(v);
    }
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if !r.is_integer() || r < Rational::from_integer(0) || *r.numer() > u64::MAX as i128 {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(*r.numer() as u64)
}
