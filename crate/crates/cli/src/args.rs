use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "energy-gdp",
    version,
    about = "Calibrate world GDP against current and materialized energy"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Panel CSV (year,population_billions,energy_gtoe_per_year,gdp_tusd2010_per_year).
    #[arg(long, global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Directory for output files; created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub output: PathBuf,

    /// Lower end of the u0 search bracket, Gtoe.
    #[arg(
        long = "u0-min",
        global = true,
        value_name = "X",
        default_value_t = 0.0
    )]
    pub u0_min: f64,

    /// Upper end of the u0 search bracket, Gtoe.
    #[arg(
        long = "u0-max",
        global = true,
        value_name = "X",
        default_value_t = 1000.0
    )]
    pub u0_max: f64,

    /// Pin u0 instead of searching for it.
    #[arg(long, global = true, value_name = "X")]
    pub u0: Option<f64>,

    /// Pin the exponent gamma; only the coefficient is fitted.
    #[arg(long, global = true, value_name = "X")]
    pub gamma: Option<f64>,

    /// Years used for the hyperbolic population fit, e.g. 1965:1979.
    #[arg(long, global = true, value_name = "FROM:TO", value_parser = parse_window)]
    pub window: Option<(i32, i32)>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Projection years, comma separated.
    #[arg(long, global = true, value_name = "Y1,Y2,...", value_delimiter = ',')]
    pub years: Vec<i32>,

    /// Relative tolerance for the fitted vs derived (p, q) comparison.
    #[arg(long, global = true, value_name = "X", default_value_t = 0.01)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Calibrate (u0, g, gamma) and report fit statistics and residuals.
    Fit,
    /// Fit E, U and G as power laws of population.
    FitPop,
    /// Compare fitted (p, q) with the values implied by the energy model.
    Check,
    /// First year, last year and their ratio for E, GDP, E/GDP and U.
    Table,
    /// Fit hyperbolic population growth and extrapolate GDP along it.
    Project,
    /// Write the data behind each panel of the standard figure set.
    PlotData,
    /// Write a synthetic panel with known parameters.
    #[command(hide = true)]
    GenSynthetic(SyntheticArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SyntheticMode {
    /// GDP from exponentially growing energy through the energy model.
    Growth,
    /// Energy, materialized energy and GDP all exact power laws of population.
    Consistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PopulationKind {
    Exponential,
    Hyperbolic,
}

#[derive(Debug, Clone, Args)]
pub struct SyntheticArgs {
    #[arg(long, value_enum, default_value_t = SyntheticMode::Growth)]
    pub mode: SyntheticMode,
    #[arg(long = "true-u0", default_value_t = 100.0)]
    pub true_u0: f64,
    #[arg(long = "true-g", default_value_t = 0.3)]
    pub true_g: f64,
    #[arg(long = "true-gamma", default_value_t = 0.6)]
    pub true_gamma: f64,
    /// Standard deviation of multiplicative lognormal noise on GDP.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "start-year", default_value_t = 1965)]
    pub start_year: i32,
    #[arg(long = "length", default_value_t = 54)]
    pub length: usize,
    #[arg(long, value_enum, default_value_t = PopulationKind::Exponential)]
    pub population: PopulationKind,
    #[arg(long = "hyperbolic-c", default_value_t = 200.0)]
    pub hyperbolic_c: f64,
    #[arg(long = "hyperbolic-ts", default_value_t = 2026.9)]
    pub hyperbolic_ts: f64,
}

fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (from, to) = s
        .split_once(':')
        .ok_or_else(|| format!("expected FROM:TO, got `{s}`"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<i32>()
            .map_err(|e| format!("bad year `{v}`: {e}"))
    };
    Ok((parse(from)?, parse(to)?))
}
