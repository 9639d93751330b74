use std::fmt;
use std::path::PathBuf;

use energy_gdp::demographics::{
    default_window, fit_hyperbolic, hyperbolic_deviation, project_gdp_hyperbolic, GdpProjection,
    HyperbolicDeviation, HyperbolicFit,
};
use energy_gdp::energy_model::ResidualRow;
use energy_gdp::population_scaling::{
    consistency_check_with, fit_power_law, ConsistencyReport, PowerLawFit,
};
use energy_gdp::synthetic::{
    generate, generate_consistent, ConsistentSpec, PopulationPath, SyntheticSpec,
};
use energy_gdp::timeseries::write_panel;
use energy_gdp::{
    calibrate_fixed_gamma, calibrate_with, fit_fixed_gamma, fit_given_u0, load_panel,
    residual_table, CalibratedModel, Calibration, CalibrationOptions, EnergyModelParams, ErrorKind,
    Panel,
};
use serde::Serialize;

use crate::args::{Cli, Command, Format, PopulationKind, SyntheticArgs, SyntheticMode};
use crate::output::{num, OutputSet, WriteError, SCHEMA_VERSION};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const DATA: i32 = 1;
    pub const FIT: i32 = 2;
    pub const IO: i32 = 3;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: anyhow::Error,
}

impl CliError {
    fn data(msg: impl fmt::Display) -> Self {
        Self {
            code: exit::DATA,
            error: anyhow::anyhow!("{msg}"),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl From<energy_gdp::Error> for CliError {
    fn from(e: energy_gdp::Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Data => exit::DATA,
            ErrorKind::Fit => exit::FIT,
            ErrorKind::Io => exit::IO,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

impl From<WriteError> for CliError {
    fn from(e: WriteError) -> Self {
        Self {
            code: exit::IO,
            error: e.0,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(error: anyhow::Error) -> Self {
        Self {
            code: exit::IO,
            error,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input_path: Option<PathBuf>,
    pub command: Command,
    pub u0_bracket: (f64, f64),
    pub u0_fixed: Option<f64>,
    pub gamma_fixed: Option<f64>,
    pub demographic_window: Option<(i32, i32)>,
    pub output_dir: PathBuf,
    pub format: Format,
    pub years: Vec<i32>,
    pub tolerance: f64,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let c = cli.common;
        if c.u0_min >= c.u0_max || c.u0_min.is_nan() || c.u0_max.is_nan() {
            return Err(CliError::data(format!(
                "--u0-min ({}) must be below --u0-max ({})",
                c.u0_min, c.u0_max
            )));
        }
        Ok(Self {
            input_path: c.input,
            command: cli.command,
            u0_bracket: (c.u0_min, c.u0_max),
            u0_fixed: c.u0,
            gamma_fixed: c.gamma,
            demographic_window: c.window,
            output_dir: c.output,
            format: c.format,
            years: c.years,
            tolerance: c.tolerance,
        })
    }

    fn panel(&self) -> Result<Panel, CliError> {
        let path = self
            .input_path
            .as_ref()
            .ok_or_else(|| CliError::data("--input is required"))?;
        Ok(load_panel(path)?)
    }
}

/// Runs one command and returns the files it wrote.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let outputs = match &config.command {
        Command::Fit => cmd_fit(config)?,
        Command::FitPop => cmd_fit_pop(config)?,
        Command::Check => cmd_check(config)?,
        Command::Table => cmd_table(config)?,
        Command::Project => cmd_project(config)?,
        Command::PlotData => cmd_plot_data(config)?,
        Command::GenSynthetic(args) => cmd_gen_synthetic(args)?,
    };
    Ok(outputs.write_to(&config.output_dir)?)
}

#[derive(Debug, Serialize)]
struct LoglogSummary {
    intercept: f64,
    slope: f64,
    r_squared: f64,
    residual_std: f64,
}

#[derive(Debug, Serialize)]
struct ModelSummary {
    u0: f64,
    g: f64,
    gamma: f64,
    gamma_pinned: bool,
    rmse: f64,
    mean_relative_error: f64,
    loglog: LoglogSummary,
}

impl From<&CalibratedModel> for ModelSummary {
    fn from(m: &CalibratedModel) -> Self {
        Self {
            u0: m.params.u0,
            g: m.params.g,
            gamma: m.params.gamma,
            gamma_pinned: m.gamma_pinned,
            rmse: m.rmse,
            mean_relative_error: m.mean_relative_error,
            loglog: LoglogSummary {
                intercept: m.loglog_fit.intercept,
                slope: m.loglog_fit.slope,
                r_squared: m.loglog_fit.r_squared,
                residual_std: m.loglog_fit.residual_std,
            },
        }
    }
}

#[derive(Debug, Serialize)]
struct SearchSummary {
    u0_bracket: [f64; 2],
    grid_points: usize,
    tolerance: f64,
    multimodal: bool,
    candidates: Vec<[f64; 2]>,
}

/// Calibrated model according to the pinning flags: `--u0` skips the
/// search, `--gamma` fits only the coefficient.
fn obtain_model(
    config: &RunConfig,
    panel: &Panel,
) -> Result<(CalibratedModel, Option<SearchSummary>), CliError> {
    let (lo, hi) = config.u0_bracket;
    let options = CalibrationOptions::default();
    let searched = |cal: Calibration| {
        let summary = SearchSummary {
            u0_bracket: [lo, hi],
            grid_points: options.grid_points,
            tolerance: options.tolerance,
            multimodal: cal.multimodal(),
            candidates: cal.candidates.iter().map(|c| [c.u0, c.rmse]).collect(),
        };
        (cal.model, Some(summary))
    };
    Ok(match (config.u0_fixed, config.gamma_fixed) {
        (Some(u0), Some(gamma)) => (fit_fixed_gamma(panel, u0, gamma)?, None),
        (Some(u0), None) => (fit_given_u0(panel, u0)?, None),
        (None, Some(gamma)) => searched(calibrate_fixed_gamma(panel, lo, hi, gamma, &options)?),
        (None, None) => searched(calibrate_with(panel, lo, hi, &options)?),
    })
}

#[derive(Debug, Serialize)]
struct FitReport {
    schema_version: u32,
    command: &'static str,
    start_year: i32,
    end_year: i32,
    model: ModelSummary,
    search: Option<SearchSummary>,
    residuals: Vec<ResidualRow>,
}

pub fn cmd_fit(config: &RunConfig) -> Result<OutputSet, CliError> {
    let panel = config.panel()?;
    let (model, search) = obtain_model(config, &panel)?;
    let residuals = residual_table(&model, &panel)?;
    let mut out = OutputSet::default();
    match config.format {
        Format::Json => out.add_json(
            "fit.json",
            &FitReport {
                schema_version: SCHEMA_VERSION,
                command: "fit",
                start_year: panel.start_year(),
                end_year: panel.end_year(),
                model: ModelSummary::from(&model),
                search,
                residuals,
            },
        )?,
        Format::Csv => {
            let m = ModelSummary::from(&model);
            out.add_csv(
                "fit_params.csv",
                "parameter,value",
                [
                    ("u0", m.u0),
                    ("g", m.g),
                    ("gamma", m.gamma),
                    ("rmse", m.rmse),
                    ("mean_relative_error", m.mean_relative_error),
                    ("loglog_intercept", m.loglog.intercept),
                    ("loglog_slope", m.loglog.slope),
                    ("loglog_r_squared", m.loglog.r_squared),
                ]
                .into_iter()
                .map(|(k, v)| vec![k.to_string(), num(v)]),
            );
            out.add_csv(
                "fit_residuals.csv",
                "year,observed_g,predicted_g,residual,relative_residual",
                residuals.iter().map(|r| {
                    vec![
                        r.year.to_string(),
                        num(r.observed_g),
                        num(r.predicted_g),
                        num(r.residual),
                        num(r.relative_residual),
                    ]
                }),
            );
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct PowerLawParameters {
    k: f64,
    d: f64,
    r: f64,
    s: f64,
    p: f64,
    q: f64,
}

#[derive(Debug, Serialize)]
struct PowerLaws {
    energy: PowerLawFit,
    materialized: PowerLawFit,
    gdp: PowerLawFit,
}

impl PowerLaws {
    fn parameters(&self) -> PowerLawParameters {
        PowerLawParameters {
            k: self.energy.coefficient,
            d: self.energy.exponent,
            r: self.materialized.coefficient,
            s: self.materialized.exponent,
            p: self.gdp.coefficient,
            q: self.gdp.exponent,
        }
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        [
            ("energy", &self.energy),
            ("materialized_energy", &self.materialized),
            ("gdp", &self.gdp),
        ]
        .into_iter()
        .map(|(name, f)| {
            vec![
                name.to_string(),
                num(f.coefficient),
                num(f.exponent),
                num(f.r_squared),
                num(f.residual_std_log),
            ]
        })
        .collect()
    }
}

const POWER_LAW_HEADER: &str = "variable,coefficient,exponent,r_squared,residual_std_log";

#[derive(Debug, Serialize)]
struct FitPopReport {
    schema_version: u32,
    command: &'static str,
    u0: f64,
    population_scaling: FitPopSection,
}

#[derive(Debug, Serialize)]
struct FitPopSection {
    parameters: PowerLawParameters,
    fits: PowerLaws,
}

pub fn cmd_fit_pop(config: &RunConfig) -> Result<OutputSet, CliError> {
    let panel = config.panel()?;
    let (model, _) = obtain_model(config, &panel)?;
    let n = panel.population();
    let laws = PowerLaws {
        energy: fit_power_law(n, panel.energy())?,
        materialized: fit_power_law(n, &model.u_series)?,
        gdp: fit_power_law(n, panel.gdp())?,
    };
    let mut out = OutputSet::default();
    match config.format {
        Format::Json => out.add_json(
            "fit_pop.json",
            &FitPopReport {
                schema_version: SCHEMA_VERSION,
                command: "fit-pop",
                u0: model.params.u0,
                population_scaling: FitPopSection {
                    parameters: laws.parameters(),
                    fits: laws,
                },
            },
        )?,
        Format::Csv => out.add_csv("fit_pop.csv", POWER_LAW_HEADER, laws.csv_rows()),
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct CheckReport {
    schema_version: u32,
    command: &'static str,
    model: ModelSummary,
    population_scaling: CheckSection,
}

#[derive(Debug, Serialize)]
struct CheckSection {
    parameters: PowerLawParameters,
    consistency: ConsistencyReport,
}

pub fn cmd_check(config: &RunConfig) -> Result<OutputSet, CliError> {
    let panel = config.panel()?;
    let (model, _) = obtain_model(config, &panel)?;
    let report = consistency_check_with(&panel, &model, config.tolerance)?;
    let laws = PowerLaws {
        energy: report.energy_fit,
        materialized: report.materialized_fit,
        gdp: report.gdp_fit,
    };
    if report.warning {
        eprintln!(
            "warning: fitted and derived (p, q) differ by more than {} (p: {:.3e}, q: {:.3e})",
            report.tolerance, report.p_rel_diff, report.q_rel_diff
        );
    }
    let mut out = OutputSet::default();
    match config.format {
        Format::Json => out.add_json(
            "check.json",
            &CheckReport {
                schema_version: SCHEMA_VERSION,
                command: "check",
                model: ModelSummary::from(&model),
                population_scaling: CheckSection {
                    parameters: laws.parameters(),
                    consistency: report,
                },
            },
        )?,
        Format::Csv => {
            let p = laws.parameters();
            let rows = [
                ("k", p.k),
                ("d", p.d),
                ("r", p.r),
                ("s", p.s),
                ("p", p.p),
                ("q", p.q),
                ("p_fitted", report.p_fitted),
                ("q_fitted", report.q_fitted),
                ("p_derived", report.p_derived),
                ("q_derived", report.q_derived),
                ("p_rel_diff", report.p_rel_diff),
                ("q_rel_diff", report.q_rel_diff),
                ("tolerance", report.tolerance),
                ("warning", if report.warning { 1.0 } else { 0.0 }),
            ];
            out.add_csv(
                "check.csv",
                "quantity,value",
                rows.into_iter().map(|(k, v)| vec![k.to_string(), num(v)]),
            );
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub energy: f64,
    pub gdp: f64,
    pub energy_intensity: f64,
    pub materialized_energy: f64,
}

/// First-year row, last-year row and the last-to-first ratio row.
pub fn basic_quantities(panel: &Panel, model: &CalibratedModel) -> [TableRow; 3] {
    let row = |i: usize, label: String| {
        let e = panel.energy().values()[i];
        let g = panel.gdp().values()[i];
        TableRow {
            label,
            energy: e,
            gdp: g,
            energy_intensity: e / g,
            materialized_energy: model.u_series.values()[i],
        }
    };
    let first = row(0, panel.start_year().to_string());
    let last = row(panel.len() - 1, panel.end_year().to_string());
    let ratio = TableRow {
        label: format!("{} to {}", panel.end_year(), panel.start_year()),
        energy: last.energy / first.energy,
        gdp: last.gdp / first.gdp,
        energy_intensity: last.energy_intensity / first.energy_intensity,
        materialized_energy: last.materialized_energy / first.materialized_energy,
    };
    [first, last, ratio]
}

#[derive(Debug, Serialize)]
struct TableReport {
    schema_version: u32,
    command: &'static str,
    u0: f64,
    rows: [TableRow; 3],
}

pub fn cmd_table(config: &RunConfig) -> Result<OutputSet, CliError> {
    let panel = config.panel()?;
    let (model, _) = obtain_model(config, &panel)?;
    let rows = basic_quantities(&panel, &model);
    let mut out = OutputSet::default();
    match config.format {
        Format::Json => out.add_json(
            "table.json",
            &TableReport {
                schema_version: SCHEMA_VERSION,
                command: "table",
                u0: model.params.u0,
                rows,
            },
        )?,
        Format::Csv => out.add_csv(
            "table.csv",
            "row,E,GDP,E/GDP,U",
            rows.iter().map(|r| {
                vec![
                    r.label.clone(),
                    num(r.energy),
                    num(r.gdp),
                    num(r.energy_intensity),
                    num(r.materialized_energy),
                ]
            }),
        ),
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct ProjectReport {
    schema_version: u32,
    command: &'static str,
    demographics: DemographicsSection,
}

#[derive(Debug, Serialize)]
struct DemographicsSection {
    fit: HyperbolicFit,
    gdp_population_law: PowerLawFit,
    deviation: Vec<HyperbolicDeviation>,
    projection: GdpProjection,
}

pub fn cmd_project(config: &RunConfig) -> Result<OutputSet, CliError> {
    let panel = config.panel()?;
    let population = panel.population();
    let (from, to) = config
        .demographic_window
        .unwrap_or_else(|| default_window(population));
    let fit = fit_hyperbolic(population, from, to)?;
    let gdp_law = fit_power_law(population, panel.gdp())?;
    let reference_year = panel.end_year();
    let years = if config.years.is_empty() {
        (reference_year + 1..)
            .take_while(|&y| (y as f64) < fit.t_singularity)
            .take(50)
            .collect()
    } else {
        config.years.clone()
    };
    let projection = project_gdp_hyperbolic(
        reference_year,
        panel.gdp().values()[panel.len() - 1],
        gdp_law.exponent,
        &fit,
        &years,
    )?;

    let mut out = OutputSet::default();
    out.add_csv(
        "projection.csv",
        "year,projected_gdp,idealized_extrapolation",
        projection
            .points
            .iter()
            .map(|p| vec![p.year.to_string(), num(p.gdp), "true".to_string()]),
    );
    let deviation = hyperbolic_deviation(population, &fit);
    match config.format {
        Format::Json => out.add_json(
            "demographics.json",
            &ProjectReport {
                schema_version: SCHEMA_VERSION,
                command: "project",
                demographics: DemographicsSection {
                    fit,
                    gdp_population_law: gdp_law,
                    deviation,
                    projection,
                },
            },
        )?,
        Format::Csv => out.add_csv(
            "hyperbolic_deviation.csv",
            "year,observed,hyperbolic_prediction,relative_deviation",
            deviation.iter().map(|d| {
                vec![
                    d.year.to_string(),
                    num(d.observed),
                    num(d.hyperbolic_prediction),
                    num(d.relative_deviation),
                ]
            }),
        ),
    }
    Ok(out)
}

pub fn cmd_plot_data(config: &RunConfig) -> Result<OutputSet, CliError> {
    let panel = config.panel()?;
    let (model, _) = obtain_model(config, &panel)?;
    let n = panel.population().values();
    let e = panel.energy().values();
    let g = panel.gdp().values();
    let u = model.u_series.values();
    let years: Vec<i32> = panel.years().collect();
    let mut out = OutputSet::default();

    out.add_csv(
        "fig1a.csv",
        "year,N,E,G",
        (0..panel.len()).map(|i| vec![years[i].to_string(), num(n[i]), num(e[i]), num(g[i])]),
    );

    let line = model.loglog_fit;
    out.add_csv(
        "fig1b.csv",
        "ln_EU,ln_G,ln_G_fit",
        (0..panel.len()).map(|i| {
            let x = (e[i] * u[i]).ln();
            vec![num(x), num(g[i].ln()), num(line.predict(x))]
        }),
    );

    let residuals = residual_table(&model, &panel)?;
    out.add_csv(
        "fig1c.csv",
        "year,G_data,G_model",
        residuals
            .iter()
            .map(|r| vec![r.year.to_string(), num(r.observed_g), num(r.predicted_g)]),
    );

    let population = panel.population();
    for (name, series) in [
        ("fig1d.csv", panel.energy()),
        ("fig1e.csv", &model.u_series),
        ("fig1f.csv", panel.gdp()),
    ] {
        let law = fit_power_law(population, series)?;
        let y = series.values();
        out.add_csv(
            name,
            "ln_N,ln_Y,ln_Y_fit",
            (0..panel.len()).map(|i| {
                let x = n[i].ln();
                vec![
                    num(x),
                    num(y[i].ln()),
                    num(law.coefficient.ln() + law.exponent * x),
                ]
            }),
        );
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SyntheticReport {
    schema_version: u32,
    command: &'static str,
    mode: &'static str,
    u0: f64,
    g: f64,
    gamma: f64,
    noise: f64,
    seed: u64,
}

pub fn cmd_gen_synthetic(args: &SyntheticArgs) -> Result<OutputSet, CliError> {
    let (panel, report) = match args.mode {
        SyntheticMode::Growth => {
            let population = match args.population {
                PopulationKind::Exponential => SyntheticSpec::default().population,
                PopulationKind::Hyperbolic => PopulationPath::Hyperbolic {
                    c: args.hyperbolic_c,
                    t_singularity: args.hyperbolic_ts,
                },
            };
            let params = EnergyModelParams::new(args.true_u0, args.true_g, args.true_gamma)?;
            let spec = SyntheticSpec {
                start_year: args.start_year,
                years: args.length,
                params,
                population,
                noise_sigma: args.noise,
                seed: args.seed,
                ..SyntheticSpec::default()
            };
            let report = SyntheticReport {
                schema_version: SCHEMA_VERSION,
                command: "gen-synthetic",
                mode: "growth",
                u0: params.u0,
                g: params.g,
                gamma: params.gamma,
                noise: args.noise,
                seed: args.seed,
            };
            (generate(&spec)?, report)
        }
        SyntheticMode::Consistent => {
            let spec = ConsistentSpec {
                start_year: args.start_year,
                years: args.length,
                g: args.true_g,
                gamma: args.true_gamma,
                ..ConsistentSpec::default()
            };
            let out = generate_consistent(&spec)?;
            let report = SyntheticReport {
                schema_version: SCHEMA_VERSION,
                command: "gen-synthetic",
                mode: "consistent",
                u0: out.u0,
                g: spec.g,
                gamma: spec.gamma,
                noise: 0.0,
                seed: 0,
            };
            (out.panel, report)
        }
    };
    let mut csv = Vec::new();
    write_panel(&panel, &mut csv).map_err(anyhow::Error::from)?;
    let mut out = OutputSet::default();
    out.add(
        "synthetic.csv",
        String::from_utf8(csv).map_err(anyhow::Error::from)?,
    );
    out.add_json("synthetic.json", &report)?;
    Ok(out)
}
