//! GDP as a power of the product of current and materialized energy,
//! `G = g · (E·U)^γ`.
//!
//! Materialized energy `U` is the energy embodied in existing production
//! infrastructure: everything consumed before the first panel year (`u0`)
//! plus the running sum of annual consumption, inclusive of the current
//! year.
//!
//! Calibration nests two fits. For a fixed `u0` the exponent and
//! coefficient come from OLS on `(ln EU, ln G)`; `u0` itself is chosen to
//! minimise the RMSE of `G` in levels, not in logs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::regression::{assess_line, fit_metrics, minimize_scalar, ols, LinearFit};
use crate::timeseries::{Panel, Unit, YearSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyModelParams {
    /// Energy materialized before the first panel year, Gtoe.
    pub u0: f64,
    /// Dimensional coefficient, T$2010/year per (Gtoe²/year)^γ.
    pub g: f64,
    pub gamma: f64,
}

impl EnergyModelParams {
    pub fn new(u0: f64, g: f64, gamma: f64) -> Result<Self> {
        let params = Self { u0, g, gamma };
        params.validate()?;
        Ok(params)
    }

    /// Checks `u0 >= 0`, `g > 0` and `0 < gamma < 1.5`.
    pub fn validate(&self) -> Result<()> {
        if !(self.u0.is_finite() && self.u0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "u0 must be >= 0, got {}",
                self.u0
            )));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "g must be > 0, got {}",
                self.g
            )));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.5) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0, 1.5), got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibratedModel {
    pub params: EnergyModelParams,
    /// Line through `(ln EU, ln G)`; its intercept is `ln g`, its slope `γ`.
    pub loglog_fit: LinearFit,
    /// Level-space RMSE of `G`, T$2010/year.
    pub rmse: f64,
    /// `rmse / mean(G)`.
    pub mean_relative_error: f64,
    pub u_series: YearSeries,
    /// Whether `gamma` was pinned rather than fitted.
    pub gamma_pinned: bool,
}

/// `U_t = u0 + Σ_{i=start}^{t} E_i`, in Gtoe.
pub fn materialized_energy(energy: &YearSeries, u0: f64) -> Result<YearSeries> {
    if !(u0.is_finite() && u0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "u0 must be >= 0, got {u0}"
        )));
    }
    let mut accumulated = 0.0;
    let values = energy
        .values()
        .iter()
        .map(|e| {
            accumulated += e;
            u0 + accumulated
        })
        .collect();
    YearSeries::new(
        "materialized_energy",
        Unit::Gtoe,
        energy.start_year(),
        values,
    )
}

/// Model GDP for each year of `energy`.
pub fn evaluate(params: &EnergyModelParams, energy: &YearSeries) -> Result<YearSeries> {
    let u = materialized_energy(energy, params.u0)?;
    let values = energy
        .values()
        .iter()
        .zip(u.values())
        .map(|(e, u)| params.g * (e * u).powf(params.gamma))
        .collect();
    YearSeries::new("gdp_model", Unit::TusdPerYear, energy.start_year(), values)
}

fn ln_eu(energy: &YearSeries, u: &YearSeries) -> Vec<f64> {
    energy
        .values()
        .iter()
        .zip(u.values())
        .map(|(e, u)| (e * u).ln())
        .collect()
}

fn ln_values(series: &YearSeries) -> Vec<f64> {
    series.values().iter().map(|v| v.ln()).collect()
}

fn finish(
    panel: &Panel,
    params: EnergyModelParams,
    loglog_fit: LinearFit,
    u_series: YearSeries,
    gamma_pinned: bool,
) -> Result<CalibratedModel> {
    let predicted: Vec<f64> = panel
        .energy()
        .values()
        .iter()
        .zip(u_series.values())
        .map(|(e, u)| params.g * (e * u).powf(params.gamma))
        .collect();
    let metrics = fit_metrics(panel.gdp().values(), &predicted)?;
    Ok(CalibratedModel {
        params,
        loglog_fit,
        rmse: metrics.rmse,
        mean_relative_error: metrics.mean_relative,
        u_series,
        gamma_pinned,
    })
}

/// Fits `g` and `γ` by log-log OLS with `u0` held fixed.
pub fn fit_given_u0(panel: &Panel, u0: f64) -> Result<CalibratedModel> {
    let u = materialized_energy(panel.energy(), u0)?;
    let fit = ols(&ln_eu(panel.energy(), &u), &ln_values(panel.gdp()))?;
    let params = EnergyModelParams {
        u0,
        g: fit.intercept.exp(),
        gamma: fit.slope,
    };
    finish(panel, params, fit, u, false)
}

/// Fits only `g` with both `u0` and `γ` pinned: `ln g` is the mean of
/// `ln G - γ ln(EU)`. With `γ = 1/2` this is the characteristic-time form
/// `G = g₁ (EU/τ)^{1/2}`, where `τ` cannot be separated from the
/// coefficient.
pub fn fit_fixed_gamma(panel: &Panel, u0: f64, gamma: f64) -> Result<CalibratedModel> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be > 0, got {gamma}"
        )));
    }
    let u = materialized_energy(panel.energy(), u0)?;
    let xs = ln_eu(panel.energy(), &u);
    let ys = ln_values(panel.gdp());
    let ln_g = ys.iter().zip(&xs).map(|(y, x)| y - gamma * x).sum::<f64>() / xs.len() as f64;
    let fit = assess_line(&xs, &ys, ln_g, gamma)?;
    let params = EnergyModelParams {
        u0,
        g: ln_g.exp(),
        gamma,
    };
    finish(panel, params, fit, u, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationOptions {
    /// Points in the coarse pre-scan over the `u0` bracket, endpoints included.
    pub grid_points: usize,
    /// Width of the final `u0` bracket, Gtoe.
    pub tolerance: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            grid_points: 64,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectivePoint {
    pub u0: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub model: CalibratedModel,
    /// Every pre-scan grid point with its objective value.
    pub prescan: Vec<ObjectivePoint>,
    /// Refined minimum of each separated local minimum found by the pre-scan.
    pub candidates: Vec<ObjectivePoint>,
}

impl Calibration {
    /// True when the pre-scan saw more than one separated local minimum.
    pub fn multimodal(&self) -> bool {
        self.candidates.len() > 1
    }
}

pub fn calibrate(panel: &Panel, u0_lo: f64, u0_hi: f64) -> Result<Calibration> {
    calibrate_with(panel, u0_lo, u0_hi, &CalibrationOptions::default())
}

/// Chooses `u0` in `[u0_lo, u0_hi]` minimising the level-space RMSE of
/// [`fit_given_u0`]. A uniform grid locates every local minimum; each is
/// refined by golden-section search within its neighbouring grid cells and
/// the best refined point wins.
pub fn calibrate_with(
    panel: &Panel,
    u0_lo: f64,
    u0_hi: f64,
    options: &CalibrationOptions,
) -> Result<Calibration> {
    search_u0(u0_lo, u0_hi, options, |u0| fit_given_u0(panel, u0))
}

/// Like [`calibrate_with`], but with `γ` pinned: each trial `u0` is scored
/// by [`fit_fixed_gamma`].
pub fn calibrate_fixed_gamma(
    panel: &Panel,
    u0_lo: f64,
    u0_hi: f64,
    gamma: f64,
    options: &CalibrationOptions,
) -> Result<Calibration> {
    search_u0(u0_lo, u0_hi, options, |u0| {
        fit_fixed_gamma(panel, u0, gamma)
    })
}

fn search_u0<F>(u0_lo: f64, u0_hi: f64, options: &CalibrationOptions, fit: F) -> Result<Calibration>
where
    F: Fn(f64) -> Result<CalibratedModel>,
{
    if !(u0_lo.is_finite() && u0_hi.is_finite() && 0.0 <= u0_lo && u0_lo < u0_hi) {
        return Err(Error::InvalidBracket {
            lo: u0_lo,
            hi: u0_hi,
        });
    }
    if options.grid_points < 3 {
        return Err(Error::InvalidParameter(format!(
            "pre-scan needs at least 3 points, got {}",
            options.grid_points
        )));
    }

    let objective = |u0: f64| fit(u0).map(|m| m.rmse);
    let step = (u0_hi - u0_lo) / (options.grid_points - 1) as f64;
    let grid: Vec<f64> = (0..options.grid_points)
        .map(|i| {
            if i + 1 == options.grid_points {
                u0_hi
            } else {
                u0_lo + step * i as f64
            }
        })
        .collect();
    let prescan = grid
        .iter()
        .map(|&u0| objective(u0).map(|rmse| ObjectivePoint { u0, rmse }))
        .collect::<Result<Vec<_>>>()?;

    let last = prescan.len() - 1;
    let lowest = (0..=last)
        .min_by(|&a, &b| prescan[a].rmse.total_cmp(&prescan[b].rmse))
        .unwrap_or(0);
    // Interior strict local minima. A bracket end only counts when it is the
    // lowest grid point, i.e. the optimum may lie outside the bracket.
    let mut local: Vec<usize> = (1..last)
        .filter(|&i| {
            let r = prescan[i].rmse;
            r < prescan[i - 1].rmse && r < prescan[i + 1].rmse
        })
        .collect();
    if (local.is_empty() || lowest == 0 || lowest == last) && !local.contains(&lowest) {
        local.push(lowest);
        local.sort_unstable();
    }

    let mut candidates = Vec::with_capacity(local.len());
    for i in local {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(last)];
        let min = minimize_scalar(
            |u0| objective(u0).unwrap_or(f64::NAN),
            lo,
            hi,
            options.tolerance,
        )?;
        candidates.push(ObjectivePoint {
            u0: min.argmin,
            rmse: min.min_value,
        });
    }

    let best = candidates
        .iter()
        .copied()
        .reduce(|best, c| if c.rmse < best.rmse { c } else { best })
        .expect("at least one candidate");
    Ok(Calibration {
        model: fit(best.u0)?,
        prescan,
        candidates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualRow {
    pub year: i32,
    pub observed_g: f64,
    pub predicted_g: f64,
    /// `observed_g - predicted_g`.
    pub residual: f64,
    /// `residual / observed_g`.
    pub relative_residual: f64,
}

/// Per-year comparison of the model against the panel's GDP.
pub fn residual_table(model: &CalibratedModel, panel: &Panel) -> Result<Vec<ResidualRow>> {
    model.u_series.check_aligned(panel.gdp())?;
    let predicted = evaluate(&model.params, panel.energy())?;
    Ok(panel
        .gdp()
        .iter()
        .zip(predicted.values())
        .map(|((year, observed), &predicted)| {
            let residual = observed - predicted;
            ResidualRow {
                year,
                observed_g: observed,
                predicted_g: predicted,
                residual,
                relative_residual: residual / observed,
            }
        })
        .collect())
}
