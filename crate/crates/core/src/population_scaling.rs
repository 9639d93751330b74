//! Power laws of energy, materialized energy and GDP in world population,
//! `E = k·N^d`, `U = r·N^s`, `G = p·N^q`.
//!
//! If `G = g(EU)^γ` holds, the three laws are tied together:
//! `p = g(kr)^γ` and `q = γ(d + s)`. [`consistency_check`] fits all three
//! independently and compares the fitted `(p, q)` with the derived pair.

use serde::Serialize;

use crate::energy_model::{CalibratedModel, EnergyModelParams};
use crate::error::Result;
use crate::regression::ols;
use crate::timeseries::{Panel, YearSeries};

/// Default relative tolerance for fitted vs derived `(p, q)`.
pub const DEFAULT_CONSISTENCY_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub coefficient: f64,
    pub exponent: f64,
    pub r_squared: f64,
    /// RMSE of the log-log residuals.
    pub residual_std_log: f64,
}

impl PowerLawFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.coefficient * n.powf(self.exponent)
    }
}

/// OLS on `(ln N, ln Y)`.
pub fn fit_power_law(n: &YearSeries, y: &YearSeries) -> Result<PowerLawFit> {
    n.check_aligned(y)?;
    let xs: Vec<f64> = n.values().iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = y.values().iter().map(|v| v.ln()).collect();
    let fit = ols(&xs, &ys)?;
    Ok(PowerLawFit {
        coefficient: fit.intercept.exp(),
        exponent: fit.slope,
        r_squared: fit.r_squared,
        residual_std_log: fit.residual_std,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedPq {
    pub p_derived: f64,
    pub q_derived: f64,
}

/// `p = g(kr)^γ`, `q = γ(d + s)`.
pub fn derive_pq(model: &EnergyModelParams, e_fit: &PowerLawFit, u_fit: &PowerLawFit) -> DerivedPq {
    DerivedPq {
        p_derived: model.g * (e_fit.coefficient * u_fit.coefficient).powf(model.gamma),
        q_derived: model.gamma * (e_fit.exponent + u_fit.exponent),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    /// `E = k·N^d`
    pub energy_fit: PowerLawFit,
    /// `U = r·N^s`
    pub materialized_fit: PowerLawFit,
    /// `G = p·N^q`
    pub gdp_fit: PowerLawFit,
    pub p_fitted: f64,
    pub q_fitted: f64,
    pub p_derived: f64,
    pub q_derived: f64,
    pub p_rel_diff: f64,
    pub q_rel_diff: f64,
    pub tolerance: f64,
    /// Set when either relative difference exceeds `tolerance`.
    pub warning: bool,
}

pub fn consistency_check(panel: &Panel, model: &CalibratedModel) -> Result<ConsistencyReport> {
    consistency_check_with(panel, model, DEFAULT_CONSISTENCY_TOLERANCE)
}

/// Fits the three power laws, with `U` taken from the calibrated model,
/// and compares fitted against derived `(p, q)`.
pub fn consistency_check_with(
    panel: &Panel,
    model: &CalibratedModel,
    tolerance: f64,
) -> Result<ConsistencyReport> {
    let n = panel.population();
    let energy_fit = fit_power_law(n, panel.energy())?;
    let materialized_fit = fit_power_law(n, &model.u_series)?;
    let gdp_fit = fit_power_law(n, panel.gdp())?;
    let derived = derive_pq(&model.params, &energy_fit, &materialized_fit);
    let p_rel_diff = (gdp_fit.coefficient - derived.p_derived).abs() / gdp_fit.coefficient;
    let q_rel_diff = (gdp_fit.exponent - derived.q_derived).abs() / gdp_fit.exponent;
    Ok(ConsistencyReport {
        energy_fit,
        materialized_fit,
        gdp_fit,
        p_fitted: gdp_fit.coefficient,
        q_fitted: gdp_fit.exponent,
        p_derived: derived.p_derived,
        q_derived: derived.q_derived,
        p_rel_diff,
        q_rel_diff,
        tolerance,
        warning: !(p_rel_diff <= tolerance && q_rel_diff <= tolerance),
    })
}
