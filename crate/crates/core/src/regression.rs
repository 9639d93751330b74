//! Least-squares lines, fit metrics and a bracketed scalar minimizer.
//!
//! Deviations use the population convention (divide by `n`, not `n - 2`),
//! so a line's `residual_std` is exactly the RMSE of its predictions.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    /// RMSE of the residuals, in units of the dependent variable.
    pub residual_std: f64,
}

impl LinearFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares for `y = intercept + slope * x`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::TooFewPoints {
            required: 3,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - x_mean;
        sxx += dx * dx;
        sxy += dx * (y - y_mean);
    }
    if xs.iter().all(|&x| x == xs[0]) || sxx == 0.0 {
        return Err(Error::DegenerateRegressor);
    }
    let slope = sxy / sxx;
    assess_line(xs, ys, y_mean - slope * x_mean, slope)
}

/// Scores a given line against `(xs, ys)` as if it had been fitted: R²
/// (clamped to `[0, 1]`) and residual RMSE.
pub fn assess_line(xs: &[f64], ys: &[f64], intercept: f64, slope: f64) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::TooFewPoints {
            required: 1,
            got: 0,
        });
    }
    let line = LinearFit {
        intercept,
        slope,
        r_squared: 0.0,
        residual_std: 0.0,
    };
    let predicted: Vec<f64> = xs.iter().map(|&x| line.predict(x)).collect();
    Ok(LinearFit {
        r_squared: coefficient_of_determination(ys, &predicted).clamp(0.0, 1.0),
        residual_std: rmse(ys, &predicted),
        ..line
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitMetrics {
    pub rmse: f64,
    /// `rmse / mean(observed)`.
    pub mean_relative: f64,
    pub r_squared: f64,
}

pub fn fit_metrics(observed: &[f64], predicted: &[f64]) -> Result<FitMetrics> {
    if observed.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: observed.len(),
            right: predicted.len(),
        });
    }
    if observed.is_empty() {
        return Err(Error::TooFewPoints {
            required: 1,
            got: 0,
        });
    }
    let rmse = rmse(observed, predicted);
    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
    Ok(FitMetrics {
        rmse,
        mean_relative: rmse / mean,
        r_squared: coefficient_of_determination(observed, predicted),
    })
}

fn rmse(observed: &[f64], predicted: &[f64]) -> f64 {
    let sse: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(o, p)| (o - p) * (o - p))
        .sum();
    (sse / observed.len() as f64).sqrt()
}

// 1 - SSE/SST; a constant observed series counts as perfectly explained
// only when the residuals vanish too.
fn coefficient_of_determination(observed: &[f64], predicted: &[f64]) -> f64 {
    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
    let sst: f64 = observed.iter().map(|o| (o - mean) * (o - mean)).sum();
    let sse: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(o, p)| (o - p) * (o - p))
        .sum();
    if sst == 0.0 {
        return if sse == 0.0 { 1.0 } else { 0.0 };
    }
    1.0 - sse / sst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarMinimum {
    pub argmin: f64,
    pub min_value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_ITERATIONS: usize = 10_000;

/// Golden-section search for a minimum of a unimodal `objective` on
/// `[lo, hi]`, stopping once the bracket is narrower than `tol`.
///
/// The endpoints are evaluated as well and the best point seen is
/// returned, so `min_value` never exceeds the objective at either end.
pub fn minimize_scalar<F>(mut objective: F, lo: f64, hi: f64, tol: f64) -> Result<ScalarMinimum>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }

    let mut evaluations = 0;
    let mut best = (f64::NAN, f64::INFINITY);
    let mut eval = |x: f64| -> Result<f64> {
        let v = objective(x);
        evaluations += 1;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective { x });
        }
        if v < best.1 {
            best = (x, v);
        }
        Ok(v)
    };

    eval(lo)?;
    eval(hi)?;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    let mut iterations = 0;
    while b - a > tol && iterations < MAX_ITERATIONS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
        iterations += 1;
    }

    Ok(ScalarMinimum {
        argmin: best.0,
        min_value: best.1,
        evaluations,
    })
}
