//! Hyperbolic population growth `N = C / (t_s - t)` and the GDP path it
//! implies through `G = p·N^q`, namely `G ∝ (t_s - t)^{-q}`.
//!
//! The fit is linearised: `1/N = (t_s - t)/C` is a straight line in `t`.
//! That is exact for the model class but weights late (large-N) years less
//! than a nonlinear fit would.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::regression::ols;
use crate::timeseries::YearSeries;

/// Default number of leading panel years used for the hyperbolic fit.
pub const DEFAULT_WINDOW_YEARS: i32 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicFit {
    /// 10⁹ persons · year.
    pub c: f64,
    /// Fractional year of the singularity.
    pub t_singularity: f64,
    /// R² of the linearised `1/N` against `t` fit.
    pub r_squared: f64,
    pub window: (i32, i32),
}

impl HyperbolicFit {
    pub fn predict(&self, year: f64) -> f64 {
        self.c / (self.t_singularity - year)
    }

    /// Factor by which `G ∝ (t_s - t)^{-q}` grows from `from` to `to`.
    pub fn gdp_growth_factor(&self, from: f64, to: f64, q: f64) -> f64 {
        ((self.t_singularity - from) / (self.t_singularity - to)).powf(q)
    }
}

/// Default fit window: the first [`DEFAULT_WINDOW_YEARS`] years, or the
/// whole series when it is shorter.
pub fn default_window(population: &YearSeries) -> (i32, i32) {
    let from = population.start_year();
    (
        from,
        (from + DEFAULT_WINDOW_YEARS - 1).min(population.end_year()),
    )
}

pub fn fit_hyperbolic(
    population: &YearSeries,
    from_year: i32,
    to_year: i32,
) -> Result<HyperbolicFit> {
    if from_year < population.start_year()
        || to_year > population.end_year()
        || to_year - from_year < 2
    {
        return Err(Error::YearRange {
            from: from_year,
            to: to_year,
            start: population.start_year(),
            end: population.end_year(),
        });
    }
    let mut years = Vec::new();
    let mut inverse = Vec::new();
    for (year, n) in population
        .iter()
        .filter(|(y, _)| (from_year..=to_year).contains(y))
    {
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidSeries {
                name: population.name().to_string(),
                reason: format!("non-positive population {n} at {year}"),
            });
        }
        years.push(year as f64);
        inverse.push(1.0 / n);
    }
    let line = ols(&years, &inverse)?;
    // A constant series can leave a slope of rounding-noise size.
    let noise = 1e-12 * inverse.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if line.slope >= -noise || line.slope.is_nan() {
        return Err(Error::NotHyperbolic {
            from: from_year,
            to: to_year,
            slope: line.slope,
        });
    }
    let c = -1.0 / line.slope;
    Ok(HyperbolicFit {
        c,
        t_singularity: line.intercept * c,
        r_squared: line.r_squared,
        window: (from_year, to_year),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicDeviation {
    pub year: i32,
    pub observed: f64,
    pub hyperbolic_prediction: f64,
    /// `(observed - prediction) / prediction`; negative once growth falls
    /// behind the hyperbola.
    pub relative_deviation: f64,
}

/// Observed population against the fitted hyperbola for every year of the
/// series, inside and outside the fit window.
pub fn hyperbolic_deviation(
    population: &YearSeries,
    fit: &HyperbolicFit,
) -> Vec<HyperbolicDeviation> {
    population
        .iter()
        .map(|(year, observed)| {
            let predicted = fit.predict(year as f64);
            HyperbolicDeviation {
                year,
                observed,
                hyperbolic_prediction: predicted,
                relative_deviation: (observed - predicted) / predicted,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectedGdp {
    pub year: i32,
    pub gdp: f64,
}

/// GDP extrapolated along the hyperbolic law. The result is an idealised
/// extrapolation: the hyperbola diverges at `t_singularity` and real growth
/// departs from it well before then.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GdpProjection {
    pub reference_year: i32,
    pub reference_gdp: f64,
    pub q: f64,
    pub t_singularity: f64,
    pub idealized_extrapolation: bool,
    pub points: Vec<ProjectedGdp>,
}

/// `G(t) = G_ref · ((t_s - t_ref) / (t_s - t))^q` for each requested year.
pub fn project_gdp_hyperbolic(
    reference_year: i32,
    reference_gdp: f64,
    q: f64,
    fit: &HyperbolicFit,
    years: &[i32],
) -> Result<GdpProjection> {
    let ts = fit.t_singularity;
    if let Some(&year) = years
        .iter()
        .chain(std::iter::once(&reference_year))
        .find(|&&y| y as f64 >= ts)
    {
        return Err(Error::BeyondSingularity {
            year,
            t_singularity: ts,
        });
    }
    let points = years
        .iter()
        .map(|&year| ProjectedGdp {
            year,
            gdp: reference_gdp * fit.gdp_growth_factor(reference_year as f64, year as f64, q),
        })
        .collect();
    Ok(GdpProjection {
        reference_year,
        reference_gdp,
        q,
        t_singularity: ts,
        idealized_extrapolation: true,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::Unit;

    fn hyperbola(c: f64, ts: f64, from: i32, to: i32) -> YearSeries {
        let values = (from..=to).map(|t| c / (ts - t as f64)).collect();
        YearSeries::new("population", Unit::BillionPersons, from, values).unwrap()
    }

    #[test]
    fn exact_hyperbola_recovered() {
        let n = hyperbola(200.0, 2026.9, 1900, 1960);
        let fit = fit_hyperbolic(&n, 1900, 1960).unwrap();
        assert!((fit.c / 200.0 - 1.0).abs() < 1e-8, "{}", fit.c);
        assert!(
            (fit.t_singularity / 2026.9 - 1.0).abs() < 1e-8,
            "{}",
            fit.t_singularity
        );
        assert!(hyperbolic_deviation(&n, &fit)
            .iter()
            .all(|d| d.relative_deviation.abs() < 1e-9));
    }

    #[test]
    fn constant_population_is_not_hyperbolic() {
        let n = YearSeries::new("population", Unit::BillionPersons, 2000, vec![3.0; 10]).unwrap();
        assert!(matches!(
            fit_hyperbolic(&n, 2000, 2009),
            Err(Error::NotHyperbolic { .. })
        ));
    }

    #[test]
    fn window_checks() {
        let n = hyperbola(200.0, 2026.9, 1950, 1970);
        assert!(fit_hyperbolic(&n, 1940, 1960).is_err());
        assert!(fit_hyperbolic(&n, 1960, 1961).is_err());
        assert_eq!(default_window(&n), (1950, 1964));
        let short = hyperbola(200.0, 2026.9, 1950, 1955);
        assert_eq!(default_window(&short), (1950, 1955));
    }

    fn fit_at(ts: f64) -> HyperbolicFit {
        HyperbolicFit {
            c: 200.0,
            t_singularity: ts,
            r_squared: 1.0,
            window: (1965, 1979),
        }
    }

    #[test]
    fn projection_closed_form() {
        let fit = fit_at(2026.9);
        let proj = project_gdp_hyperbolic(2018, 82.46, 2.0175, &fit, &[2018, 2022]).unwrap();
        assert_eq!(proj.points[0].gdp, 82.46);
        let expected = 82.46 * (8.9f64 / 4.9).powf(2.0175);
        assert!((proj.points[1].gdp - expected).abs() < 1e-9);
        assert!(
            (proj.points[1].gdp - 275.0).abs() < 3.0,
            "{}",
            proj.points[1].gdp
        );
        assert!(proj.idealized_extrapolation);
    }

    #[test]
    fn zero_exponent_is_flat() {
        let proj =
            project_gdp_hyperbolic(2018, 10.0, 0.0, &fit_at(2026.9), &[2000, 2010, 2025]).unwrap();
        assert!(proj.points.iter().all(|p| p.gdp == 10.0));
    }

    #[test]
    fn projection_past_singularity_rejected() {
        let err =
            project_gdp_hyperbolic(2018, 82.46, 2.0, &fit_at(2026.9), &[2020, 2027]).unwrap_err();
        assert!(matches!(err, Error::BeyondSingularity { year: 2027, .. }));
        assert!(err.to_string().contains("2026.9"));
    }
}
