//! Synthetic panels with known parameters, for round-trip checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::energy_model::{evaluate, materialized_energy, EnergyModelParams};
use crate::error::{Error, Result};
use crate::timeseries::{Panel, Unit, YearSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PopulationPath {
    /// `N_i = initial · exp(rate · i)`
    Exponential { initial: f64, rate: f64 },
    /// `N_t = c / (t_singularity - t)`
    Hyperbolic { c: f64, t_singularity: f64 },
}

impl PopulationPath {
    fn at(&self, index: usize, year: i32) -> f64 {
        match *self {
            PopulationPath::Exponential { initial, rate } => initial * (rate * index as f64).exp(),
            PopulationPath::Hyperbolic { c, t_singularity } => c / (t_singularity - year as f64),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub start_year: i32,
    pub years: usize,
    pub params: EnergyModelParams,
    /// Energy consumption in the first year, Gtoe/year.
    pub energy_initial: f64,
    /// Continuous annual growth rate of energy consumption.
    pub energy_growth: f64,
    pub population: PopulationPath,
    /// Standard deviation of the multiplicative lognormal noise on GDP;
    /// zero gives exact model values.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    /// 54 years from 1965 with world-like magnitudes: energy 3.7 → ~14
    /// Gtoe/year, population 3.35 → ~7.5 billion.
    fn default() -> Self {
        Self {
            start_year: 1965,
            years: 54,
            params: EnergyModelParams {
                u0: 100.0,
                g: 0.3,
                gamma: 0.6,
            },
            energy_initial: 3.7,
            energy_growth: 0.025,
            population: PopulationPath::Exponential {
                initial: 3.35,
                rate: 0.0152,
            },
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

/// Panel whose GDP follows the energy model exactly, optionally multiplied
/// by `exp(σ·z)` with `z` standard normal drawn from a seeded ChaCha8 stream.
pub fn generate(spec: &SyntheticSpec) -> Result<Panel> {
    spec.params.validate()?;
    if !(spec.noise_sigma >= 0.0 && spec.noise_sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise sigma must be >= 0, got {}",
            spec.noise_sigma
        )));
    }
    let energy: Vec<f64> = (0..spec.years)
        .map(|i| spec.energy_initial * (spec.energy_growth * i as f64).exp())
        .collect();
    let population: Vec<f64> = (0..spec.years)
        .map(|i| spec.population.at(i, spec.start_year + i as i32))
        .collect();
    let energy_series =
        YearSeries::new("energy", Unit::GtoePerYear, spec.start_year, energy.clone())?;
    let mut gdp = evaluate(&spec.params, &energy_series)?.values().to_vec();
    if spec.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.noise_sigma)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for g in &mut gdp {
            *g *= normal.sample(&mut rng).exp();
        }
    }
    Panel::new(spec.start_year, population, energy, gdp)
}

/// Parameters of a panel in which `E = k·N^d`, `U = r·N^s` and
/// `G = g(EU)^γ` all hold exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsistentSpec {
    pub start_year: i32,
    pub years: usize,
    pub g: f64,
    pub gamma: f64,
    pub k: f64,
    pub d: f64,
    pub r: f64,
    pub s: f64,
    /// Population in the year before `start_year`; fixes `u0 = r·N^s`.
    pub population_before: f64,
}

impl Default for ConsistentSpec {
    fn default() -> Self {
        Self {
            start_year: 1965,
            years: 54,
            g: 0.2877,
            gamma: 0.6258,
            k: 0.7121,
            d: 1.4596,
            r: 16.331,
            s: 1.7632,
            population_before: 3.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistentPanel {
    pub panel: Panel,
    pub u0: f64,
}

/// Builds population year by year so that `r·N_t^s - k·N_t^d = U_{t-1}`:
/// the year's consumption `k·N_t^d` then raises materialized energy from
/// `U_{t-1}` to exactly `r·N_t^s`.
pub fn generate_consistent(spec: &ConsistentSpec) -> Result<ConsistentPanel> {
    let ConsistentSpec { k, d, r, s, .. } = *spec;
    if !(k > 0.0 && r > 0.0 && s > d && spec.population_before > 0.0) {
        return Err(Error::InvalidParameter(
            "need k > 0, r > 0, s > d and a positive starting population".into(),
        ));
    }
    let u0 = r * spec.population_before.powf(s);
    let mut u_prev = u0;
    let mut n_prev = spec.population_before;
    let mut population = Vec::with_capacity(spec.years);
    for _ in 0..spec.years {
        let excess = |n: f64| r * n.powf(s) - k * n.powf(d) - u_prev;
        let (mut lo, mut hi) = (n_prev, 2.0 * n_prev);
        while excess(hi) <= 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::InvalidParameter(
                    "population recursion diverged".into(),
                ));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let n = 0.5 * (lo + hi);
        population.push(n);
        u_prev = r * n.powf(s);
        n_prev = n;
    }

    let energy: Vec<f64> = population.iter().map(|n| k * n.powf(d)).collect();
    let energy_series =
        YearSeries::new("energy", Unit::GtoePerYear, spec.start_year, energy.clone())?;
    let u = materialized_energy(&energy_series, u0)?;
    let gdp = energy
        .iter()
        .zip(u.values())
        .map(|(e, u)| spec.g * (e * u).powf(spec.gamma))
        .collect();
    Ok(ConsistentPanel {
        panel: Panel::new(spec.start_year, population, energy, gdp)?,
        u0,
    })
}
