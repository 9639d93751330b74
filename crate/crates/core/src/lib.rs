//! Energy representation of world GDP.
//!
//! GDP is modelled as `G = g · (E·U)^γ`, where `E` is annual primary energy
//! consumption and `U` the materialized energy accumulated in production
//! infrastructure. The crate ingests annual world panels, calibrates
//! `(u0, g, γ)`, fits power laws in population, checks the parameter
//! identities those laws imply, and fits hyperbolic population growth.

pub mod demographics;
pub mod energy_model;
pub mod error;
pub mod population_scaling;
pub mod regression;
pub mod synthetic;
pub mod timeseries;

pub use energy_model::{
    calibrate, calibrate_fixed_gamma, calibrate_with, evaluate, fit_fixed_gamma, fit_given_u0,
    materialized_energy, residual_table, CalibratedModel, Calibration, CalibrationOptions,
    EnergyModelParams,
};
pub use error::{Error, ErrorKind, Result};
pub use timeseries::{
    load_panel, save_panel, slice_panel, validate_panel, Panel, Unit, YearSeries,
};
