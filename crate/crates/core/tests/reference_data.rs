//! Checks against the bundled 1965–2018 world dataset.

use energy_gdp::demographics::{default_window, fit_hyperbolic, hyperbolic_deviation};
use energy_gdp::population_scaling::consistency_check;
use energy_gdp::{
    calibrate, fit_fixed_gamma, fit_given_u0, load_panel, residual_table, validate_panel, Panel,
};

const PUBLISHED_U0: f64 = 141.25;

fn reference() -> Panel {
    load_panel(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../data/world_1965_2018.csv"
    ))
    .unwrap()
}

#[test]
fn covers_54_years() {
    let panel = reference();
    assert_eq!(
        (panel.start_year(), panel.end_year(), panel.len()),
        (1965, 2018, 54)
    );
    assert!(validate_panel(&panel).is_empty());
    assert_eq!(panel.energy().get(1965), Some(3.73));
    assert_eq!(panel.gdp().get(2018), Some(82.46));
}

#[test]
fn materialized_energy_matches_table_anchors() {
    let model = fit_given_u0(&reference(), PUBLISHED_U0).unwrap();
    let u = &model.u_series;
    assert!((u.get(1965).unwrap() - 144.98).abs() < 1e-9);
    assert!((u.get(2018).unwrap() - 600.7).abs() < 0.05);
}

#[test]
fn loglog_fit_at_published_u0() {
    let model = fit_given_u0(&reference(), PUBLISHED_U0).unwrap();
    assert!(
        (model.params.g - 0.2877).abs() < 0.002,
        "{:?}",
        model.params
    );
    assert!(
        (model.params.gamma - 0.6258).abs() < 0.001,
        "{:?}",
        model.params
    );
    assert!(model.loglog_fit.r_squared > 0.99);
    assert!(fit_given_u0(&reference(), 0.0).unwrap().rmse > model.rmse);

    let rows = residual_table(&model, &reference()).unwrap();
    assert_eq!(rows.len(), 54);
    let worst = rows
        .iter()
        .map(|r| r.relative_residual.abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.05, "{worst}");
}

#[test]
fn fixed_gamma_variants() {
    let panel = reference();
    let free = calibrate(&panel, 0.0, 1000.0).unwrap();
    let half = fit_fixed_gamma(&panel, PUBLISHED_U0, 0.5).unwrap();
    assert!(half.rmse > free.model.rmse);
    let pinned = fit_fixed_gamma(&panel, PUBLISHED_U0, 0.6258).unwrap();
    assert!(
        (pinned.params.g / 0.2877 - 1.0).abs() < 0.005,
        "{}",
        pinned.params.g
    );
}

#[test]
fn calibration_is_unimodal_with_one_percent_error() {
    let cal = calibrate(&reference(), 0.0, 1000.0).unwrap();
    assert!(!cal.multimodal(), "{:?}", cal.candidates);
    assert!((cal.model.mean_relative_error - 0.012).abs() < 0.003);
}

#[test]
fn eq10_identities_hold_at_published_u0() {
    let panel = reference();
    let model = fit_given_u0(&panel, PUBLISHED_U0).unwrap();
    let report = consistency_check(&panel, &model).unwrap();
    assert!(
        report.p_rel_diff < 0.002 && report.q_rel_diff < 0.002,
        "{report:?}"
    );
    for (fitted, published) in [
        (report.energy_fit.coefficient, 0.7121),
        (report.energy_fit.exponent, 1.4596),
        (report.materialized_fit.exponent, 1.7632),
        (report.gdp_fit.exponent, 2.0175),
    ] {
        assert!(
            (fitted / published - 1.0).abs() < 0.01,
            "{fitted} vs {published}"
        );
    }
}

#[test]
fn early_window_hyperbola_overshoots_later_population() {
    let n = reference().population().clone();
    let (from, to) = default_window(&n);
    assert_eq!((from, to), (1965, 1979));
    let fit = fit_hyperbolic(&n, from, to).unwrap();
    assert!((fit.t_singularity - 2026.0).abs() < 10.0, "{fit:?}");

    let dev = hyperbolic_deviation(&n, &fit);
    let at = |year: i32| {
        dev.iter()
            .find(|d| d.year == year)
            .unwrap()
            .relative_deviation
    };
    assert!(at(1972).abs() < 0.01);
    assert!(at(1990) < 0.0 && at(2018) < at(1990));
    assert!(at(1972).abs() <= at(2018).abs());
}
