//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use energy_gdp::demographics::fit_hyperbolic;
use energy_gdp::population_scaling::{derive_pq, PowerLawFit};
use energy_gdp::regression::ols;
use energy_gdp::synthetic::{generate, SyntheticSpec};
use energy_gdp::{
    calibrate, evaluate, load_panel, materialized_energy, EnergyModelParams, Unit, YearSeries,
};
use serde_json::Value;
use tempfile::TempDir;

const U0_TRUE: f64 = 100.0;
const G_TRUE: f64 = 0.3;
const GAMMA_TRUE: f64 = 0.6;
const U0_BRACKET: (f64, f64) = (0.0, 1000.0);

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn reference_csv() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/world_1965_2018.csv")
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_energy-gdp"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn field(v: &Value, path: &[&str]) -> f64 {
    path.iter()
        .fold(v, |v, k| &v[*k])
        .as_f64()
        .unwrap_or(f64::NAN)
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn within_rel(x: f64, target: f64, rel: f64) -> bool {
    ((x - target) / target).abs() <= rel
}

fn synthetic_round_trip() -> Outcome {
    let panel = match generate(&SyntheticSpec::default()) {
        Ok(p) => p,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let start = Instant::now();
    let cal = calibrate(&panel, U0_BRACKET.0, U0_BRACKET.1);
    let elapsed = start.elapsed();
    let p = match cal {
        Ok(c) => c.model.params,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let pass = within(p.u0, U0_TRUE, 0.01)
        && within_rel(p.g, G_TRUE, 1e-6)
        && within(p.gamma, GAMMA_TRUE, 1e-8)
        && elapsed < Duration::from_secs(1);
    Outcome::new(
        pass,
        format!(
            "u0={:.6} g={:.9} gamma={:.11} ({:.3}s)",
            p.u0,
            p.g,
            p.gamma,
            elapsed.as_secs_f64()
        ),
    )
}

fn noisy_round_trip() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (mut worst_u0, mut worst_g, mut worst_gamma) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 1..=20u64 {
        let spec = SyntheticSpec {
            noise_sigma: 0.01,
            seed,
            ..SyntheticSpec::default()
        };
        let p =
            match generate(&spec).and_then(|panel| calibrate(&panel, U0_BRACKET.0, U0_BRACKET.1)) {
                Ok(c) => c.model.params,
                Err(e) => return Outcome::new(false, format!("seed {seed}: {e}")),
            };
        let du0 = (p.u0 - U0_TRUE).abs();
        let dg = ((p.g - G_TRUE) / G_TRUE).abs();
        let dgamma = (p.gamma - GAMMA_TRUE).abs();
        worst_u0 = worst_u0.max(du0);
        worst_g = worst_g.max(dg);
        worst_gamma = worst_gamma.max(dgamma);
        if !(du0 <= 5.0 && dg <= 0.02 && dgamma <= 0.01) {
            failures.push(seed);
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures.is_empty() && elapsed < Duration::from_secs(10),
        format!(
            "{}/20 seeds within tolerance; worst |du0|={worst_u0:.2} |dg/g|={worst_g:.4} |dgamma|={worst_gamma:.4}; failing seeds {failures:?} ({:.3}s)",
            20 - failures.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn table_anchor_identity() -> Outcome {
    let panel = match load_panel(reference_csv()) {
        Ok(p) => p,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let e1965 = panel.energy().values()[0];
    match materialized_energy(panel.energy(), 141.25) {
        Ok(u) => {
            let u1965 = u.values()[0];
            Outcome::new(
                e1965 == 3.73 && within(u1965, 144.98, 0.05),
                format!("E_1965={e1965} U_1965={u1965:.4}"),
            )
        }
        Err(e) => Outcome::new(false, e.to_string()),
    }
}

fn model_anchor_evaluation() -> Outcome {
    let params = EnergyModelParams {
        u0: 600.7 - 13.86,
        g: 0.2877,
        gamma: 0.6258,
    };
    let energy = YearSeries::new_unchecked("energy", Unit::GtoePerYear, 2018, vec![13.86]);
    match evaluate(&params, &energy) {
        Ok(g) => {
            let g2018 = g.values()[0];
            Outcome::new(
                (80.5..=83.0).contains(&g2018),
                format!(
                    "G_2018={g2018:.4} (data 82.46, rel err {:.4}%)",
                    (g2018 / 82.46 - 1.0) * 100.0
                ),
            )
        }
        Err(e) => Outcome::new(false, e.to_string()),
    }
}

fn derived_pq_arithmetic() -> Outcome {
    let params = EnergyModelParams {
        u0: 141.25,
        g: 0.2877,
        gamma: 0.6258,
    };
    let law = |coefficient, exponent| PowerLawFit {
        coefficient,
        exponent,
        r_squared: 1.0,
        residual_std_log: 0.0,
    };
    let d = derive_pq(&params, &law(0.7121, 1.4596), &law(16.331, 1.7632));
    Outcome::new(
        within(d.p_derived, 1.3358, 0.0005) && within(d.q_derived, 2.0168, 0.0005),
        format!("p_derived={:.5} q_derived={:.5}", d.p_derived, d.q_derived),
    )
}

fn cli_reports(dir: &Path, extra: &[&str]) -> Result<(Value, Value), String> {
    let input = reference_csv();
    let base = [
        "--input",
        input.to_str().unwrap(),
        "--output",
        dir.to_str().unwrap(),
    ];
    run_cli(&[&["fit"][..], &base, extra].concat())?;
    run_cli(&[&["check"][..], &base, extra].concat())?;
    Ok((
        read_json(&dir.join("fit.json"))?,
        read_json(&dir.join("check.json"))?,
    ))
}

fn historical_checks(fit: &Value, check: &Value) -> (bool, String) {
    let m = &fit["model"];
    let (u0, gamma, g, mre) = (
        field(m, &["u0"]),
        field(m, &["gamma"]),
        field(m, &["g"]),
        field(m, &["mean_relative_error"]),
    );
    let ps = &check["population_scaling"];
    let expected = [
        ("k", 0.7121),
        ("d", 1.4596),
        ("r", 16.331),
        ("s", 1.7632),
        ("p", 1.3344),
        ("q", 2.0175),
    ];
    let mut laws_ok = true;
    let mut laws = Vec::new();
    for (key, target) in expected {
        let v = field(ps, &["parameters", key]);
        laws_ok &= within_rel(v, target, 0.01);
        laws.push(format!("{key}={v:.4}"));
    }
    let p_rel = field(ps, &["consistency", "p_rel_diff"]);
    let q_rel = field(ps, &["consistency", "q_rel_diff"]);
    let pass = within(u0, 141.25, 2.0)
        && within(gamma, 0.6258, 0.005)
        && within(g, 0.2877, 0.01)
        && within(mre, 0.012, 0.003)
        && laws_ok
        && p_rel < 0.005
        && q_rel < 0.005;
    let detail = format!(
        "u0={u0:.2} gamma={gamma:.4} g={g:.4} mre={:.3}% {} p_rel={p_rel:.2e} q_rel={q_rel:.2e}",
        mre * 100.0,
        laws.join(" ")
    );
    (pass, detail)
}

fn historical_reproduction() -> Outcome {
    let dir = TempDir::new().unwrap();
    let (fit, check) = match cli_reports(dir.path(), &[]) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e),
    };
    let (pass, detail) = historical_checks(&fit, &check);
    if pass {
        return Outcome::new(true, detail);
    }
    // Attribution: the same pipeline with u0 held at the published value.
    let pinned = TempDir::new().unwrap();
    let note = match cli_reports(pinned.path(), &["--u0", "141.25"]) {
        Ok((fit, check)) => historical_checks(&fit, &check).1,
        Err(e) => e,
    };
    Outcome::new(
        false,
        format!("{detail}\n      with u0 pinned at 141.25: {note}\n      attributed to dataset vintage; criteria 1-2 remain the gate"),
    )
}

fn ols_oracle() -> Outcome {
    let grid: Vec<[f64; 3]> = (0..27)
        .map(|i| {
            [
                (i / 9 + 1) as f64,
                (i / 3 % 3 + 1) as f64,
                (i % 3 + 1) as f64,
            ]
        })
        .collect();
    let (mut checked, mut skipped, mut worst) = (0usize, 0usize, 0.0f64);
    for xs in &grid {
        for ys in &grid {
            let n = 3.0;
            let sx: f64 = xs.iter().sum();
            let sy: f64 = ys.iter().sum();
            let sxx: f64 = xs.iter().map(|x| x * x).sum();
            let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
            let det = n * sxx - sx * sx;
            if det == 0.0 {
                skipped += 1;
                continue;
            }
            let slope = (n * sxy - sx * sy) / det;
            let intercept = (sy * sxx - sx * sxy) / det;
            match ols(xs, ys) {
                Ok(fit) => {
                    worst = worst
                        .max((fit.slope - slope).abs())
                        .max((fit.intercept - intercept).abs());
                    checked += 1;
                }
                Err(e) => return Outcome::new(false, format!("x={xs:?} y={ys:?}: {e}")),
            }
        }
    }
    Outcome::new(
        worst <= 1e-10,
        format!("{checked} instances, {skipped} with constant x skipped, max abs diff {worst:.1e}"),
    )
}

fn same_8_digits(a: f64, b: f64) -> bool {
    format!("{a:.7e}") == format!("{b:.7e}")
}

fn hyperbolic_recovery() -> Outcome {
    let values = (1900..=1960).map(|t| 200.0 / (2026.9 - t as f64)).collect();
    let pop = YearSeries::new_unchecked("population", Unit::BillionPersons, 1900, values);
    match fit_hyperbolic(&pop, 1900, 1960) {
        Ok(fit) => Outcome::new(
            same_8_digits(fit.c, 200.0) && same_8_digits(fit.t_singularity, 2026.9),
            format!("C={:.10} t_s={:.10}", fit.c, fit.t_singularity),
        ),
        Err(e) => Outcome::new(false, e.to_string()),
    }
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn determinism() -> Outcome {
    let input = reference_csv();
    let input = input.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["fit"],
        vec!["fit", "--format", "csv"],
        vec!["fit-pop"],
        vec!["fit-pop", "--format", "csv"],
        vec!["check"],
        vec!["check", "--format", "csv"],
        vec!["table"],
        vec!["table", "--format", "csv"],
        vec!["project"],
        vec!["project", "--format", "csv"],
        vec!["plot-data"],
        vec!["gen-synthetic", "--noise", "0.01", "--seed", "7"],
    ];
    let mut files = 0;
    for cmd in &commands {
        let runs: Vec<_> = (0..2)
            .map(|_| {
                let dir = TempDir::new().unwrap();
                let out = dir.path().to_str().unwrap().to_string();
                let mut args = cmd.clone();
                args.extend(["--input", input, "--output", &out]);
                run_cli(&args).map(|_| snapshot(dir.path()))
            })
            .collect();
        match (&runs[0], &runs[1]) {
            (Ok(a), Ok(b)) if a == b && !a.is_empty() => files += a.len(),
            (Ok(_), Ok(_)) => {
                return Outcome::new(false, format!("{cmd:?} output differs between runs"))
            }
            (Err(e), _) | (_, Err(e)) => return Outcome::new(false, e.clone()),
        }
    }
    Outcome::new(
        true,
        format!(
            "{} invocations, {files} files byte-identical across two runs",
            commands.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("synthetic round trip", synthetic_round_trip),
        ("noisy round trip, 20 seeds", noisy_round_trip),
        ("materialized energy anchor", table_anchor_identity),
        ("model anchor evaluation", model_anchor_evaluation),
        ("derived p and q arithmetic", derived_pq_arithmetic),
        ("historical reproduction", historical_reproduction),
        ("OLS normal-equation oracle", ols_oracle),
        ("hyperbolic exact recovery", hyperbolic_recovery),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
