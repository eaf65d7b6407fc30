//! End-to-end runs of the `rodtip` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rodtip::GaussianState;

fn rodtip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rodtip"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Numeric rows of a CSV file, skipping comments and the header.
fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn tiptime_headline() {
    let out = rodtip(&["tiptime", "--hbar", "0.01", "--sigma", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let t = v["tiptime"]["t_tip_exact"].as_f64().unwrap();
    assert!((t - 0.806).abs() < 5e-4, "{t}");
    assert_eq!(v["tiptime"]["regime"], "intermediate");
    assert_eq!(v["config"]["parameters"]["hbar"], 0.01);
    assert!(v["tiptime"]["validity"]["is_valid"].as_bool().unwrap());
}

#[test]
fn exit_codes() {
    let zero_sigma = rodtip(&["tiptime", "--sigma", "0"]);
    assert_eq!(zero_sigma.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&zero_sigma.stderr).contains("sigma must lie in (0, pi/2)"));

    let zero_hbar = rodtip(&["tiptime", "--hbar", "0"]);
    assert_eq!(zero_hbar.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&zero_hbar.stderr).contains("hbar must be positive"));

    assert_eq!(rodtip(&["tiptime", "--units", "fahrenheit"]).status.code(), Some(2));
}

#[test]
fn config_file_problems_are_reported_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "hbar = -1.0\ngrid = 8\nfoo = 3\n").unwrap();
    let out = rodtip(&["tiptime", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown key `foo`"), "{err}");

    fs::write(&cfg, "hbar = -1.0\ngrid = 8\n").unwrap();
    let out = rodtip(&["tiptime", "--config", cfg.to_str().unwrap()]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("2 problems") && err.contains("hbar") && err.contains("grid"),
        "{err}"
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "hbar = 0.5\nsigma = 0.2\n").unwrap();
    let out = rodtip(&["tiptime", "--config", cfg.to_str().unwrap(), "--hbar", "0.01"]);
    let v = json(&out);
    assert_eq!(v["config"]["parameters"]["hbar"], 0.01);
    assert_eq!(v["config"]["sigma"], 0.2);
}

#[test]
fn si_rod_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("si.toml");
    fs::write(
        &cfg,
        "units_mode = \"si\"\nmass = 0.01\nhalf_length = 0.05\nsigma = 1e-15\n",
    )
    .unwrap();
    let out = rodtip(&["tiptime", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["config"]["parameters"]["hbar"], 1.054571817e-34);
    assert_eq!(v["tiptime"]["regime"], "classical");
}

#[test]
fn evolve_at_zero_time_returns_initial_density() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = rodtip(&[
        "evolve", "--t", "0", "--engine", "analytic", "--engine", "numeric", "--grid", "256", "--out", out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let state = GaussianState::new(0.1).unwrap();
    for name in ["analytic_0000.csv", "numeric_0000.csv"] {
        let (header, rows) = csv_rows(&dir.path().join(name));
        assert_eq!(header, ["theta", "re_psi", "im_psi", "density"]);
        assert_eq!(rows.len(), 256);
        for r in rows {
            assert!((r[3] - state.density(r[0])).abs() < 1e-12, "{name}: {r:?}");
        }
    }
}

#[test]
fn evolve_both_engines_writes_difference_norms_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodtip(&[
        "evolve",
        "--hbar",
        "0.1",
        "--sigma",
        "0.3",
        "--engine",
        "both",
        "--t",
        "2",
        "--snapshot-interval",
        "0.5",
        "--theta-points",
        "0,0.3,0.5,0.7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&dir.path().join("comparison.csv"));
    assert_eq!(header, ["time", "difference_norm", "density_linf_relative"]);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][1], 0.0);
    assert!(dir.path().join("numeric_0004.csv").exists());

    let svg = fs::read_to_string(dir.path().join("density_vs_time.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 8);
    let curves = &json(&out)["evolve"]["curves"];
    assert_eq!(curves["peaks_ordered"], true);
    assert_eq!(curves["curves"][0]["strictly_decreasing"], true);
}

#[test]
fn evolve_refuses_times_past_the_propagator_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodtip(&[
        "evolve",
        "--hbar",
        "0.1",
        "--sigma",
        "0.3",
        "--t",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn validate_passes_and_fails_on_tolerance() {
    let ok = rodtip(&["validate", "--hbar", "0.01", "--sigma", "0.1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["validate"]["passed"], true);

    let strict = rodtip(&[
        "validate",
        "--hbar",
        "0.01",
        "--sigma",
        "0.1",
        "--tolerance-full",
        "1e-6",
    ]);
    assert_eq!(strict.status.code(), Some(1));
    assert_eq!(json(&strict)["validate"]["passed"], false);
}

fn sweep_into(dir: &Path, jobs: &str) -> Output {
    rodtip(&[
        "sweep",
        "--hbar",
        "1",
        "--variable",
        "sigma",
        "--from",
        "0.01",
        "--to",
        "0.05",
        "--points",
        "12",
        "--outputs",
        "tip-exact,tip-approx,validity-ratio,uncertainty-product",
        "--jobs",
        jobs,
        "--out",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn sweep_outputs_are_deterministic_and_carry_config() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(sweep_into(a.path(), "1").status.code(), Some(0));
    assert_eq!(sweep_into(b.path(), "4").status.code(), Some(0));
    for name in ["sweep.csv", "sweep.json", "sweep.svg"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
    let csv = fs::read_to_string(a.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("# config: {"));
    let row = csv.lines().nth(2).unwrap();
    // 17 significant digits
    assert!(row.starts_with("1.0000000000000000e-2,"), "{row}");

    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(v["config"]["sweep"]["variable"], "sigma");
    let fit = &v["sweep"]["fits"][0];
    assert_eq!(fit["output"], "tip_exact");
    assert!((fit["fit"]["exponent"].as_f64().unwrap() - 2.0).abs() < 0.05);
}

#[test]
fn hbar_sweep_with_sqrt_scaled_width() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodtip(&[
        "sweep",
        "--hbar",
        "0.01",
        "--sigma",
        "0.1",
        "--variable",
        "hbar",
        "--from",
        "0.01",
        "--to",
        "1e-5",
        "--points",
        "16",
        "--sqrt-hbar-sigma",
        "--probe-theta",
        "0.3",
        "--probe-t",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let trends = &json(&out)["sweep"]["trends"];
    let probe = trends
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["output"] == "density_probe")
        .unwrap();
    assert_eq!(probe["strictly_decreasing"], true);
}

#[test]
fn sweep_without_variable_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = rodtip(&["sweep", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
