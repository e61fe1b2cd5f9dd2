//! End-to-end runs of the binary: exit codes, regression output, determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use frac_nehari::field::random_smooth_field;
use frac_nehari::functionals::{gagliardo_sq, hardy_integral};
use frac_nehari::{FractionalParams, GridSpec};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_frac-nehari"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn constants_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"problem": {"s1": 0.25, "s2": 0.25}}"#);
    let out = run(&["constants", "--config", &cfg]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["first"]["critical_exponent"].as_f64(), Some(4.0));
    assert!(v["first"]["hardy_constant"].as_f64().unwrap() > 0.0);

    let cfg = write_config(dir.path(), r#"{"problem": {"dim": 3, "s1": 0.75, "s2": 0.75}, "grid": {"points": 16}}"#);
    let out = run(&["constants", "--config", &cfg]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["second"]["critical_exponent"].as_f64(), Some(4.0));
}

#[test]
fn rejected_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (text, needle) in [
        (r#"{"problem": {"dim": 4, "s1": 0.5, "s2": 0.5}}"#, "dim"),
        (r#"{"problem": {"lambda2": 0.06}}"#, "lambda"),
        (r#"{"grid": {"points": 4}}"#, "points"),
        (r#"{"problem": "#, "line"),
    ] {
        let cfg = write_config(dir.path(), text);
        for cmd in ["constants", "validate"] {
            let out = run(&[cmd, "--config", &cfg]);
            assert_eq!(code(&out), 2, "{text}");
            assert!(String::from_utf8_lossy(&out.stderr).contains(needle), "{text}");
        }
    }
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("gaussian_u.csv")).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[7] = "oops";
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, lines.join("\n")).unwrap();
    let out = run(&[
        "energy",
        "--u",
        bad.to_str().unwrap(),
        "--v",
        fixture("gaussian_v.csv").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 8"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn energy_matches_regression_fixture() {
    let expected = fs::read_to_string(fixture("gaussian_energy.json")).unwrap();
    let u = fixture("gaussian_u.csv");
    let v = fixture("gaussian_v.csv");
    let args = ["energy", "--u", u.to_str().unwrap(), "--v", v.to_str().unwrap()];
    let first = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(String::from_utf8(first.stdout.clone()).unwrap(), expected);
    for threads in ["1", "3"] {
        let mut a = args.to_vec();
        a.extend(["--threads", threads]);
        assert_eq!(run(&a).stdout, first.stdout);
    }
}

#[test]
fn input_paths_resolve_against_the_config() {
    let cfg = fixture("gaussian.json");
    let out = run(&["energy", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let expected = fs::read_to_string(fixture("gaussian_energy.json")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn zero_fields_report_zero_energy_and_no_phi() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("gaussian_u.csv")).unwrap();
    let zero: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                format!("{l}\n")
            } else {
                format!("{},0\n", l.split(',').next().unwrap())
            }
        })
        .collect();
    let z = dir.path().join("zero.csv");
    fs::write(&z, zero).unwrap();
    let zs = z.to_str().unwrap();
    let out = run(&["energy", "--u", zs, "--v", zs]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["energy"].as_f64(), Some(0.0));
    assert!(v["breakdown"].as_object().unwrap().values().all(|x| x.as_f64() == Some(0.0)));
    assert!(v["phi"].is_null());
    assert!(v["notes"]["phi"].as_str().unwrap().contains("(0, 0)"));

    let out = run(&["project", "--u", zs, "--v", zs]);
    assert_eq!(code(&out), 3);
}

#[test]
fn project_writes_manifold_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let u = fixture("gaussian_u.csv");
    let v = fixture("gaussian_v.csv");
    let out = run(&[
        "project",
        "--u",
        u.to_str().unwrap(),
        "--v",
        v.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["root_count"].as_u64(), Some(1));
    assert!(report["residual"].as_f64().unwrap() <= report["tolerance"].as_f64().unwrap());
    assert!(report["max_rel_spread"].as_f64().unwrap() < 1e-10);
    assert_eq!(fs::read(out_dir.join("project.json")).unwrap(), out.stdout);

    // projecting the projected pair again gives τ = 1
    let again = run(&[
        "project",
        "--u",
        out_dir.join("projected_u.csv").to_str().unwrap(),
        "--v",
        out_dir.join("projected_v.csv").to_str().unwrap(),
    ]);
    let report: serde_json::Value = serde_json::from_slice(&again.stdout).unwrap();
    assert!((report["tau"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn solve_emits_report_and_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"grid": {"points": 64}, "solve": {"seed_count": 2, "max_iters": 300}}"#);
    let out_dir = dir.path().join("solve");
    let out = run(&["solve", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["label"], "Nehari level");
    assert!(report["level"].as_f64().unwrap() > 0.0);
    assert_eq!(report["restarts"]["seeds"], serde_json::json!([3, 4]));
    assert!(out_dir.join("u.csv").exists() && out_dir.join("v.csv").exists());
    let again = run(&["solve", "--config", &cfg, "--seed", "3", "--threads", "1"]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn validate_passes_and_is_deterministic() {
    let out = run(&["validate"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 8);
    let single = run(&["validate", "--threads", "1"]);
    assert_eq!(single.stdout, out.stdout);
}

// The Hardy check must fail once Λ is inflated past the largest observed
// ratio [u]² / (Λ ∫u²/|x|^{2s}); that ratio is recomputed here directly.
#[test]
fn corrupted_hardy_constant_fails_validation() {
    let grid = GridSpec::new(1, 10.0, 512, true).unwrap();
    let p = FractionalParams::new(1, 0.3, 0.0).unwrap();
    let lambda = p.hardy_constant();
    let min_slack = (0..20)
        .map(|k| {
            let u = random_smooth_field(&grid, k, 0.5).unwrap();
            gagliardo_sq(&u, 0.3) / (lambda * hardy_integral(&u, 0.3).unwrap())
        })
        .fold(f64::INFINITY, f64::min);
    let scale = 2.0 * min_slack;

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!(r#"{{"validate": {{"hardy_scale": {scale}}}}}"#));
    let out = run(&["validate", "--config", &cfg]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("hardy_inequality"));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["hardy_inequality"]);
}
