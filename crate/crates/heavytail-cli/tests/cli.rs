//! End-to-end tests of the `heavytail` binary: output formats, manifest
//! embedding, reproducibility and the exit-code contract
//! (0 success, 1 usage, 2 numerical failure, 3 verification failure).

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn heavytail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heavytail"))
        .args(args)
        .env_remove("HEAVYTAIL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Splits a CSV artifact into (manifest json, header, data rows).
fn split_csv(text: &str) -> (serde_json::Value, String, Vec<String>) {
    let mut lines = text.lines();
    let manifest_line = lines.next().expect("manifest line");
    let manifest = manifest_line
        .strip_prefix("# manifest: ")
        .expect("manifest prefix");
    let header = lines.next().expect("header").to_string();
    let rows = lines.map(str::to_string).collect();
    (
        serde_json::from_str(manifest).expect("manifest json"),
        header,
        rows,
    )
}

fn without_timestamp(mut manifest: serde_json::Value) -> serde_json::Value {
    manifest
        .as_object_mut()
        .expect("object")
        .remove("timestamp_unix_ms");
    manifest
}

#[test]
fn sample_writes_reproducible_csv() {
    let args = [
        "sample",
        "--transform",
        "pm",
        "--theta",
        "0.5",
        "--weights",
        "0.3,0.7",
        "--n",
        "1000",
        "--seed",
        "7",
    ];
    let first = heavytail(&args);
    let second = heavytail(&args);
    assert_eq!(exit_code(&first), 0);
    let (manifest_a, header_a, rows_a) = split_csv(&stdout_str(&first));
    let (manifest_b, _, rows_b) = split_csv(&stdout_str(&second));
    assert_eq!(header_a, "index,value");
    assert_eq!(rows_a.len(), 1000);
    assert!(rows_a[0].starts_with("0,"));
    // identical data, manifests equal up to the timestamp
    assert_eq!(rows_a, rows_b);
    assert_eq!(
        without_timestamp(manifest_a.clone()),
        without_timestamp(manifest_b)
    );
    assert_eq!(manifest_a["seed"], 7);
    assert_eq!(manifest_a["subcommand"], "sample");
    // manifest echoed on stderr
    assert!(String::from_utf8_lossy(&first.stderr).contains("manifest: "));
}

#[test]
fn sample_seed_defaults_to_environment() {
    let explicit = heavytail(&[
        "sample",
        "--transform",
        "abs",
        "--theta",
        "0.2",
        "--weights",
        "0.5,0.5",
        "--n",
        "50",
        "--seed",
        "123",
    ]);
    let via_env = Command::new(env!("CARGO_BIN_EXE_heavytail"))
        .args([
            "sample",
            "--transform",
            "abs",
            "--theta",
            "0.2",
            "--weights",
            "0.5,0.5",
            "--n",
            "50",
        ])
        .env("HEAVYTAIL_SEED", "123")
        .output()
        .expect("binary runs");
    let (manifest, _, rows) = split_csv(&stdout_str(&explicit));
    let (manifest_env, _, rows_env) = split_csv(&stdout_str(&via_env));
    assert_eq!(manifest["seed"], 123);
    assert_eq!(manifest_env["seed"], 123);
    assert_eq!(rows, rows_env);
}

#[test]
fn sample_usage_errors_exit_one() {
    // theta outside (-1, 1)
    let out = heavytail(&[
        "sample",
        "--transform",
        "pm",
        "--theta",
        "1.5",
        "--weights",
        "0.5,0.5",
        "--n",
        "10",
    ]);
    assert_eq!(exit_code(&out), 1);
    // weights that do not sum to one
    let out = heavytail(&[
        "sample",
        "--transform",
        "pm",
        "--theta",
        "0.5",
        "--weights",
        "0.5,0.6",
        "--n",
        "10",
    ]);
    assert_eq!(exit_code(&out), 1);
    // no covariance source at all
    let out = heavytail(&[
        "sample",
        "--transform",
        "pm",
        "--weights",
        "0.5,0.5",
        "--n",
        "10",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn sample_covariance_file_roundtrip_and_theta_conflict() {
    let dir = tempfile::tempdir().unwrap();
    let cov_path = dir.path().join("cov.txt");
    std::fs::write(&cov_path, "1.0 0.5\n0.5 1.0\n").unwrap();
    let cov = cov_path.to_str().unwrap();

    let out = heavytail(&[
        "sample",
        "--transform",
        "bm",
        "--cov",
        cov,
        "--weights",
        "0.4,0.6",
        "--n",
        "100",
        "--seed",
        "3",
    ]);
    assert_eq!(exit_code(&out), 0);
    let (manifest, _, rows) = split_csv(&stdout_str(&out));
    assert_eq!(rows.len(), 100);
    assert_eq!(manifest["parameters"]["covariance"][1], 0.5);

    // --theta and --cov are mutually exclusive
    let out = heavytail(&[
        "sample",
        "--transform",
        "bm",
        "--cov",
        cov,
        "--theta",
        "0.5",
        "--weights",
        "0.4,0.6",
        "--n",
        "10",
    ]);
    assert_eq!(exit_code(&out), 1);

    // missing file is a usage error
    let missing = dir.path().join("nope.txt");
    let out = heavytail(&[
        "sample",
        "--transform",
        "bm",
        "--cov",
        missing.to_str().unwrap(),
        "--weights",
        "0.4,0.6",
        "--n",
        "10",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn singular_covariance_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cov_path = dir.path().join("singular.txt");
    std::fs::write(&cov_path, "1.0 1.0\n1.0 1.0\n").unwrap();
    let out = heavytail(&[
        "sample",
        "--transform",
        "pm",
        "--cov",
        cov_path.to_str().unwrap(),
        "--weights",
        "0.5,0.5",
        "--n",
        "10",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("positive definite"));
}

#[test]
fn density_uncorrelated_matches_cauchy_pdf() {
    let out = heavytail(&[
        "density",
        "--transform",
        "abs",
        "--theta",
        "0",
        "--weights",
        "0.3,0.7",
        "--grid",
        "-5:5:21",
    ]);
    assert_eq!(exit_code(&out), 0);
    let (_, header, rows) = split_csv(&stdout_str(&out));
    assert_eq!(header, "v,g_v,err_est");
    assert_eq!(rows.len(), 21);
    for row in rows {
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
        let (v, g, err) = (fields[0], fields[1], fields[2]);
        let expected = 1.0 / (PI * (1.0 + v * v));
        assert!((g - expected).abs() < 1e-8, "v={v}: {g} vs {expected}");
        assert!(err >= 0.0);
    }
}

#[test]
fn density_single_point_exceeds_inv_pi_for_positive_theta() {
    let out = heavytail(&[
        "density",
        "--transform",
        "abs",
        "--theta",
        "0.1",
        "--weights",
        "0.5,0.5",
        "--grid",
        "0:0:1",
    ]);
    assert_eq!(exit_code(&out), 0);
    let (_, _, rows) = split_csv(&stdout_str(&out));
    assert_eq!(rows.len(), 1);
    let g: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
    assert!(g > 1.0 / PI);
}

#[test]
fn density_usage_errors_exit_one() {
    for grid in ["a:b:c", "0:5", "0:5:0", "5:0:11", "1:2:1"] {
        let out = heavytail(&[
            "density",
            "--transform",
            "abs",
            "--theta",
            "0",
            "--weights",
            "0.5,0.5",
            "--grid",
            grid,
        ]);
        assert_eq!(exit_code(&out), 1, "grid `{grid}` should be rejected");
    }
    // density knows only abs and bm
    let out = heavytail(&[
        "density",
        "--transform",
        "pm",
        "--theta",
        "0",
        "--weights",
        "0.5,0.5",
        "--grid",
        "0:1:2",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn tail_rows_match_analytic_cauchy_values() {
    let out = heavytail(&[
        "tail",
        "--transform",
        "bm",
        "--theta",
        "0",
        "--weights",
        "0.4,0.6",
        "--v-values",
        "100,1000,10000",
    ]);
    assert_eq!(exit_code(&out), 0);
    let (_, header, rows) = split_csv(&stdout_str(&out));
    assert_eq!(header, "v,v2_gv");
    let mut previous = 0.0;
    for row in &rows {
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
        let (v, t) = (fields[0], fields[1]);
        let expected = v * v / (PI * (1.0 + v * v));
        assert!((t - expected).abs() < 1e-9, "v={v}: {t} vs {expected}");
        assert!(t > previous, "tail functional should increase toward 1/pi");
        previous = t;
    }
    assert!((previous - 1.0 / PI).abs() < 1e-3);

    let out = heavytail(&[
        "tail",
        "--transform",
        "bm",
        "--theta",
        "0",
        "--weights",
        "0.4,0.6",
        "--v-values",
        "",
    ]);
    assert_eq!(exit_code(&out), 1);
    let out = heavytail(&[
        "tail",
        "--transform",
        "bm",
        "--theta",
        "0",
        "--weights",
        "0.4,0.6",
        "--v-values",
        "0",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn derivative_reports_both_routes() {
    let out = heavytail(&["derivative", "--transform", "abs", "--weights", "0.5,0.5"]);
    assert_eq!(exit_code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let quadrature = report["quadrature_value"].as_f64().unwrap();
    let fd = report["finite_difference_value"].as_f64().unwrap();
    assert!((quadrature - 0.125).abs() < 1e-8);
    assert!((quadrature - fd).abs() < 1e-5);
    assert_eq!(report["h"].as_f64().unwrap(), 1e-4);

    let out = heavytail(&["derivative", "--transform", "bm", "--weights", "0.5,0.5"]);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let quadrature = report["quadrature_value"].as_f64().unwrap();
    assert!((quadrature - 1.0 / (4.0 * PI)).abs() < 1e-8);

    let out = heavytail(&["derivative", "--transform", "abs", "--weights", "1,0"]);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["quadrature_value"].as_f64().unwrap(), 0.0);
}

#[test]
fn sweep_flags_cauchy_only_at_theta_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.json");
    let out = heavytail(&[
        "sweep",
        "--transform",
        "abs",
        "--theta-grid",
        "-0.9:0.9:0.1",
        "--weights",
        "0.5,0.5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let verdicts = report["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 19);
    for (i, v) in verdicts.iter().enumerate() {
        // the grid hits zero at index 9; everywhere else the law is not Cauchy
        assert_eq!(v["is_cauchy"].as_bool().unwrap(), i == 9, "index {i}");
        assert!((v["normalization"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    }
    assert!(report["manifest"]["parameters"]["theta_grid"].is_string());

    let out = heavytail(&[
        "sweep",
        "--transform",
        "pm",
        "--theta-grid",
        "-0.1:0.1:0.1",
        "--weights",
        "0.5,0.5",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("sample"));
}

#[test]
fn sweep_bm_has_the_same_shape() {
    let out = heavytail(&[
        "sweep",
        "--transform",
        "bm",
        "--theta-grid",
        "-0.1:0.1:0.1",
        "--weights",
        "0.3,0.7",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let flags: Vec<bool> = report["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["is_cauchy"].as_bool().unwrap())
        .collect();
    assert_eq!(flags, vec![false, true, false]);
}

#[test]
fn verify_quick_suite_passes() {
    let out = heavytail(&["verify", "--suite", "quick"]);
    assert_eq!(exit_code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["suite"], "quick");
    let criteria = report["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 9); // quick skips the 1e7-draw comparison
    assert!(criteria.iter().all(|c| c["passed"] == true));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(exit_code(&heavytail(&["--help"])), 0);
    assert_eq!(exit_code(&heavytail(&["--version"])), 0);
    assert_eq!(exit_code(&heavytail(&["sample", "--help"])), 0);
    // unknown subcommand is a usage error
    assert_eq!(exit_code(&heavytail(&["frobnicate"])), 1);
}

#[test]
fn output_file_embeds_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("draws.csv");
    let out = heavytail(&[
        "sample",
        "--transform",
        "abs",
        "--theta",
        "-0.5",
        "--weights",
        "0.5,0.5",
        "--n",
        "10",
        "--seed",
        "11",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let (manifest, header, rows) = split_csv(&text);
    assert_eq!(manifest["parameters"]["theta"], -0.5);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(header, "index,value");
    assert_eq!(rows.len(), 10);
    assert!(Path::new(&out_path).exists());
}
