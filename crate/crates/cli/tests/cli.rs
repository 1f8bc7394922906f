use serde_json::Value;
use std::process::{Command, Output};

fn dampwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dampwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn summary(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = dampwave(&all);
    let v = serde_json::from_slice(&out.stdout).expect("json summary");
    (out.status.code().unwrap(), v)
}

fn check<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

fn csv_body(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn single(t: &str, r: &str) -> Vec<String> {
    [
        "--t-start",
        t,
        "--t-stop",
        t,
        "--t-points",
        "1",
        "--r-start",
        r,
        "--r-stop",
        r,
        "--r-points",
        "1",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn with<'a>(head: &[&'a str], tail: &'a [String]) -> Vec<&'a str> {
    head.iter()
        .copied()
        .chain(tail.iter().map(String::as_str))
        .collect()
}

#[test]
fn eval_phi_trigonometric_table() {
    let grid = single("3", "2");
    let out = dampwave(&with(&["eval-phi", "--mu", "2"], &grid));
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_body(&out);
    let header = &rows[0];
    assert!(header.contains(&"closed_phi1".to_string()));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let row = &rows[1];
    let closed_dev: f64 = row[col("closed_deviation")].parse().unwrap();
    assert!(closed_dev <= 1e-8);
    // closed form: (cos 6 + sin(6)/2) / 4
    let phi1: f64 = row[col("phi1")].parse().unwrap();
    assert!((phi1 - (6f64.cos() + 6f64.sin() / 2.0) / 4.0).abs() < 1e-12);
}

#[test]
fn eval_phi_initial_row_and_oracle() {
    let grid = single("0", "1");
    let out = dampwave(&with(&["eval-phi", "--mu", "3"], &grid));
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_body(&out);
    let v: Vec<f64> = rows[1].iter().map(|x| x.parse().unwrap()).collect();
    assert!((v[2] - 1.0).abs() < 1e-14 && v[3].abs() < 1e-14);

    let grid = single("50", "0.1");
    let (code, s) = summary(&with(&["eval-phi", "--mu", "4"], &grid));
    assert_eq!(code, 0);
    assert!(s["results"]["max_oracle_deviation"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn decay_operator_norm_cases() {
    for (kappa, want) in [("0", -1.0), ("0.5", -1.5)] {
        let (code, s) = summary(&["decay", "--mu", "3", "--kappa", kappa]);
        assert_eq!(code, 0);
        let e = s["results"]["fit"]["exponent"].as_f64().unwrap();
        assert!((e - want).abs() <= 0.05, "{e}");
    }
    let (code, s) = summary(&["decay", "--mu", "4", "--kappa", "limit"]);
    assert_eq!(code, 0);
    assert_eq!(s["results"]["predicted_exponent"].as_f64(), Some(-2.0));
}

#[test]
fn decay_psi_and_energy() {
    let (code, s) = summary(&["decay", "--quantity", "psi", "--index", "0,0,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(s["results"]["fit"]["log_factor"], true);
    let (code, s) = summary(&[
        "decay",
        "--quantity",
        "energy",
        "--mu",
        "3",
        "--kappa",
        "limit",
        "--data",
        "weighted:0.5",
        "--t-start",
        "10",
        "--t-stop",
        "1e4",
        "--t-points",
        "8",
    ]);
    assert_eq!(code, 0, "{s}");
    assert!((s["results"]["fit"]["exponent"].as_f64().unwrap() + 3.0).abs() < 0.05);
}

#[test]
fn config_errors_exit_two() {
    let out = dampwave(&["decay", "--t-start", "10", "--t-stop", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_grid"));
    assert_eq!(
        dampwave(&["decay", "--t-points", "x"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dampwave(&["decay", "--kappa", "lots"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dampwave(&["decay", "--data", "annulus:3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dampwave(&["decay", "--quantity", "psi"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dampwave(&["scatter", "--kappa", "0"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"mu\": 3.0,\n  \"tol\": ,\n}\n").unwrap();
    let out = dampwave(&["decay", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn scatter_summaries() {
    let (code, s) = summary(&["scatter", "--mu", "3"]);
    assert_eq!(code, 0);
    assert!(s["results"]["max_det_deviation"].as_f64().unwrap() <= 1e-9);
    let (code, s) = summary(&["scatter", "--mu", "5"]);
    assert_eq!(code, 0);
    assert!((s["results"]["fit"]["exponent"].as_f64().unwrap() + 1.0).abs() <= 0.1);
    // at mu = 2 the limit is [[ [r], 0 ], [ 1/<r>, 1 ]]: it tends to I only as r -> infinity
    let (code, s) = summary(&["scatter", "--mu", "2"]);
    assert_eq!(code, 1);
    assert_eq!(check(&s, "mu2-identity")["passed"], false);
    assert_eq!(check(&s, "mu2-closed-form")["passed"], true);
    assert_eq!(check(&s, "determinant-law")["passed"], true);
}

#[test]
fn wronskian_grid() {
    let (code, s) = summary(&["wronskian"]);
    assert_eq!(code, 0);
    assert_eq!(s["results"]["points"], 28 * 1000);
    assert!(s["results"]["max_rel_deviation"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn selftest_gate() {
    let (code, s) = summary(&["selftest"]);
    assert_eq!(code, 0, "{}", s["results"]);

    let (code, s) = summary(&["selftest", "--mutate", "m11"]);
    assert_eq!(code, 1);
    assert_eq!(
        s["results"]["failed"],
        serde_json::json!(["scatter/sign-audit-m11"])
    );

    let (code, s) = summary(&["selftest", "--tol-override", "0"]);
    assert_eq!(code, 1);
    let failed = s["results"]["failed"].as_array().unwrap().len();
    assert!(failed >= 15, "{failed}");
}

#[test]
fn output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = dampwave(&["scatter", "--mu", "2.5", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.csv.summary.json")).unwrap())
            .unwrap();

    // the echoed config reproduces the run
    let text = String::from_utf8(text).unwrap();
    let cfg_line = text
        .lines()
        .find_map(|l| l.strip_prefix("# config "))
        .unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, cfg_line).unwrap();
    let c = dir.path().join("c.csv");
    let out = dampwave(&[
        "scatter",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&c).unwrap(), text);
    let hash = summary["config_hash"].as_str().unwrap();
    assert!(text.contains(&format!("# config-hash {hash}")));
}

#[test]
fn csv_numbers_carry_seventeen_digits() {
    let out = dampwave(&[
        "scatter",
        "--mu",
        "3",
        "--t-points",
        "2",
        "--t-start",
        "1e2",
        "--t-stop",
        "1e5",
    ]);
    // two samples cannot be fitted
    assert_eq!(out.status.code(), Some(1));
    let out = dampwave(&["decay", "--t-points", "8"]);
    let rows = csv_body(&out);
    assert_eq!(rows[0], ["t", "sup_value", "argmax_r"]);
    for f in &rows[1] {
        let mantissa = f.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{f}");
    }
}
