use std::process::{Command, Output};

use serde_json::Value;

fn qmflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmflab"))
        .args(args)
        .env_remove("QMFLAB_BUDGET_PAIRS")
        .env_remove("QMFLAB_BUDGET_BYTES")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = qmflab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn fixture_path(name: &str) -> String {
    format!("{}/../core/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn validate_accepts_fixture_file() {
    let v = json(&["validate", "--network", &fixture_path("figconn")]);
    assert_eq!(v["connected"], true);
    assert_eq!(v["vertices"], 2);
    assert_eq!(v["edges"], 6);
}

#[test]
fn validate_rejects_malformed_and_disconnected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"name": "bad", "vertices": [{"id": "v", "degree": 2}], "edges": [
            {"kind": "input", "end": {"vertex": "v", "slot": 1}},
            {"kind": "output", "end": {"vertex": "v", "slot": 3}}]}"#,
    )
    .unwrap();
    let out = qmflab(&["validate", "--network", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("slot"));

    let out = qmflab(&["validate", "--network", "two_scalars"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not connected"));

    let out = qmflab(&["validate", "--network", "no_such_network"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mincut_reports_value_and_case() {
    let v = json(&["mincut", "--network", "fignocut"]);
    assert_eq!(v["mc"], 2);
    assert_eq!(v["case"], "case_iii");
    assert_eq!(v["paths"].as_array().unwrap().len(), 2);
    assert_eq!(v["cut"]["cut_set"].as_array().unwrap().len(), 2);

    let v = json(&["mincut", "--network", "figSlessT"]);
    assert_eq!((v["mc"].as_u64(), v["case"].as_str()), (Some(1), Some("case_i")));
    assert_eq!(json(&["mincut", "--network", "identity"])["mc"], 1);
}

#[test]
fn moments_exact_polynomials() {
    let v = json(&["moments-exact", "--network", "figconn", "--k", "1"]);
    assert_eq!(v["coefficients"], serde_json::json!({"6": 1, "3": 1}));
    let v = json(&["moments-exact", "--network", "figconn", "--k", "1", "--ensemble", "independent"]);
    assert_eq!(v["coefficients"], serde_json::json!({"6": 1}));
    let v = json(&["moments-exact", "--network", "chain_d2", "--k", "3"]);
    assert_eq!(v["coefficients"], serde_json::json!({"4": 5, "2": 1}));
    let v = json(&["moments-exact", "--network", "figconn", "--product", "1,1"]);
    assert_eq!((v["c_max"].as_u64(), v["n_max"].as_u64()), (Some(12), Some(1)));
    assert_eq!(v["factors"], serde_json::json!([1, 1]));
}

#[test]
fn moments_exact_budget_exit_code() {
    let out = qmflab(&["moments-exact", "--network", "fignum_candidate", "--k", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_qmflab"))
        .args(["moments-exact", "--network", "fignocut", "--k", "2"])
        .env("QMFLAB_BUDGET_PAIRS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn moments_mc_near_exact_value() {
    let v = json(&[
        "moments-mc", "--network", "chain_d2", "--k", "2", "--N", "5", "--samples", "10000", "--seed", "7",
    ]);
    let (mean, se) = (v["mean"].as_f64().unwrap(), v["stderr"].as_f64().unwrap());
    assert!((mean - 250.0).abs() <= 3.0 * se, "{mean} +- {se}");
    assert_eq!(v["config"]["N"], 5);
}

#[test]
fn spectrum_csv_format() {
    let out = qmflab(&["spectrum", "--network", "fignum_candidate", "--N", "20", "--seed", "1", "--no-timestamp"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["# network: fignum_candidate", "# N: 20", "# seed: 1", "# ensemble: identical", "# divisor: 8e3"] {
        assert!(text.contains(key), "missing {key}");
    }
    assert!(text.lines().any(|l| l == "index,sigma,sigma_normalized"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 400);
    let top: f64 = rows[0][2].parse().unwrap();
    assert!(top > 2.0 && top < 2.6, "largest normalized value {top}");

    let out = qmflab(&["spectrum", "--network", "identity", "--N", "5", "--no-timestamp"]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| (r[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12));

    let out = qmflab(&["spectrum", "--chgue", "400", "--no-timestamp"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# network: chgue") && text.contains("# divisor: 2e1"));
    assert_eq!(csv_rows(&text).len(), 400);
}

#[test]
fn output_is_deterministic_and_timestamp_optional() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = qmflab(&[
            "rank-scan", "--network", "fignum_candidate", "--N-range", "2..5", "--samples", "2", "--seed", "3",
            "--jobs", "2", "--no-timestamp", "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let stamped = qmflab(&["spectrum", "--network", "chain_d2", "--N", "4"]);
    let plain = qmflab(&["spectrum", "--network", "chain_d2", "--N", "4", "--no-timestamp"]);
    let stamped = String::from_utf8(stamped.stdout).unwrap();
    let plain = String::from_utf8(plain.stdout).unwrap();
    let mut lines = stamped.lines();
    assert!(lines.next().unwrap().starts_with("# generated"));
    assert_eq!(lines.collect::<Vec<_>>(), plain.lines().collect::<Vec<_>>());

    let x = qmflab(&["moments-mc", "--network", "figconn", "--N", "2", "--samples", "200", "--seed", "1"]);
    let y = qmflab(&["moments-mc", "--network", "figconn", "--N", "2", "--samples", "200", "--seed", "1"]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn rank_scan_mod4_pattern() {
    let out = qmflab(&["rank-scan", "--network", "fignum_candidate", "--N-range", "2..9", "--no-timestamp"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "N,N_mod_4,qmc,rank,deficit,min_sigma,next_sigma"));
    assert!(!text.contains("# ambiguous"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let n: usize = r[0].parse().unwrap();
        let want = if n % 4 == 2 || n % 4 == 3 { "1" } else { "0" };
        assert_eq!(r[1], (n % 4).to_string());
        assert_eq!(r[2], (n * n).to_string());
        assert_eq!(r[4], want, "N = {n}");
    }

    let out = qmflab(&["rank-scan", "--network", "chain_d2", "--N-range", "7..7", "--no-timestamp"]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][4], "0");
}

#[test]
fn kron_check_ranks_multiply() {
    let v = json(&["kron-check", "--network", "chain_d2", "--N1", "2", "--N2", "2"]);
    assert_eq!(v["rank_composed"], 4);
    assert_eq!(v["product_of_ranks"], 4);
    assert_eq!(v["holds"], true);
    let v = json(&["kron-check", "--network", "fignum_candidate", "--N1", "2", "--N2", "3"]);
    assert!(v["rank_composed"].as_u64() >= v["product_of_ranks"].as_u64());
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(qmflab(&["rank-scan", "--network", "chain_d2", "--N-range", "5..2"]).status.code(), Some(2));
    assert_eq!(qmflab(&["moments-exact", "--network", "figconn", "--k", "0"]).status.code(), Some(2));
}
