use std::process::{Command, Output};

use serde_json::Value;

fn ncgauge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncgauge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

/// Runs, asserts the exit code, and validates the JSON document.
fn json(args: &[&str], code: i32) -> Value {
    let out = ncgauge(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}\nstderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let errors: Vec<String> = schema().iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}");
    doc
}

fn quantity(doc: &Value, name: &str) -> Value {
    doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r["quantities"].as_array().unwrap())
        .find(|q| q[0] == name)
        .unwrap_or_else(|| panic!("no quantity {name}"))[1]
        .clone()
}

fn check<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r["checks"].as_array().unwrap())
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn check_hs_has_three_dimensional_gauge_algebra() {
    let doc = json(&["check", "hs:N=2"], 0);
    assert_eq!(doc["passed"], true);
    assert_eq!(quantity(&doc, "gauge_dim"), 3);
}

#[test]
fn check_ym_has_two_dimensional_aj() {
    let doc = json(&["check", "ym:k=2,N=2,seed=1"], 0);
    assert_eq!(quantity(&doc, "aj_dim"), 2);
}

#[test]
fn order_one_failure_exits_one() {
    let doc = json(&["check", "ym:k=2,N=2,hop=0.3"], 1);
    assert_eq!(doc["passed"], false);
}

#[test]
fn malformed_specs_exit_two() {
    for args in [
        vec!["check", "ym:k=2,N="],
        vec!["check", "nonsense"],
        vec!["fluctuate", "hs:N=1", "sideways"],
        vec!["toric-scan", "s3", "1", "3", "0.1", "--poly", "a*x"],
        vec!["toric-scan", "s3", "1", "3", "0"],
        vec!["check", "hs:N=1", "--tol", "-1"],
    ] {
        let out = ncgauge(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}

#[test]
fn localize_splits_over_the_center() {
    let doc = json(&["localize", "ym:k=3,N=2"], 0);
    let fibers = doc["fibers"].as_array().unwrap();
    assert_eq!(fibers.len(), 3);
    assert!(fibers.iter().all(|f| f["dim"] == 4));

    let doc = json(&["localize", "hs:N=2"], 0);
    assert_eq!(doc["fibers"].as_array().unwrap().len(), 1);

    let doc = json(&["localize", "comm:k=3"], 0);
    let fibers = doc["fibers"].as_array().unwrap();
    assert_eq!(fibers.len(), 3);
    assert!(fibers.iter().all(|f| f["dim"] == 1));
}

#[test]
fn fluctuations_pass() {
    for p in ["zero", "pure:seed=3", "random:seed=5"] {
        let doc = json(&["fluctuate", "ym:k=2,N=2", p], 0);
        assert_eq!(doc["command"], "fluctuate");
    }
    let doc = json(&["fluctuate", "hs:N=2", "zero"], 0);
    assert!(
        check(&doc, "zero-fluctuation")["residual"]
            .as_f64()
            .unwrap()
            < 1e-12
    );
}

#[test]
fn seeded_runs_are_deterministic() {
    let a = ncgauge(&["fluctuate", "ym:k=2,N=2", "random:seed=9", "--seed", "4"]);
    let b = ncgauge(&["fluctuate", "ym:k=2,N=2", "random:seed=9", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(doc["model"].as_str().unwrap().contains("seed=4"));
    assert_eq!(doc["seed"], 9);
}

#[test]
fn tolerance_override_is_recorded() {
    let doc = json(&["check", "hs:N=1", "--tol", "1e-6"], 0);
    assert_eq!(doc["tolerance_override"], 1e-6);
    assert_eq!(doc["tolerances"]["construction"], 1e-6);
    let doc = json(&["check", "hs:N=1"], 0);
    assert!(doc["tolerance_override"].is_null());
}

#[test]
fn csv_check_table() {
    let out = ncgauge(&["check", "hs:N=1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("report,name,statement,residual,tolerance,passed,scope\n"));
    assert!(text.lines().count() > 5);
}

fn scan(args: &[&str]) -> Vec<Vec<String>> {
    let out = ncgauge(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let mut rows = vec![header];
    for rec in r.records() {
        rows.push(rec.unwrap().iter().map(String::from).collect());
    }
    rows
}

#[test]
fn toric_scan_s3() {
    let rows = scan(&["toric-scan", "s3", "1", "3", "0.01"]);
    assert_eq!(
        rows[0],
        ["chi", "r", "s", "x", "norm", "stratum", "fiber_dim"]
    );
    let body = &rows[1..];
    assert_eq!(body.len(), 159);
    assert_eq!(body[0][6], "3");
    assert_eq!(body[body.len() - 1][6], "3");
    assert!(body[1..body.len() - 1].iter().all(|r| r[6] == "9"));
}

#[test]
fn toric_scan_s4_poles() {
    let rows = scan(&["toric-scan", "s4", "1", "2", "0.1"]);
    assert_eq!(
        rows[0],
        ["chi", "psi", "r", "s", "x", "norm", "stratum", "fiber_dim"]
    );
    let poles: Vec<_> = rows[1..].iter().filter(|r| r[6] == "pole").collect();
    assert!(!poles.is_empty());
    assert!(poles.iter().all(|r| r[7] == "1"));
}

#[test]
fn toric_scan_trivial_phase() {
    let rows = scan(&["toric-scan", "s3", "0", "1", "0.1"]);
    assert!(rows[1..].iter().all(|r| r[6] == "1"));
}

#[test]
fn toric_scan_json_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let csv = dir.path().join("scan.csv");
    let out = ncgauge(&[
        "toric-scan",
        "s3",
        "1",
        "2",
        "0.05",
        "--poly",
        "a*ad + 0.5i*b",
        "--out",
        csv.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("PASS"));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("chi,"));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(schema().is_valid(&doc));
    assert!(doc["profile"].as_array().unwrap().len() > 10);

    json(
        &["toric-scan", "s4", "1", "3", "0.2", "--format", "json"],
        0,
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hs.json");
    let out = ncgauge(&["check", "hs:N=1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["command"], "check");
}

#[test]
fn toml_configs() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("two.toml");
    std::fs::write(
        &good,
        "label = \"two-point\"\n[algebra]\nkind = \"diagonal\"\nn = 2\n\
         [dirac]\nentries = [[0.0, 0.0], [0.0, 1.5]]\n\
         [real_structure]\npreset = \"conjugation\"\n",
    )
    .unwrap();
    let hopping = dir.path().join("hop.toml");
    std::fs::write(
        &hopping,
        std::fs::read_to_string(&good)
            .unwrap()
            .replace("[[0.0, 0.0], [0.0, 1.5]]", "[[0.0, 1.0], [1.0, 0.0]]"),
    )
    .unwrap();
    let doc = json(&["check", hopping.to_str().unwrap()], 1);
    assert_eq!(check(&doc, "order-one")["passed"], false);
    let doc = json(&["check", good.to_str().unwrap()], 0);
    assert_eq!(quantity(&doc, "aj_dim"), 2);
    json(&["localize", good.to_str().unwrap()], 0);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[algebra]\nkind = \"cube\"\n").unwrap();
    assert_eq!(
        ncgauge(&["check", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn shipped_configs_pass() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        json(&["check", path.to_str().unwrap()], 0);
        seen += 1;
    }
    assert!(seen >= 2);
}
