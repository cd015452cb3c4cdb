use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goluzin-lab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Checks the required keys and enumerations declared by the published schema.
fn assert_matches_schema(reports: &Value) {
    let schema = schema();
    let def = &schema["$defs"]["report"];
    let enum_of = |key: &str| def["properties"][key]["enum"].as_array().unwrap().clone();
    for r in reports.as_array().expect("array of reports") {
        let obj = r.as_object().unwrap();
        for key in def["required"].as_array().unwrap() {
            assert!(obj.contains_key(key.as_str().unwrap()), "missing {key}");
        }
        for key in obj.keys() {
            assert!(def["properties"].get(key).is_some(), "unexpected key {key}");
        }
        assert!(enum_of("inequality").contains(&r["inequality"]));
        assert!(enum_of("status").contains(&r["status"]));
        assert!(r["inputs"]["map"].is_string());
    }
}

#[test]
fn params_reports_the_parameter_pack() {
    let out = lab(&["params", "--zeta-abs", "2.0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["x0"].as_f64().unwrap() - 0.2679491924311227).abs() < 1e-12);
    assert!((v["kappa"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert!(v["legendre_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn area_equality_for_joukowski() {
    let out = lab(&["area", "--map", "joukowski", "--zeta", "2.0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_matches_schema(&v);
    assert_eq!(v[0]["status"], "equality");
    assert!((v[0]["ratio"].as_f64().unwrap() - 1.0).abs() < 5e-3);
}

#[test]
fn all_area_forms_agree() {
    let out = lab(&["area", "--map", "identity", "--zeta", "2", "--form", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_matches_schema(&v);
    let ratios: Vec<f64> = v.as_array().unwrap().iter().map(|r| r["ratio"].as_f64().unwrap()).collect();
    assert_eq!(ratios.len(), 3);
    for r in &ratios {
        assert!((r - ratios[0]).abs() < 1e-3);
        assert!(*r < 0.8);
    }
}

#[test]
fn pointwise_dispatches_by_map_class() {
    let out = lab(&["pointwise", "--map", "joukowski", "--z", "1.5", "--zeta", "1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_matches_schema(&v);
    assert_eq!(v[0]["inequality"], "goluzin");
    assert_eq!(v[1]["inequality"], "pointwise");
    assert_eq!(v[0]["status"], "equality");
    assert_eq!(v[1]["status"], "equality");

    let out = lab(&["pointwise", "--map", "koebe", "--z", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)[0]["inequality"], "koebe_bieberbach");
}

#[test]
fn gronwall_uses_both_routes() {
    let out = lab(&["gronwall", "--map", "b1:0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_matches_schema(&v);
    assert!((v[0]["lhs"].as_f64().unwrap() - 0.09).abs() < 1e-12);
    let d = &v[0]["details"];
    assert!((d["integral_route"].as_f64().unwrap() - 0.09).abs() < 1e-6);
}

#[test]
fn csv_has_fixed_columns() {
    let out = lab(&["sweep", "--map", "identity", "--zeta-abs", "2", "--zeta-arg", "0", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("inequality,map,zeta,z,x0,lhs,rhs,ratio,error_estimate,status"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("area_sigma,identity,2+0i,"));
    assert!(rows[1].starts_with("pointwise,identity,2+0i,"));
}

#[test]
fn sweep_keeps_input_order_and_is_deterministic() {
    let args = ["sweep", "--map", "b1:0.7", "--map", "joukowski", "--zeta-abs", "1.5", "--zeta-abs", "3"];
    let (a, b) = (lab(&args), lab(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_matches_schema(&v);
    let order: Vec<(String, String)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["inputs"]["map"].as_str().unwrap().to_string(), r["inequality"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(order.len(), 2 * 2 * 3 * 2);
    assert!(order[..12].iter().all(|(m, _)| m == "b1:0.7"));
    assert!(order[12..].iter().all(|(m, _)| m == "joukowski"));
    assert!(order.chunks(2).all(|p| p[0].1 == "area_sigma" && p[1].1 == "pointwise"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = lab(&["gronwall", "--map", "joukowski", "--format", "text", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("gronwall"));
    assert!(text.trim_end().ends_with("equality"));
}

#[test]
fn selftest_passes() {
    let out = lab(&["selftest", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v.as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["area", "--map", "no-such-map", "--zeta", "2"][..],
        &["area", "--map", "joukowski", "--zeta", "2+"],
        &["area", "--map", "joukowski", "--zeta", "0.5"],
        &["area", "--map", "koebe", "--zeta", "2"],
        &["pointwise", "--map", "identity"],
        &["params"],
        &["selftest", "--jobs", "0"],
        &["frobnicate"],
    ] {
        assert_eq!(lab(args).status.code(), Some(64), "{args:?}");
    }
}

#[test]
fn help_exits_cleanly() {
    let out = lab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep"));
}

#[test]
fn unreachable_tolerance_exits_2() {
    let out = lab(&["gronwall", "--map", "pole:0.5", "--rel-tol", "1e-16", "--abs-tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn log_level_comes_from_environment() {
    let run = |level: &str| {
        Command::new(env!("CARGO_BIN_EXE_goluzin-lab"))
            .args(["area", "--map", "identity", "--zeta", "3"])
            .env("GOLUZIN_LAB_LOG", level)
            .output()
            .unwrap()
    };
    assert!(String::from_utf8_lossy(&run("info").stderr).contains("area_sigma for identity"));
    assert!(run("warn").stderr.is_empty());
}
