use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bmw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmw")).args(args).output().expect("run bmw")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bmw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn missing_parameter_file_is_usage_error() {
    let out = bmw(&["verify", "--params", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parameter file"));
}

#[test]
fn bad_usage_exits_two() {
    assert_eq!(bmw(&["phi", "--m", "3"]).status.code(), Some(2));
    assert_eq!(bmw(&["algebra"]).status.code(), Some(2));
    assert_eq!(bmw(&["verify", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_reproducible() {
    let a = bmw(&["verify", "--m", "3,4", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let v = json(&a);
    assert_eq!(v["passed"], Value::Bool(true));
    let b = bmw(&["verify", "--m", "3,4", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn non_generic_parameters_fail_at_projector_rank() {
    let path = scratch("nongeneric.json");
    std::fs::write(&path, r#"{"kappa": [0.05, 0.0], "classes": [{"k": [1.1, 0.05], "alpha": [0.0, 0.0]}]}"#).unwrap();
    let out = bmw(&["verify", "--m", "3", "--params", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("projector rank"));
    assert_eq!(json(&out)["first_failure"], Value::String("m=3: projector rank".into()));
}

#[test]
fn phi_word_and_dump() {
    let v = json(&bmw(&["phi", "--m", "3", "--word", "E1"]));
    let z = v.as_array().unwrap();
    assert!((z[0].as_f64().unwrap() - 1.0).abs() < 1e-7 && z[1].as_f64().unwrap().abs() < 1e-7);
    let table = json(&bmw(&["phi", "--m", "3", "--dump", "--maxlen", "2"]));
    assert_eq!(table.as_object().unwrap().len(), 1 + 4 + 16);
    assert!(table.get("x0 E1").is_some());
}

#[test]
fn monodromy_output_shape() {
    let v = json(&bmw(&["monodromy", "--m", "4"]));
    let t = &v["generators"][0]["T"];
    assert_eq!(t.as_array().unwrap().len(), 4);
    assert_eq!(t[0].as_array().unwrap().len(), 4);
    assert!(v["diagnostics"]["braid_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn algebra_reports_and_structure_export() {
    let report = scratch("report.json");
    let sc = scratch("sc.json");
    let out = bmw(&[
        "algebra",
        "--dihedral",
        "3",
        "--report",
        report.to_str().unwrap(),
        "--structure",
        sc.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["dimension"], 15);
    assert_eq!(r["trace_rank"], 15);
    assert_eq!(r["hecke_dimension"], 6);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&sc).unwrap()).unwrap();
    let parsed = bmw::json::StructureConstants::from_value(&s).unwrap();
    assert_eq!(parsed.basis.len(), 15);
    // 1 · b = b
    for b in 0..15 {
        assert!(parsed.entries.iter().any(|&(a, bb, d, z)| a == 0 && bb == b && d == b && (z.re - 1.0).abs() < 1e-12));
    }
}

#[test]
fn algebra_from_coxeter_file() {
    let path = scratch("a1a1.json");
    std::fs::write(&path, r#"{"rank": 2, "m": [[1, 2], [2, 1]]}"#).unwrap();
    let v = json(&bmw(&["algebra", "--coxeter", path.to_str().unwrap()]));
    assert_eq!(v["dimension"], 9);
    assert_eq!(v["hecke_dimension"], 4);
}

#[test]
fn brauer_and_report() {
    let v = json(&bmw(&["brauer", "--m", "3"]));
    assert_eq!(v["dimension"]["dimension"], 15);
    let r = json(&bmw(&["report", "--m", "5"]));
    assert_eq!(r["derived"]["generic"], Value::Bool(true));
    assert!(r["diagnostics"]["cubic_residual"][0].as_f64().unwrap() < 1e-8);
}
