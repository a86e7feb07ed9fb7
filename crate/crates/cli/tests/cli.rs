use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gradwin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradwin")).args(args).output().expect("binary runs")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn running_spec_reports_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "spec.json", r#"{"r":5,"b":[1],"z":2,"a":2}"#);
    let out = dir.path().join("out");
    let o = gradwin(&["--out", out.to_str().unwrap(), "sym-build", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json_file(&out.join("sym_summary.json"));
    assert_eq!(summary["result"]["slopes_m"], serde_json::json!(["2", "2"]));
    let report = json_file(&out.join("verify_report.json"));
    assert_eq!(report["pass"], true);
    for name in ["structure.json", "window_m.json", "window_n.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn inline_spec_matches_file_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "spec.json", r#"{"r":5,"b":[1],"z":2,"a":2}"#);
    let a = gradwin(&["sym-build", "--spec", &spec]);
    let b = gradwin(&["--r", "5", "sym-build", "--b", "1", "--z", "2", "--a", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn b_zero_gives_m_equal_to_n1() {
    let o = gradwin(&["--r", "5", "sym-build", "--b", "0", "--z", "2", "--a", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["m_equals_n1"], true);
    assert_eq!(v["result"]["slopes_m"], serde_json::json!(["2"]));
}

#[test]
fn invalid_spec_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "bad.json", r#"{"r":5,"b":[1],"z":7,"a":2}"#);
    let o = gradwin(&["sym-build", "--spec", &spec]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "input");
    assert!(o.stdout.is_empty());
    let o = gradwin(&["sym-build", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(o.status.code(), Some(2));
    let unknown = write_spec(dir.path(), "unknown.json", r#"{"r":5,"b":[1],"z":2,"a":2,"x":1}"#);
    assert_eq!(gradwin(&["sym-build", "--spec", &unknown]).status.code(), Some(2));
}

#[test]
fn pipeline_reaches_velf() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "spec.json", r#"{"r":5,"b":[1],"z":2,"a":2}"#);
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    let structure = out.join("structure.json");
    let s = structure.to_str().unwrap();
    let conn = out.join("connection.json");
    for args in [
        vec!["sym-build", "--spec", &spec],
        vec!["deform", "--structure", s],
        vec!["connection", "--structure", s],
        vec!["dwork", "--structure", s, "--connection", conn.to_str().unwrap()],
    ] {
        let r = gradwin(&[&["--out", o][..], &args].concat());
        assert_eq!(r.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&r.stderr));
    }
    let deform = json_file(&out.join("deform.json"));
    assert_eq!(deform["result"]["suff"]["generic_slopes_m"], serde_json::json!(["1", "3"]));
    let dwork = json_file(&out.join("dwork.json"));
    assert_eq!(dwork["result"]["velf"]["det_ok"], true);
    assert_eq!(dwork["result"]["velf"]["pi_theta_ok"], true);
    let prov = &dwork["provenance"];
    for key in ["p", "r", "N", "T", "D", "seed", "git_describe"] {
        assert!(!prov[key].is_null(), "provenance lacks {key}");
    }
    assert_eq!(prov["T"], 9);
}

#[test]
fn stale_structure_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    gradwin(&["--r", "5", "--out", out.to_str().unwrap(), "sym-build", "--b", "1", "--z", "2", "--a", "2"]);
    let s = out.join("structure.json");
    let o = gradwin(&["--p", "5", "deform", "--structure", s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = gradwin(&["dwork", "--structure", s.to_str().unwrap(), "--connection", "/nonexistent.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn slopes_of_a_raw_module() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_spec(dir.path(), "m.json", r#"{"ranks":[2],"matrices":[[[0,1],[3,0]]]}"#);
    let o = gradwin(&["slopes", "--module", &m]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["polygon"]["vertices"], serde_json::json!([[0, 0], [2, 1]]));
    assert_eq!(v["result"]["graded_slopes"], serde_json::json!(["1/2", "1/2"]));
}

#[test]
fn uncertifiable_slopes_exit_with_precision_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_spec(dir.path(), "m.json", r#"{"ranks":[1],"matrices":[[[3486784401]]]}"#);
    let o = gradwin(&["slopes", "--module", &m]);
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "precision");
}

#[test]
fn extpow_k1_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    gradwin(&["--r", "5", "--out", o, "sym-build", "--b", "2", "--z", "1", "--a", "1"]);
    let w = out.join("window_m.json");
    let e = dir.path().join("e");
    let r = gradwin(&["--out", e.to_str().unwrap(), "extpow", "--window", w.to_str().unwrap(), "--k", "1"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(std::fs::read(&w).unwrap(), std::fs::read(e.join("window.json")).unwrap());
}

#[test]
fn extpow_reports_subset_sums() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    gradwin(&["--r", "7", "--out", out.to_str().unwrap(), "sym-build", "--b", "2", "--z", "1", "--a", "1"]);
    let w = out.join("window_m.json");
    let r = gradwin(&["extpow", "--window", w.to_str().unwrap(), "--k", "2", "--twist", "2,1,1,1,1,1,1"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let v: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(v["result"]["slopes_out"], v["result"]["subset_sums"]);
    assert_eq!(v["result"]["independence"]["agreeing"], 20);
    let bad = gradwin(&["extpow", "--window", w.to_str().unwrap(), "--k", "2", "--twist", "1,1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn localmodel_single_chart_and_all() {
    let o = gradwin(&["localmodel", "--n", "3", "--k", "1", "--nu", "1", "--mu", "2", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["charts"][0]["report"]["disagreements"], 0);
    let all = gradwin(&["--p", "5", "localmodel", "--samples", "20"]);
    let v: Value = serde_json::from_slice(&all.stdout).unwrap();
    assert_eq!(v["result"]["charts"].as_array().unwrap().len(), 15);
    assert_eq!(gradwin(&["localmodel", "--n", "3", "--k", "3", "--nu", "1", "--mu", "2"]).status.code(), Some(2));
    assert_eq!(gradwin(&["localmodel", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn ring_info_checks_laws() {
    let o = gradwin(&["--p", "5", "--r", "3", "ring-info", "--samples", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["params"]["p"], 5);
    assert_eq!(v["pass"], true);
    assert_eq!(gradwin(&["--p", "4", "ring-info"]).status.code(), Some(2));
}

fn sweep_rows(args: &[&str]) -> (Option<i32>, Vec<Value>) {
    let o = gradwin(args);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
    let rows = v["result"]["rows"].as_array().cloned().unwrap_or_default();
    (o.status.code(), rows)
}

#[test]
fn sweep_with_a_corrupt_instance_has_one_failing_row() {
    let (code, clean) = sweep_rows(&["sweep", "--r-max", "3"]);
    assert_eq!(code, Some(0));
    assert!(clean.iter().all(|r| r["pass"] == true));
    let (code, rows) = sweep_rows(&["sweep", "--r-max", "3", "--corrupt", "2"]);
    assert_eq!(code, Some(1));
    assert_eq!(rows.len(), clean.len());
    let failing: Vec<_> = rows.iter().filter(|r| r["pass"] == false).collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["index"], 2);
}

#[test]
fn empty_sweep_exits_cleanly() {
    let (code, rows) = sweep_rows(&["sweep", "--r-max", "0"]);
    assert_eq!(code, Some(0));
    assert!(rows.is_empty());
}

#[test]
fn sweep_caps_are_enforced() {
    assert_eq!(gradwin(&["sweep", "--r-max", "9"]).status.code(), Some(2));
    assert_eq!(gradwin(&["--truncation", "13", "sweep"]).status.code(), Some(2));
    assert_eq!(gradwin(&["--precision", "7", "sweep"]).status.code(), Some(2));
}

#[test]
fn default_sweep_row_count_matches_feasible_specs() {
    let specs = gradwin::sym_structure::feasible_specs(&Default::default());
    let (code, rows) = sweep_rows(&["sweep"]);
    assert_eq!(code, Some(0));
    assert_eq!(rows.len(), 2 * specs.len());
}
