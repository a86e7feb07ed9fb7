use gradwin_web::{local_model_json, newton_polygon_json, sym_summary_json};
use serde_json::{json, Value};

#[test]
fn sym_summary_of_the_running_spec() {
    let out = sym_summary_json(r#"{"r":5,"b":[1],"z":2,"a":2}"#, 3, 5).unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["slopes_m"], json!(["2", "2"]));
    assert_eq!(v["n"], 2);
}

#[test]
fn bad_spec_is_reported() {
    assert!(sym_summary_json(r#"{"r":5}"#, 3, 5).is_err());
    assert!(sym_summary_json(r#"{"r":5,"b":[1],"z":7,"a":2}"#, 3, 5).is_err());
}

#[test]
fn polygon_of_a_swap() {
    let out = newton_polygon_json(r#"{"ranks":[2,2],"matrices":[[[0,1],[3,0]],[[1,0],[0,1]]]}"#, 3, 5).unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["polygon"]["vertices"], json!([[0, 0], [2, 1]]));
}

#[test]
fn local_model_chart() {
    let out = local_model_json(4, 2, 1, 3, 5, 50, 1).unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["report"]["disagreements"], 0);
    assert!(local_model_json(3, 3, 1, 2, 3, 10, 0).is_err());
}
