use coopcast_wasm::{analysis_curves_json, conversion_demo_json, grid_rows_demo_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn conversion_payload() {
    for kind in ["uniform-disk", "gaussian", "clustered", "grid"] {
        let v = parse(conversion_demo_json(kind, 30, 2.0, 5).unwrap());
        let n = v["positions"].as_array().unwrap().len();
        assert!(n >= 25);
        assert_eq!(v["disks"].as_array().unwrap().len(), n - 1);
        assert!(!v["converted"].as_array().unwrap().is_empty());
        assert!(v["converted_total"].as_f64().unwrap() > 0.0);
    }
    assert!(conversion_demo_json("hexagonal", 30, 2.0, 5).is_err());
}

#[test]
fn grid_payload() {
    let v = parse(grid_rows_demo_json(20, 0, true, 210).unwrap());
    assert_eq!(v["delivered"], true);
    assert!(v["spacing"].as_u64().unwrap() >= 2);
    assert!(v["gain"].as_f64().unwrap() > 1.0);
    let v = parse(grid_rows_demo_json(20, 19, false, 0).unwrap());
    assert_eq!(v["delivered"], false);
    assert!(grid_rows_demo_json(20, 0, true, 400).is_err());
}

#[test]
fn analysis_payload() {
    let v = parse(analysis_curves_json(2.0, 5.0).unwrap());
    assert_eq!(v["zeta"][1], serde_json::json!([3, 6.0]));
    assert!(v["beta"].is_null());
    let v = parse(analysis_curves_json(3.0, 20.0).unwrap());
    assert!(v["beta"]["beta"].as_f64().unwrap() > 1.0 / 3.0);
}
