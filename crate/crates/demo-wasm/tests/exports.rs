use std::f64::consts::PI;

use serde_json::Value;
use vss_demo_wasm::{orbit, sds_scan, trace};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).expect("exports return JSON")
}

#[test]
fn cylinder_orbit_has_circle_period() {
    // S¹ × S²(1): the S² factor has radius 1 and the potential is cos s
    let v = parse(orbit(3, 2.0, 1.0 / 3.0, 1.0));
    assert_eq!(v["classification"], "Cylinder");
    let roots = v["turning_points"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert_eq!(roots[0]["kind"], "Double");
    assert!((roots[0]["h"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["period"].as_f64().unwrap() - 2.0 * PI).abs() < 1e-9);
}

#[test]
fn periodic_orbit_period_matches_trace_events() {
    let v = parse(orbit(3, 2.0, 0.3, 1.0));
    assert_eq!(v["classification"], "Periodic");
    let period = v["period"].as_f64().unwrap();
    let h_min = v["turning_points"][0]["h"].as_f64().unwrap();
    let t = parse(trace(3, 2.0, 0.3, 1.0, h_min, 0.0, 4.5 * period, 200));
    assert!((t["event_period"].as_f64().unwrap() - period).abs() < 1e-6);
    assert!(t["max_drift"].as_f64().unwrap() < 1e-8);
}

#[test]
fn sphere_trace_is_cosine() {
    let t = parse(trace(3, 6.0, 0.0, 1.0, 1.0, 0.0, 1.2, 50));
    let rows = t["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 50);
    for r in rows {
        let (s, h, v) = (r[0].as_f64().unwrap(), r[1].as_f64().unwrap(), r[2].as_f64().unwrap());
        assert!((h - s.cos()).abs() < 1e-8);
        assert!((v + s.sin()).abs() < 1e-8);
    }
}

#[test]
fn sds_scan_violates_margin() {
    let v = parse(sds_scan(2.0, 0.3, 1.0, 24));
    assert_eq!(v["rows"].as_array().unwrap().len(), 24);
    assert!(v["min_margin"].as_f64().unwrap() < 0.0);
    assert!(v["max_static_residual"].as_f64().unwrap() < 1e-6);
    let cyl = parse(sds_scan(2.0, 1.0 / 3.0, 1.0, 8));
    assert!(cyl["s_variation"].as_f64().unwrap() < 1e-9);
    assert!(cyl["min_margin"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn bad_input_reports_error() {
    for s in [
        orbit(2, 2.0, 0.3, 1.0),
        trace(3, 2.0, 0.3, 1.0, -1.0, 0.0, 1.0, 10),
        trace(3, 2.0, 0.3, 1.0, 1.0, 0.0, 1.0, 0),
        sds_scan(6.0, 0.0, 1.0, 10),
    ] {
        assert!(parse(s)["error"].is_string());
    }
}
