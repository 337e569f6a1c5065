//! Browser bindings for the warping-function ODE and SdS scans.
//!
//! Every export takes plain numbers and returns a JSON string: the result
//! object on success, `{"error": "..."}` otherwise.

use serde_json::{json, Value};
use vss_core::ode::{self, classify, integrate, sds_build_and_scan, Classification, OdeError, OdeParams};
use wasm_bindgen::prelude::wasm_bindgen;

const TRACE_TOL: f64 = 1e-9;
const MAX_SAMPLES: usize = 5000;

fn respond(r: Result<Value, OdeError>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() })).to_string()
}

fn samples_in_range(samples: usize) -> Result<usize, OdeError> {
    if (1..=MAX_SAMPLES).contains(&samples) {
        Ok(samples)
    } else {
        Err(OdeError::InvalidParams(format!(
            "samples must be in 1..={MAX_SAMPLES}, got {samples}"
        )))
    }
}

/// Classification, roots of `Φ` and the period when it exists.
pub fn orbit_value(n: usize, r: f64, c0: f64, k: f64) -> Result<Value, OdeError> {
    let p = OdeParams::new(n, r, c0, k)?;
    let class = classify(&p);
    let roots = match class {
        Classification::SpaceForm | Classification::Degenerate => Vec::new(),
        _ => ode::turning_points(&p).unwrap_or_default(),
    };
    let period = match class {
        Classification::Periodic => Some(ode::period(&p)?.period),
        Classification::Cylinder => ode::harmonic_period(&p),
        _ => None,
    };
    Ok(json!({ "params": p, "classification": class, "turning_points": roots, "period": period }))
}

/// Samples `(s, h, h')` of the solution from `(h0, v0)` over `[0, span]`.
#[allow(clippy::too_many_arguments)]
pub fn trace_value(
    n: usize,
    r: f64,
    c0: f64,
    k: f64,
    h0: f64,
    v0: f64,
    span: f64,
    samples: usize,
) -> Result<Value, OdeError> {
    let p = OdeParams::new(n, r, c0, k)?;
    let samples = samples_in_range(samples)?;
    let t = integrate(&p, h0, v0, (0.0, span), TRACE_TOL)?;
    let rows: Vec<[f64; 3]> = t.samples(samples).into_iter().map(|(s, h, v)| [s, h, v]).collect();
    Ok(json!({
        "rows": rows,
        "events": t.events,
        "event_period": t.event_period(),
        "max_drift": t.max_drift(),
    }))
}

/// One period of the `n = 3` scan with `f = h'` as potential.
pub fn sds_value(r: f64, c0: f64, k: f64, samples: usize) -> Result<Value, OdeError> {
    let p = OdeParams::new(3, r, c0, k)?;
    let scan = sds_build_and_scan(&p, samples_in_range(samples)?)?;
    Ok(json!({
        "classification": scan.classification,
        "period": scan.orbit.period,
        "rows": scan.rows,
        "min_margin": scan.min_margin(),
        "max_margin": scan.max_margin(),
        "max_static_residual": scan.max_static_residual(),
        "s_variation": scan.s_variation(),
    }))
}

#[wasm_bindgen]
pub fn orbit(n: usize, r: f64, c0: f64, k: f64) -> String {
    respond(orbit_value(n, r, c0, k))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn trace(n: usize, r: f64, c0: f64, k: f64, h0: f64, v0: f64, span: f64, samples: usize) -> String {
    respond(trace_value(n, r, c0, k, h0, v0, span, samples))
}

#[wasm_bindgen]
pub fn sds_scan(r: f64, c0: f64, k: f64, samples: usize) -> String {
    respond(sds_value(r, c0, k, samples))
}
