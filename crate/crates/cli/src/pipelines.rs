//! The individual commands, each turning a configuration into check records.

use serde::Serialize;
use serde_json::{json, Value};
use vss_core::catalog::{AmbrozioExpectation, SpaceSpec};
use vss_core::chart::{curvature, DerivativeSource};
use vss_core::identities::check_identities;
use vss_core::ode::{
    self, classify, first_integral, integrate, phi, turning_points, Classification, OdeError, OdeParams, ScanRow,
    CANDIDATE_TOL,
};
use vss_core::sampling::{chart_samples, interval_samples};
use vss_core::tensor::frame_components;
use vss_core::verifier::{check_3d_relations, evaluate, flatness_checks, verify_static, Evaluations};
use vss_core::warped::{
    bochner_f3_residual, bochner_s_residual, eq41_balance, lemma31_residuals, radial_frame, radial_invariants,
    static_residual, JetSource, RadialField, WarpedSpace,
};
use vss_core::Chart;

use crate::config::{CliError, RunConfig};
use crate::report::{CheckRecord, Expect};

/// Step of the finite-difference metric jets.
pub const FD_STEP: f64 = 1e-3;
/// Step of the finite-difference oracle, which only needs second derivatives.
pub const FD_ORACLE_STEP: f64 = 1e-4;
/// Default tolerances.
pub const ANALYTIC_TOL: f64 = 1e-9;
pub const ODE_TOL: f64 = 1e-6;
pub const ORACLE_RADIAL_TOL: f64 = 1e-8;
pub const ORACLE_FD_TOL: f64 = 1e-5;
pub const EQUALITY_TOL: f64 = 1e-10;
pub const DRIFT_RATE_TOL: f64 = 1e-9;
pub const PERIOD_TOL: f64 = 1e-6;
pub const TURNING_TOL: f64 = 1e-8;
pub const EQUILIBRIUM_TOL: f64 = 1e-10;
/// Integration tolerance for conservation checks.
pub const TRACE_INT_TOL: f64 = 1e-10;
/// Integration tolerance for period and turning-point comparisons.
pub const TIGHT_INT_TOL: f64 = 1e-12;

/// Per-row data of an `ode-trace` CSV.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceRow {
    pub s: f64,
    pub h: f64,
    #[serde(rename = "h'")]
    pub h_prime: f64,
    pub first_integral_drift: f64,
}

pub enum Trace {
    Ode(Vec<TraceRow>),
    Scan(Vec<ScanRow>),
}

pub struct Outcome {
    pub checks: Vec<CheckRecord>,
    pub summary: Value,
    pub trace: Option<Trace>,
}

fn engine(e: impl std::fmt::Display) -> CliError {
    CliError::Engine(e.to_string())
}

pub fn default_tol(spec: &SpaceSpec) -> f64 {
    match spec.source {
        JetSource::Analytic => ANALYTIC_TOL,
        JetSource::Ode => ODE_TOL,
    }
}

pub fn prepared_chart(spec: &SpaceSpec, fd_jets: bool) -> Chart {
    if fd_jets {
        spec.chart
            .clone()
            .with_derivatives(DerivativeSource::FiniteDifference { step: FD_STEP })
    } else {
        spec.chart.clone()
    }
}

fn finite_max(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0f64, |acc, v| if v.is_nan() { f64::INFINITY } else { acc.max(v) })
}

/// The static verifier's predicates, checked against the catalog's
/// expectations.
pub fn verify(spec: &SpaceSpec, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tol = cfg.tol_or(default_tol(spec));
    let chart = prepared_chart(spec, cfg.fd_jets);
    let points = chart_samples(&chart, cfg.samples, cfg.seed);
    let ev = evaluate(&chart, &spec.potential, &points).map_err(engine)?;
    let prefix = format!("verify/{}", spec.name);
    let mut checks = Vec::new();
    for c in verify_static(&ev, tol).map_err(engine)? {
        checks.push(CheckRecord::from_identity(&prefix, &c, Expect::AtMost));
    }
    for c in flatness_checks(&ev, tol).map_err(engine)? {
        let vanishes = match c.name.as_str() {
            "cotton_flat" => spec.expected.cotton_flat,
            "d_flat" => spec.expected.d_flat,
            _ => true,
        };
        let expect = if vanishes { Expect::AtMost } else { Expect::Exceeds };
        checks.push(CheckRecord::from_identity(&prefix, &c, expect));
    }
    if spec.dim == 3 {
        for c in check_3d_relations(&ev, tol).map_err(engine)? {
            checks.push(CheckRecord::from_identity(&prefix, &c, Expect::AtMost));
        }
    }
    checks.extend(expected_invariants(spec, &ev, tol, &prefix));
    let (gate, ambrozio) = ambrozio_record(spec, &ev, cfg, &prefix);
    checks.push(gate);
    let summary = json!({
        "space": spec.name,
        "dim": spec.dim,
        "samples": points.len(),
        "tol": tol,
        "jets": if cfg.fd_jets { "finite_difference" } else { "analytic" },
        "ambrozio": ambrozio,
        "expected": spec.expected,
    });
    Ok(Outcome {
        checks,
        summary,
        trace: None,
    })
}

fn expected_invariants(spec: &SpaceSpec, ev: &Evaluations, tol: f64, prefix: &str) -> Vec<CheckRecord> {
    let e = &spec.expected;
    let anchor = "catalog expected invariants";
    let mut out = Vec::new();
    let mut push = |label: &str, want: Option<f64>, get: &dyn Fn(&vss_core::CurvatureBundle) -> f64| {
        if let Some(w) = want {
            let dev = finite_max(ev.data.iter().map(|(b, _)| (get(b) - w).abs()));
            out.push(CheckRecord::residual(
                format!("{prefix}/expected_{label}"),
                anchor,
                dev,
                tol,
            ));
        }
    };
    push("R", e.scalar, &|b| b.scalar);
    push("S", e.inv_s, &|b| b.inv_s);
    push("F3", e.inv_f3, &|b| b.inv_f3);
    out
}

fn ambrozio_record(spec: &SpaceSpec, ev: &Evaluations, cfg: &RunConfig, prefix: &str) -> (CheckRecord, Value) {
    let anchor = "Theorem A sum R_ij^2 <= R^2/2";
    let name = format!("{prefix}/ambrozio_gate");
    if spec.dim != 3 {
        return (
            CheckRecord::skipped(name, anchor, 0.0, "pointwise inequality is three-dimensional"),
            Value::Null,
        );
    }
    let margins: Vec<f64> = ev
        .data
        .iter()
        .map(|(b, _)| 0.5 * b.scalar * b.scalar - b.ricci_norm_sq())
        .collect();
    let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let max = margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let summary = json!({ "margin_min": min, "margin_max": max, "expectation": spec.expected.ambrozio });
    let rec = match spec.expected.ambrozio {
        AmbrozioExpectation::Strict => CheckRecord::measure(name, anchor, min, 0.0, Expect::Exceeds),
        AmbrozioExpectation::Equality => {
            let dev = min.abs().max(max.abs());
            CheckRecord::residual(name, "Theorem A equality case S^1 x S^2", dev, cfg.tol_or(EQUALITY_TOL))
        }
        AmbrozioExpectation::Violated => CheckRecord::measure(
            name,
            "Remark 2 SdS does not satisfy the condition",
            min,
            0.0,
            Expect::Below,
        ),
        AmbrozioExpectation::NotApplicable => {
            CheckRecord::skipped(name, anchor, 0.0, "space is outside the R >= 0 hypothesis")
        }
    };
    (rec, summary)
}

/// The curvature identity suite on a catalog space.
pub fn identities(spec: &SpaceSpec, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tol = cfg.tol_or(default_tol(spec));
    let chart = prepared_chart(spec, cfg.fd_jets);
    let points = chart_samples(&chart, cfg.samples, cfg.seed);
    let rep = check_identities(&chart, Some(&spec.potential), &points, tol).map_err(engine)?;
    let prefix = format!("identities/{}", spec.name);
    let mut checks: Vec<CheckRecord> = rep
        .checks
        .iter()
        .map(|c| CheckRecord::from_identity(&prefix, c, Expect::AtMost))
        .collect();
    if spec.dim == 4 {
        // block-diagonal Ricci of the two-factor product
        let mixed = finite_max(points.iter().map(|x| {
            curvature(&chart, x)
                .map(|b| {
                    let mut m = 0.0f64;
                    for i in 0..2 {
                        for j in 2..4 {
                            m = m.max(b.ricci[i][j].abs());
                        }
                    }
                    m
                })
                .unwrap_or(f64::INFINITY)
        }));
        checks.push(CheckRecord::residual(
            format!("{prefix}/product_mixed_ricci"),
            "§1 product S^2 x N complete vacuum static",
            mixed,
            tol,
        ));
    }
    let summary = json!({ "space": spec.name, "samples": points.len(), "tol": tol });
    Ok(Outcome {
        checks,
        summary,
        trace: None,
    })
}

/// Radii in the interior of a warped space's domain.
fn radii(space: &WarpedSpace, count: usize, seed: u64) -> Vec<f64> {
    let (lo, hi) = space.domain;
    let pad = 0.05 * (hi - lo);
    interval_samples(lo + pad, hi - pad, count, seed)
}

/// Fourth-order identities and the static equation in radial form.
pub fn radial_identity_checks(
    prefix: &str,
    space: &WarpedSpace,
    f: &RadialField,
    points: &[f64],
    tol: f64,
    include_eq41: bool,
) -> Vec<CheckRecord> {
    let static_tol = tol.max(CANDIDATE_TOL);
    let collect = |g: &dyn Fn(f64) -> Result<f64, vss_core::warped::RadialError>| -> Result<f64, String> {
        let mut worst = 0.0f64;
        for &s in points {
            let v = g(s).map_err(|e| e.to_string())?;
            worst = if v.is_nan() { f64::INFINITY } else { worst.max(v) };
        }
        Ok(worst)
    };
    let record = |name: &str, anchor: &str, r: Result<f64, String>| match r {
        Ok(v) => CheckRecord::residual(format!("{prefix}/{name}"), anchor, v, tol),
        Err(e) => CheckRecord::error(format!("{prefix}/{name}"), anchor, e),
    };
    let mut out = vec![
        record(
            "radial_static_residual",
            "§1 f_ij=f(R_ij-R/(n-1) g_ij)",
            collect(&|s| static_residual(space, f, s)),
        ),
        record(
            "bochner_s",
            "Proposition 3.1 Bochner formula for S",
            collect(&|s| bochner_s_residual(space, f, s, static_tol)),
        ),
        record(
            "bochner_f3",
            "Proposition 3.1 Bochner formula for F3",
            collect(&|s| bochner_f3_residual(space, f, s, static_tol)),
        ),
        record(
            "lemma31_hessian",
            "Lemma 3.1 Laplacian of f_ij",
            collect(&|s| lemma31_residuals(space, f, s, static_tol).map(|r| r.0)),
        ),
        record(
            "lemma31_einstein",
            "Lemma 3.1 f Laplacian of E_ij",
            collect(&|s| lemma31_residuals(space, f, s, static_tol).map(|r| r.1)),
        ),
    ];
    let eq41_name = format!("{prefix}/eq41_balance");
    let eq41_anchor = "Eq 4.1 sum E_ij,k^2+C^2/2+6F3+RS=0";
    if include_eq41 {
        out.push(match eq41_balance(space, f, points, static_tol) {
            Ok(v) => CheckRecord::residual(eq41_name, eq41_anchor, v, tol),
            Err(e) => CheckRecord::error(eq41_name, eq41_anchor, e.to_string()),
        });
    } else {
        out.push(CheckRecord::skipped(
            eq41_name,
            eq41_anchor,
            tol,
            "S is not constant on this space",
        ));
    }
    out
}

/// Radial checks for a catalog warped space.
pub fn radial(spec: &SpaceSpec, cfg: &RunConfig) -> Vec<CheckRecord> {
    let Some((space, f)) = &spec.radial else {
        return Vec::new();
    };
    let tol = cfg.tol_or(default_tol(spec));
    let pts = radii(space, cfg.samples, cfg.seed);
    radial_identity_checks(
        &format!("radial/{}", spec.name),
        space,
        f,
        &pts,
        tol,
        spec.expected.inv_s.is_some(),
    )
}

/// Closed-form radial frame against the chart engine, componentwise.
pub fn radial_oracle(spec: &SpaceSpec, cfg: &RunConfig) -> Option<CheckRecord> {
    let (space, _) = spec.radial.as_ref()?;
    let name = format!("oracle/radial_vs_chart/{}", spec.name);
    let anchor = "warped-product closed forms vs coordinate curvature";
    let tol = cfg.tol_or(ORACLE_RADIAL_TOL);
    let mut worst = 0.0f64;
    for (i, s) in radii(space, 16, cfg.seed).into_iter().enumerate() {
        let x = [s, 0.6 + 0.1 * i as f64, 0.3 * i as f64];
        let (b, fr, inv) = match (
            curvature(&spec.chart, &x),
            radial_frame(space, s),
            radial_invariants(space, s),
        ) {
            (Ok(b), Ok(fr), Ok(inv)) => (b, fr, inv),
            (Err(e), _, _) => return Some(CheckRecord::error(name, anchor, e.to_string())),
            (_, Err(e), _) | (_, _, Err(e)) => return Some(CheckRecord::error(name, anchor, e.to_string())),
        };
        let ric = b.ricci_frame();
        let cotton = frame_components(3, 3, &b.frame, |k| b.cotton[k[0]][k[1]][k[2]]);
        let ed = frame_components(3, 3, &b.frame, |k| b.einstein_traceless_d[k[0]][k[1]][k[2]]);
        let mut diffs = vec![
            (ric[0][0] - inv.lambda_rad).abs(),
            (ric[1][1] - inv.lambda_tan).abs(),
            (ric[2][2] - inv.lambda_tan).abs(),
            (b.scalar - inv.scalar).abs(),
            (b.inv_s - inv.inv_s).abs(),
            (b.inv_f3 - inv.inv_f3).abs(),
        ];
        diffs.extend((0..27).map(|k| (cotton[k] - fr.cotton[k]).abs()));
        diffs.extend((0..27).map(|k| (ed[k] - fr.e_d[k]).abs()));
        worst = worst.max(finite_max(diffs));
    }
    Some(CheckRecord::residual(name, anchor, worst, tol))
}

/// Analytic jets against finite-difference jets away from coordinate
/// singularities.
pub fn fd_oracle(spec: &SpaceSpec, cfg: &RunConfig) -> CheckRecord {
    let name = format!("oracle/jets_vs_finite_differences/{}", spec.name);
    let anchor = "exact metric jets vs finite differences";
    let exact = spec.chart.clone().with_margin(0.2);
    let approx = exact
        .clone()
        .with_derivatives(DerivativeSource::FiniteDifference { step: FD_ORACLE_STEP });
    let n = spec.dim;
    let mut worst = 0.0f64;
    for x in chart_samples(&exact, 8, cfg.seed) {
        let (a, b) = match (curvature(&exact, &x), curvature(&approx, &x)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return CheckRecord::error(name, anchor, e.to_string()),
        };
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((a.ricci[i][j] - b.ricci[i][j]).abs());
                for k in 0..n {
                    for l in 0..n {
                        worst = worst.max((a.riemann[i][j][k][l] - b.riemann[i][j][k][l]).abs());
                    }
                }
            }
        }
    }
    CheckRecord::residual(name, anchor, worst, cfg.tol_or(ORACLE_FD_TOL))
}

/// First-integral drift per unit length along `[0, length]`.
pub fn drift_rate(params: &OdeParams, h0: f64, v0: f64, length: f64) -> Result<f64, OdeError> {
    let traj = integrate(params, h0, v0, (0.0, length), TRACE_INT_TOL)?;
    Ok(traj.max_drift() / length)
}

/// Quadrature period against the spacing of turning events.
pub fn period_gap(params: &OdeParams) -> Result<(f64, f64), OdeError> {
    let orbit = ode::period(params)?;
    let traj = integrate(params, orbit.h_min, 0.0, (0.0, 5.5 * orbit.period), TIGHT_INT_TOL)?;
    let spacing = traj
        .event_period()
        .ok_or_else(|| OdeError::NotPeriodic("no turning events".into()))?;
    Ok((orbit.period, (spacing - orbit.period).abs()))
}

/// Largest `|h − h*|` when starting at the equilibrium.
pub fn equilibrium_excursion(params: &OdeParams, h_star: f64, length: f64) -> Result<f64, OdeError> {
    let traj = integrate(params, h_star, 0.0, (0.0, length), TIGHT_INT_TOL)?;
    Ok(finite_max(
        traj.samples(2001).into_iter().map(|(_, h, _)| (h - h_star).abs()),
    ))
}

fn ode_record(name: String, anchor: &str, r: Result<f64, OdeError>, tol: f64) -> CheckRecord {
    match r {
        Ok(v) => CheckRecord::residual(name, anchor, v, tol),
        Err(e) => CheckRecord::error(name, anchor, e.to_string()),
    }
}

fn params_label(p: &OdeParams) -> String {
    format!("n={},R={},c0={},k={}", p.n, p.r, p.c0, p.k)
}

pub fn ode_trace(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let class = classify(&params);
    let orbit = (class == Classification::Periodic)
        .then(|| ode::period(&params))
        .transpose()?;
    let h0 = match (cfg.h0, &orbit) {
        (Some(h), _) => h,
        (None, Some(o)) => o.h_min,
        (None, None) => 1.0,
    };
    let v0 = cfg.v0.unwrap_or(0.0);
    let fi = first_integral(&params, h0, v0)?;
    let span = cfg
        .span
        .unwrap_or_else(|| orbit.as_ref().map_or(10.0, |o| 2.0 * o.period));
    if !(span > 0.0 && span.is_finite()) {
        return Err(CliError::InvalidParams(format!("span must be positive, got {span}")));
    }
    let prefix = format!("ode-trace/{}", params_label(&params));
    let drift_name = format!("{prefix}/first_integral_drift_rate");
    let drift_anchor = "Eq 1.1 first integral (h')^2+2c0/(n-2)h^(2-n)+R/(n(n-1))h^2=k";
    let traj = match integrate(&params, h0, v0, (0.0, span), TRACE_INT_TOL) {
        Ok(t) => t,
        Err(e) => {
            let checks = vec![CheckRecord::error(drift_name, drift_anchor, e.to_string())];
            let summary = json!({ "classification": class, "h0": h0, "v0": v0, "span": span, "error": e.to_string() });
            return Ok(Outcome {
                checks,
                summary,
                trace: None,
            });
        }
    };
    let mut checks = vec![CheckRecord::residual(
        drift_name,
        drift_anchor,
        traj.max_drift() / span,
        cfg.tol_or(DRIFT_RATE_TOL),
    )];
    let turning_name = format!("{prefix}/events_at_turning_points");
    let turning_anchor = "Eq 1.1 turning points of h";
    let on_level = (fi - params.k).abs() <= 1e-12 * params.k.abs().max(1.0);
    match &orbit {
        Some(o) if on_level && !traj.events.is_empty() => {
            let dev = finite_max(traj.events.iter().map(|e| {
                let target = if e.direction < 0 { o.h_max } else { o.h_min };
                (e.h - target).abs()
            }));
            checks.push(CheckRecord::residual(
                turning_name,
                turning_anchor,
                dev,
                cfg.tol_or(TURNING_TOL),
            ));
        }
        Some(_) if on_level => checks.push(CheckRecord::skipped(
            turning_name,
            turning_anchor,
            TURNING_TOL,
            "no turning events in span",
        )),
        _ => checks.push(CheckRecord::skipped(
            turning_name,
            turning_anchor,
            TURNING_TOL,
            "initial state is not on a periodic level set",
        )),
    }
    let rows: Vec<TraceRow> = traj
        .samples(cfg.samples + 1)
        .into_iter()
        .map(|(s, h, v)| TraceRow {
            s,
            h,
            h_prime: v,
            first_integral_drift: traj.drift_at(s).unwrap_or(f64::NAN),
        })
        .collect();
    let summary = json!({
        "params": params,
        "classification": class,
        "h0": h0,
        "v0": v0,
        "first_integral": fi,
        "span": span,
        "steps": traj.steps.len(),
        "events": traj.events,
        "max_drift": traj.max_drift(),
    });
    Ok(Outcome {
        checks,
        summary,
        trace: Some(Trace::Ode(rows)),
    })
}

pub fn ode_classify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let class = classify(&params);
    let prefix = format!("ode-classify/{}", params_label(&params));
    let roots = match turning_points(&params) {
        Ok(r) => r,
        Err(OdeError::NoPositiveRoots) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let mut checks = Vec::new();
    let anchor = "Eq 1.1 second line rearranged";
    if roots.is_empty() {
        checks.push(CheckRecord::skipped(
            format!("{prefix}/roots_are_zeros"),
            anchor,
            1e-12,
            "Φ has no positive roots",
        ));
    } else {
        let dev = finite_max(roots.iter().map(|r| phi(&params, r.h).abs() / params.k.abs().max(1.0)));
        checks.push(CheckRecord::residual(
            format!("{prefix}/roots_are_zeros"),
            anchor,
            dev,
            cfg.tol_or(1e-12),
        ));
    }
    let mut summary = json!({
        "params": params,
        "classification": class,
        "turning_points": roots,
        "critical_point": ode::critical_point(&params),
    });
    match class {
        Classification::Periodic => {
            let r = period_gap(&params);
            if let Ok((period, _)) = &r {
                summary["period"] = json!(period);
            }
            checks.push(ode_record(
                format!("{prefix}/period_vs_events"),
                "Theorem K periodic solution h",
                r.map(|x| x.1),
                cfg.tol_or(PERIOD_TOL),
            ));
        }
        Classification::Cylinder => {
            let h_star = roots[0].h;
            summary["harmonic_period"] = json!(ode::harmonic_period(&params));
            checks.push(ode_record(
                format!("{prefix}/equilibrium_fixed"),
                "Theorem K product S^1 x S^(n-1)(k)",
                equilibrium_excursion(&params, h_star, 100.0),
                cfg.tol_or(EQUILIBRIUM_TOL),
            ));
        }
        _ => {}
    }
    Ok(Outcome {
        checks,
        summary,
        trace: None,
    })
}

/// Build the SdS space for `params`, verify the candidate potential and
/// scan the Ambrozio margin over one period.
pub fn sds_checks(params: &OdeParams, samples: usize, seed: u64, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let scan = ode::sds_build_and_scan(params, samples)?;
    let prefix = format!("sds/{}", params_label(params));
    let tol = cfg.tol_or(ODE_TOL);
    let cylinder = scan.classification == Classification::Cylinder;
    let mut checks = vec![
        CheckRecord::residual(
            format!("{prefix}/candidate_static_residual"),
            "Theorem K potential f=h' is static",
            scan.max_static_residual(),
            tol,
        ),
        CheckRecord::residual(
            format!("{prefix}/first_integral_drift_rate"),
            "Eq 1.1 first integral",
            scan.max_drift() / (1.05 * scan.orbit.period),
            cfg.tol_or(DRIFT_RATE_TOL),
        ),
        CheckRecord::residual(
            format!("{prefix}/ricci_trace_matches_R"),
            "Eq 2.2 R=sum_i R_ii",
            finite_max(scan.rows.iter().map(|r| (r.r_check - params.r).abs())),
            tol,
        ),
    ];
    let pts: Vec<f64> = scan.rows.iter().map(|r| r.s).collect();
    checks.extend(radial_identity_checks(
        &prefix,
        &scan.space,
        &scan.potential,
        &pts,
        tol,
        cylinder,
    ));

    // chart-level tensor relations on the built space
    let chart = scan.space.chart().map_err(engine)?;
    let mut chart_pts: Vec<Vec<f64>> = pts.iter().map(|&s| vec![s, 1.1, 0.7]).collect();
    chart_pts.extend(chart_samples(&chart, 8, seed));
    let ev = evaluate(&chart, &scan.potential.lift(), &chart_pts).map_err(engine)?;
    for c in flatness_checks(&ev, tol)
        .map_err(engine)?
        .iter()
        .chain(&check_3d_relations(&ev, tol).map_err(engine)?)
    {
        checks.push(CheckRecord::from_identity(&prefix, c, Expect::AtMost));
    }

    let (min, max) = (scan.min_margin(), scan.max_margin());
    checks.push(if cylinder {
        CheckRecord::residual(
            format!("{prefix}/ambrozio_margin"),
            "Theorem A equality case S^1 x S^2",
            min.abs().max(max.abs()),
            cfg.tol_or(EQUALITY_TOL),
        )
    } else {
        CheckRecord::measure(
            format!("{prefix}/ambrozio_margin"),
            "Remark 2 SdS does not satisfy the condition",
            min,
            0.0,
            Expect::Below,
        )
    });
    let s_anchor = "Theorem 1.1 constant S hypothesis";
    checks.push(if cylinder {
        CheckRecord::residual(format!("{prefix}/s_variation"), s_anchor, scan.s_variation(), tol)
    } else {
        CheckRecord::measure(
            format!("{prefix}/s_variation"),
            s_anchor,
            scan.s_variation(),
            tol,
            Expect::Exceeds,
        )
    });
    let argmin = scan
        .rows
        .iter()
        .min_by(|a, b| a.ambrozio_margin.total_cmp(&b.ambrozio_margin))
        .map(|r| r.s);
    let summary = json!({
        "params": params,
        "classification": scan.classification,
        "h_min": scan.orbit.h_min,
        "h_max": scan.orbit.h_max,
        "period": scan.orbit.period,
        "samples": samples,
        "min_ambrozio_margin": min,
        "max_ambrozio_margin": max,
        "argmin_s": argmin,
        "s_variation": scan.s_variation(),
        "max_static_residual": scan.max_static_residual(),
    });
    Ok(Outcome {
        checks,
        summary,
        trace: Some(Trace::Scan(scan.rows)),
    })
}

pub fn sds_scan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    if params.n != 3 {
        return Err(CliError::InvalidParams(format!(
            "sds-scan requires n = 3, got {}",
            params.n
        )));
    }
    sds_checks(&params, cfg.samples, cfg.seed, cfg)
}
