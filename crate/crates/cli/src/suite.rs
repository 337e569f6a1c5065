//! Every module check over the catalog and three SdS parameter sets.

use serde_json::{json, Value};
use vss_core::catalog::{self, lookup, SpaceSpec};
use vss_core::chart::curvature;
use vss_core::ode::{self, classify, integrate, Classification, OdeParams};
use vss_core::sampling::chart_samples;
use vss_core::verifier::ambrozio_gate;

use crate::config::RunConfig;
use crate::pipelines::{
    self, drift_rate, equilibrium_excursion, period_gap, DRIFT_RATE_TOL, EQUALITY_TOL, EQUILIBRIUM_TOL, PERIOD_TOL,
};
use crate::report::{CheckRecord, Expect};

/// `c0` values of the SdS scans, at `n = 3`, `R = 2`, `k = 1`.
pub const SDS_C0: [f64; 3] = [0.25, 0.3, 0.33];
pub const SDS_SAMPLES: usize = 32;

type Task<'a> = Box<dyn FnOnce() -> Vec<CheckRecord> + Send + 'a>;

fn or_error(name: &str, r: Result<Vec<CheckRecord>, impl std::fmt::Display>) -> Vec<CheckRecord> {
    r.unwrap_or_else(|e| vec![CheckRecord::error(name, "pipeline", e.to_string())])
}

fn space_checks(spec: &SpaceSpec, cfg: &RunConfig) -> Vec<CheckRecord> {
    let mut out = or_error(
        &format!("identities/{}", spec.name),
        pipelines::identities(spec, cfg).map(|o| o.checks),
    );
    out.extend(or_error(
        &format!("verify/{}", spec.name),
        pipelines::verify(spec, cfg).map(|o| o.checks),
    ));
    if spec.name != "sds" {
        out.extend(pipelines::radial(spec, cfg));
    }
    out.extend(pipelines::radial_oracle(spec, cfg));
    out.push(pipelines::fd_oracle(spec, cfg));
    out
}

fn sds_params(c0: f64) -> OdeParams {
    OdeParams {
        n: 3,
        r: 2.0,
        c0,
        k: 1.0,
    }
}

fn ode_checks(cfg: &RunConfig) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let fi_anchor = "Eq 1.1 first integral";
    for c0 in SDS_C0 {
        let p = sds_params(c0);
        let label = format!("ode/c0={c0}");
        let h_min = ode::turning_points(&p).map(|r| r[0].h);
        let rate = h_min.and_then(|h| drift_rate(&p, h, 0.0, 40.0));
        out.push(match rate {
            Ok(v) => CheckRecord::residual(format!("{label}/drift_rate"), fi_anchor, v, cfg.tol_or(DRIFT_RATE_TOL)),
            Err(e) => CheckRecord::error(format!("{label}/drift_rate"), fi_anchor, e.to_string()),
        });
        out.push(match period_gap(&p) {
            Ok((_, gap)) => CheckRecord::residual(
                format!("{label}/period_vs_events"),
                "Theorem K periodic solution h",
                gap,
                cfg.tol_or(PERIOD_TOL),
            ),
            Err(e) => CheckRecord::error(
                format!("{label}/period_vs_events"),
                "Theorem K periodic solution h",
                e.to_string(),
            ),
        });
    }
    let anchor_k = "Theorem K product S^1 x S^(n-1)(k)";
    let cyl = sds_params(1.0 / 3.0);
    // 0 when the classification matches, 1 otherwise
    let mismatch = |c0: f64, want: bool| {
        f64::from(u8::from(
            (classify(&sds_params(c0)) == Classification::Cylinder) != want,
        ))
    };
    out.push(CheckRecord::residual(
        "ode/classify/cylinder_at_one_third",
        anchor_k,
        mismatch(1.0 / 3.0, true),
        0.0,
    ));
    let near = mismatch(0.3333, false).max(mismatch(0.3334, false));
    out.push(CheckRecord::residual(
        "ode/classify/not_cylinder_nearby",
        anchor_k,
        near,
        0.0,
    ));
    out.push(match equilibrium_excursion(&cyl, 1.0, 100.0) {
        Ok(v) => CheckRecord::residual("ode/equilibrium_fixed", anchor_k, v, cfg.tol_or(EQUILIBRIUM_TOL)),
        Err(e) => CheckRecord::error("ode/equilibrium_fixed", anchor_k, e.to_string()),
    });
    // sphere family: h = cos s from (1, 0)
    let sphere = OdeParams {
        n: 3,
        r: 6.0,
        c0: 0.0,
        k: 1.0,
    };
    let closed = integrate(&sphere, 1.0, 0.0, (0.0, 1.5), pipelines::TIGHT_INT_TOL).map(|t| {
        t.samples(301)
            .into_iter()
            .map(|(s, h, _)| (h - s.cos()).abs())
            .fold(0.0, f64::max)
    });
    out.push(match closed {
        Ok(v) => CheckRecord::residual(
            "ode/sphere_closed_form",
            "Theorem K sphere case c0=0",
            v,
            cfg.tol_or(1e-8),
        ),
        Err(e) => CheckRecord::error("ode/sphere_closed_form", "Theorem K sphere case c0=0", e.to_string()),
    });
    out
}

/// Closed-form values of the model spaces and the SdS margin, one record each.
fn facts(cfg: &RunConfig) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let fail = |name: &str, anchor: &str, e: String| CheckRecord::error(name, anchor, e);
    match lookup("s1xs2") {
        Ok(spec) => {
            let pts = chart_samples(&spec.chart, cfg.samples, cfg.seed);
            match ambrozio_gate(&spec.chart, &pts) {
                Ok(g) => out.push(CheckRecord::residual(
                    "facts/s1xs2_ambrozio_equality",
                    "Theorem A equality case S^1 x S^2",
                    g.margin_min.abs().max(g.margin_max.abs()),
                    cfg.tol_or(EQUALITY_TOL),
                )),
                Err(e) => out.push(fail("facts/s1xs2_ambrozio_equality", "Theorem A", e.to_string())),
            }
            let (mut f3_dev, mut bound_dev) = (0.0f64, 0.0f64);
            for x in &pts {
                match curvature(&spec.chart, x) {
                    Ok(b) => {
                        f3_dev = f3_dev
                            .max((b.inv_f3 + 2.0 / 9.0).abs())
                            .max((b.inv_s - 2.0 / 3.0).abs());
                        bound_dev = bound_dev.max((b.inv_f3 + b.inv_s.powf(1.5) / 6f64.sqrt()).abs());
                    }
                    Err(_) => {
                        f3_dev = f64::INFINITY;
                        bound_dev = f64::INFINITY;
                    }
                }
            }
            out.push(CheckRecord::residual(
                "facts/s1xs2_f3_value",
                "§4 F3=-2/9 with S=2/3 on S^1 x S^2",
                f3_dev,
                cfg.tol_or(EQUALITY_TOL),
            ));
            out.push(CheckRecord::residual(
                "facts/s1xs2_f3_bound_equality",
                "§4 F3=-S^(3/2)/sqrt(6) equality",
                bound_dev,
                cfg.tol_or(EQUALITY_TOL),
            ));
        }
        Err(e) => out.push(fail("facts/s1xs2", "catalog", e.to_string())),
    }
    match lookup("s3") {
        Ok(spec) => {
            let pts = chart_samples(&spec.chart, cfg.samples, cfg.seed);
            let dev =
                ambrozio_gate(&spec.chart, &pts).map(|g| (g.margin_min - 6.0).abs().max((g.margin_max - 6.0).abs()));
            out.push(match dev {
                Ok(v) => CheckRecord::residual(
                    "facts/s3_margin_six",
                    "Theorem A S^3 strict",
                    v,
                    cfg.tol_or(ANALYTIC_MARGIN_TOL),
                ),
                Err(e) => fail("facts/s3_margin_six", "Theorem A", e.to_string()),
            });
        }
        Err(e) => out.push(fail("facts/s3", "catalog", e.to_string())),
    }
    match ode::sds_build_and_scan(&sds_params(0.3), SDS_SAMPLES) {
        Ok(scan) => {
            out.push(CheckRecord::measure(
                "facts/sds_min_margin",
                "Remark 2 SdS does not satisfy the condition",
                scan.min_margin(),
                -2.5,
                Expect::Below,
            ));
            let first = scan.rows[0];
            out.push(CheckRecord::residual(
                "facts/sds_eigenvalue_sum",
                "Eq 2.2 R=sum of Ricci eigenvalues",
                (first.lambda_rad + 2.0 * first.lambda_tan - 2.0).abs(),
                1e-3,
            ));
        }
        Err(e) => out.push(fail("facts/sds", "Remark 2", e.to_string())),
    }
    out
}

const ANALYTIC_MARGIN_TOL: f64 = 1e-9;

/// Runs every group, in parallel, and returns the records with a summary.
pub fn run_suite(cfg: &RunConfig) -> (Vec<CheckRecord>, Value) {
    let specs = catalog::catalog();
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for spec in &specs {
        tasks.push(Box::new(move || space_checks(spec, cfg)));
    }
    for c0 in SDS_C0 {
        tasks.push(Box::new(move || {
            let name = format!("sds/c0={c0}");
            or_error(
                &name,
                pipelines::sds_checks(&sds_params(c0), SDS_SAMPLES, cfg.seed, cfg).map(|o| o.checks),
            )
        }));
    }
    tasks.push(Box::new(|| ode_checks(cfg)));
    tasks.push(Box::new(|| facts(cfg)));
    let checks: Vec<CheckRecord> = std::thread::scope(|scope| {
        let handles: Vec<_> = tasks.into_iter().map(|t| scope.spawn(t)).collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("suite task panicked"))
            .collect()
    });
    let summary = json!({
        "spaces": catalog::NAMES,
        "sds_c0": SDS_C0,
        "sds_samples": SDS_SAMPLES,
        "samples": cfg.samples,
        "jets": if cfg.fd_jets { "finite_difference" } else { "analytic" },
    });
    (checks, summary)
}
