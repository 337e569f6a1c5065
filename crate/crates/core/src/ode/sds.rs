//! Warped spaces built from ODE solutions, and the curvature scan along
//! one period of a Schwarzschild–de Sitter orbit.

use std::sync::Arc;

use serde::Serialize;

use super::period::{harmonic_period, period, PeriodicOrbit};
use super::roots::{classify, critical_point, Classification};
use super::{integrate, OdeError, OdeParams, Trajectory};
use crate::series::Series;
use crate::warped::{radial_invariants, static_residual, JetSource, RadialField, WarpedSpace};

/// Static residual above which the candidate potential is rejected.
pub const CANDIDATE_TOL: f64 = 1e-6;
const SCAN_INTEGRATION_TOL: f64 = 1e-12;

/// Warped space whose warping function is the trajectory, with higher
/// jets from the equation itself.
pub fn ode_warped_space(name: impl Into<String>, traj: Arc<Trajectory>) -> WarpedSpace {
    let params = traj.params;
    let domain = traj.interval();
    let tr = traj.clone();
    WarpedSpace::new(name, params.n, params.k, domain, move |s| match tr.eval(s) {
        Some([h, v]) => params.solution_series(h, v),
        None => Series::constant(f64::NAN),
    })
    .with_source(JetSource::Ode)
}

/// One sample of the scan (also a CSV row).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub s: f64,
    pub h: f64,
    #[serde(rename = "h'")]
    pub h_prime: f64,
    pub first_integral_drift: f64,
    pub lambda_rad: f64,
    pub lambda_tan: f64,
    #[serde(rename = "R_check")]
    pub r_check: f64,
    #[serde(rename = "S")]
    pub inv_s: f64,
    #[serde(rename = "F3")]
    pub inv_f3: f64,
    /// `R²/2 − Σ R_{ij}²`.
    pub ambrozio_margin: f64,
    pub static_residual: f64,
}

#[derive(Clone)]
pub struct SdsScan {
    pub orbit: PeriodicOrbit,
    pub classification: Classification,
    pub space: WarpedSpace,
    pub potential: RadialField,
    pub trajectory: Arc<Trajectory>,
    pub rows: Vec<ScanRow>,
}

impl SdsScan {
    pub fn max_static_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.static_residual).fold(0.0, f64::max)
    }

    pub fn min_margin(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.ambrozio_margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_margin(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.ambrozio_margin)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max S − min S` over the samples.
    pub fn s_variation(&self) -> f64 {
        let (lo, hi) = self
            .rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r.inv_s), hi.max(r.inv_s))
            });
        hi - lo
    }

    pub fn max_drift(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.first_integral_drift.abs())
            .fold(0.0, f64::max)
    }
}

/// Build the `n = 3` warped space of a periodic (or equilibrium) solution,
/// take `f = h'` as the potential candidate (`cos ωs` on the equilibrium,
/// where `h'` vanishes), and sample `samples` points over one period
/// starting at `h_min`.
pub fn sds_build_and_scan(params: &OdeParams, samples: usize) -> Result<SdsScan, OdeError> {
    params.validate()?;
    if params.n != 3 {
        return Err(OdeError::InvalidParams(format!(
            "scan requires n = 3, got {}",
            params.n
        )));
    }
    if samples == 0 {
        return Err(OdeError::InvalidParams("samples must be ≥ 1".into()));
    }
    let classification = classify(params);
    let orbit = match classification {
        Classification::Periodic => period(params)?,
        Classification::Cylinder => {
            let hc = critical_point(params).ok_or_else(|| OdeError::NotPeriodic("Cylinder".into()))?;
            let t = harmonic_period(params).ok_or_else(|| OdeError::NotPeriodic("Cylinder".into()))?;
            PeriodicOrbit {
                params: *params,
                h_min: hc,
                h_max: hc,
                period: t,
            }
        }
        other => return Err(OdeError::NotPeriodic(format!("{other:?}"))),
    };

    let span = (0.0, 1.05 * orbit.period);
    let traj = Arc::new(integrate(params, orbit.h_min, 0.0, span, SCAN_INTEGRATION_TOL)?);
    let space = ode_warped_space(
        format!("sds(R={}, c0={}, k={})", params.r, params.c0, params.k),
        traj.clone(),
    );
    let potential = match classification {
        Classification::Cylinder => {
            let omega = 2.0 * std::f64::consts::PI / orbit.period;
            RadialField::new(move |s| (Series::variable(s).scale(omega)).cos())
        }
        _ => RadialField::derivative_of(&space),
    };

    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = orbit.period * i as f64 / samples as f64;
        let [h, v] = traj.eval(s).expect("sample inside trajectory");
        let inv = radial_invariants(&space, s)?;
        let residual = static_residual(&space, &potential, s)?;
        rows.push(ScanRow {
            s,
            h,
            h_prime: v,
            first_integral_drift: traj.drift_at(s).unwrap_or(f64::NAN),
            lambda_rad: inv.lambda_rad,
            lambda_tan: inv.lambda_tan,
            r_check: inv.scalar,
            inv_s: inv.inv_s,
            inv_f3: inv.inv_f3,
            ambrozio_margin: 0.5 * inv.scalar * inv.scalar - inv.ricci_sq,
            static_residual: residual,
        });
    }
    let scan = SdsScan {
        orbit,
        classification,
        space,
        potential,
        trajectory: traj,
        rows,
    };
    let worst = scan.max_static_residual();
    if !(worst <= CANDIDATE_TOL) {
        return Err(OdeError::CandidatePotentialFails {
            residual: worst,
            tol: CANDIDATE_TOL,
        });
    }
    Ok(scan)
}
