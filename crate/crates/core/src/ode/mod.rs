//! The radial static-space ODE
//!
//! ```text
//! h'' + R/(n(n−1)) h = c0 h^(1−n),
//! (h')² + 2c0/(n−2) h^(2−n) + R/(n(n−1)) h² = k,
//! ```
//!
//! its adaptive integration, turning points, periods and classification,
//! and the Schwarzschild–de Sitter scan built on top of [`crate::warped`].

mod dopri;
mod period;
mod roots;
mod sds;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{Series, SERIES_LEN};
use dopri::{attempt, initial_step, DenseStep, StepControl};

pub use period::{harmonic_period, period, period_with_nodes, PeriodicOrbit};
pub use roots::{classify, critical_point, phi, phi_prime, phi_second, turning_points, Classification, Root, RootKind};
pub use sds::{ode_warped_space, sds_build_and_scan, ScanRow, SdsScan, CANDIDATE_TOL};

/// Smallest and largest `h` an integration may reach before it is
/// declared a blowup.
pub const H_MIN_BOUND: f64 = 1e-8;
pub const H_MAX_BOUND: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeParams {
    pub n: usize,
    /// Scalar curvature.
    #[serde(rename = "R")]
    pub r: f64,
    pub c0: f64,
    /// Fiber curvature.
    pub k: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("h must be positive, got {h}")]
    DomainError { h: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("solution left [{lo:e}, {hi:e}] at s = {s} (h = {h})", lo = H_MIN_BOUND, hi = H_MAX_BOUND)]
    Blowup { s: f64, h: f64 },
    #[error("integration could not meet tolerance at s = {s}: {reason}")]
    ToleranceNotMet { s: f64, reason: String },
    #[error("Φ has no positive roots")]
    NoPositiveRoots,
    #[error("parameters do not give a periodic orbit ({0})")]
    NotPeriodic(String),
    #[error("candidate potential h' fails the static equation: residual {residual:e} > {tol:e}")]
    CandidatePotentialFails { residual: f64, tol: f64 },
    #[error(transparent)]
    Radial(#[from] crate::warped::RadialError),
}

impl OdeParams {
    pub fn new(n: usize, r: f64, c0: f64, k: f64) -> Result<Self, OdeError> {
        let p = Self { n, r, c0, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        if self.n < 3 {
            return Err(OdeError::InvalidParams(format!("n must be ≥ 3, got {}", self.n)));
        }
        if ![self.r, self.c0, self.k].iter().all(|v| v.is_finite()) {
            return Err(OdeError::InvalidParams("R, c0 and k must be finite".into()));
        }
        Ok(())
    }

    /// `R/(n(n−1))`.
    pub fn a(&self) -> f64 {
        let n = self.n as f64;
        self.r / (n * (n - 1.0))
    }

    /// `h''` as a function of `h`.
    pub fn accel(&self, h: f64) -> f64 {
        -self.a() * h + self.c0 * h.powi(1 - self.n as i32)
    }

    /// Taylor series of the solution through `(h, v)`, obtained by
    /// differentiating the equation term by term.
    pub fn solution_series(&self, h: f64, v: f64) -> Series {
        let a = self.a();
        let p = 1 - self.n as i32;
        let mut c = [0.0; SERIES_LEN];
        c[0] = h;
        c[1] = v;
        for k in 0..SERIES_LEN - 2 {
            let hs = Series::from_coefficients(c, k + 1);
            let rhs = hs.scale(-a) + hs.powi(p).scale(self.c0);
            c[k + 2] = rhs.coefficient(k) / ((k + 1) * (k + 2)) as f64;
        }
        Series::from_coefficients(c, SERIES_LEN - 1)
    }
}

/// `(h')² + 2c0/(n−2) h^(2−n) + R/(n(n−1)) h²`.
pub fn first_integral(params: &OdeParams, h: f64, v: f64) -> Result<f64, OdeError> {
    if !(h > 0.0) {
        return Err(OdeError::DomainError { h });
    }
    let n = params.n as f64;
    Ok(v * v + 2.0 * params.c0 / (n - 2.0) * h.powi(2 - params.n as i32) + params.a() * h * h)
}

/// A zero of `h'` found along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TurningEvent {
    pub s: f64,
    pub h: f64,
    /// `+1` when `h'` goes from negative to positive (a minimum of `h`).
    pub direction: i8,
}

/// Dense-output solution of the ODE over `[s_start, s_end]` (either order).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub params: OdeParams,
    pub s_start: f64,
    pub s_end: f64,
    pub rtol: f64,
    pub atol: f64,
    pub steps: Vec<DenseStep>,
    pub events: Vec<TurningEvent>,
    /// First integral at the initial state.
    pub fi_start: f64,
}

impl Trajectory {
    fn direction(&self) -> f64 {
        if self.s_end >= self.s_start {
            1.0
        } else {
            -1.0
        }
    }

    pub fn contains(&self, s: f64) -> bool {
        let (lo, hi) = self.interval();
        s >= lo - 1e-12 && s <= hi + 1e-12
    }

    /// `(min, max)` of the covered interval.
    pub fn interval(&self) -> (f64, f64) {
        (self.s_start.min(self.s_end), self.s_start.max(self.s_end))
    }

    /// Interpolated `(h, h')` at `s`, or `None` outside the covered interval.
    pub fn eval(&self, s: f64) -> Option<[f64; 2]> {
        if !self.contains(s) || self.steps.is_empty() {
            return None;
        }
        let dir = self.direction();
        // steps are ordered along the direction of integration
        let idx = self
            .steps
            .partition_point(|st| dir * (st.s1() - s) < 0.0)
            .min(self.steps.len() - 1);
        Some(self.steps[idx].eval(s))
    }

    /// State at the far end of the integration.
    pub fn final_state(&self) -> [f64; 2] {
        self.steps.last().map(|st| st.eval(st.s1())).unwrap_or([f64::NAN; 2])
    }

    /// `FI(s) − FI(s_start)`.
    pub fn drift_at(&self, s: f64) -> Option<f64> {
        let [h, v] = self.eval(s)?;
        first_integral(&self.params, h, v).ok().map(|fi| fi - self.fi_start)
    }

    /// Largest first-integral drift over step ends and midpoints.
    pub fn max_drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for st in &self.steps {
            for t in [0.5, 1.0] {
                let [h, v] = st.eval(st.s0 + t * st.h);
                let fi = first_integral(&self.params, h, v).unwrap_or(f64::INFINITY);
                worst = worst.max((fi - self.fi_start).abs());
            }
        }
        worst
    }

    /// Mean spacing between successive turning events of the same
    /// direction, if at least two exist.
    pub fn event_period(&self) -> Option<f64> {
        let mut spacings = Vec::new();
        for dir in [-1i8, 1] {
            let s: Vec<f64> = self.events.iter().filter(|e| e.direction == dir).map(|e| e.s).collect();
            spacings.extend(s.windows(2).map(|w| (w[1] - w[0]).abs()));
        }
        if spacings.is_empty() {
            return None;
        }
        Some(spacings.iter().sum::<f64>() / spacings.len() as f64)
    }

    /// Evenly spaced samples `(s, h, h')` including both ends.
    pub fn samples(&self, count: usize) -> Vec<(f64, f64, f64)> {
        let count = count.max(2);
        (0..count)
            .filter_map(|i| {
                let s = self.s_start + (self.s_end - self.s_start) * i as f64 / (count - 1) as f64;
                self.eval(s).map(|[h, v]| (s, h, v))
            })
            .collect()
    }
}

/// Integrate from `(h0, v0)` at `span.0` to `span.1` with relative and
/// absolute tolerance `tol`.
pub fn integrate(params: &OdeParams, h0: f64, v0: f64, span: (f64, f64), tol: f64) -> Result<Trajectory, OdeError> {
    params.validate()?;
    if !(h0 > 0.0) {
        return Err(OdeError::DomainError { h: h0 });
    }
    if !(tol > 0.0) || !span.0.is_finite() || !span.1.is_finite() || !v0.is_finite() {
        return Err(OdeError::InvalidParams(
            "tolerance must be positive and span finite".into(),
        ));
    }
    let ctl = StepControl {
        rtol: tol,
        atol: tol,
        max_steps: 5_000_000,
    };
    let p = *params;
    let rhs = move |y: [f64; 2]| [y[1], p.accel(y[0])];
    let dir = if span.1 >= span.0 { 1.0 } else { -1.0 };
    let length = (span.1 - span.0).abs();
    let mut traj = Trajectory {
        params: *params,
        s_start: span.0,
        s_end: span.1,
        rtol: tol,
        atol: tol,
        steps: Vec::new(),
        events: Vec::new(),
        fi_start: first_integral(params, h0, v0)?,
    };
    if length == 0.0 {
        return Ok(traj);
    }

    let mut s = span.0;
    let mut y = [h0, v0];
    let mut k1 = rhs(y);
    let mut h = initial_step(&rhs, y, k1, &ctl, dir).min(length);
    let mut rejected_last = false;
    let mut count = 0usize;
    while dir * (span.1 - s) > 0.0 {
        count += 1;
        if count > ctl.max_steps {
            return Err(OdeError::ToleranceNotMet {
                s,
                reason: "step budget exhausted".into(),
            });
        }
        if h < 1e-14 * s.abs().max(1.0) {
            return Err(OdeError::ToleranceNotMet {
                s,
                reason: format!("step size underflow ({h:e})"),
            });
        }
        let remaining = dir * (span.1 - s);
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let at = attempt(&rhs, s, y, k1, dir * step, &ctl);
        let err = if at.err.is_finite() { at.err } else { f64::INFINITY };
        if err <= 1.0 {
            let s_new = if last { span.1 } else { s + dir * step };
            if !(at.y1[0] >= H_MIN_BOUND && at.y1[0] <= H_MAX_BOUND) {
                traj.s_end = s;
                return Err(OdeError::Blowup { s: s_new, h: at.y1[0] });
            }
            let dense = at.dense;
            record_event(&mut traj.events, &dense, y, at.y1);
            traj.steps.push(dense);
            s = s_new;
            y = at.y1;
            k1 = at.k7;
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = step * if rejected_last { fac.min(1.0) } else { fac };
            rejected_last = false;
        } else {
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
            } else {
                0.1
            };
            h = step * fac;
            rejected_last = true;
        }
    }
    Ok(traj)
}

/// Locate a sign change of `h'` inside an accepted step.
fn record_event(events: &mut Vec<TurningEvent>, step: &DenseStep, y0: [f64; 2], y1: [f64; 2]) {
    let (v0, v1) = (y0[1], y1[1]);
    if !(v0 * v1 < 0.0 || (v1 == 0.0 && v0 != 0.0)) {
        return;
    }
    let direction = if v1 > v0 { 1 } else { -1 };
    let s = if v1 == 0.0 {
        step.s1()
    } else {
        // Illinois-modified regula falsi on the dense output
        let (mut a, mut fa) = (step.s0, v0);
        let (mut b, mut fb) = (step.s1(), v1);
        let mut c = b;
        for _ in 0..100 {
            c = (a * fb - b * fa) / (fb - fa);
            let fc = step.eval(c)[1];
            if fc == 0.0 || (b - a).abs() < 1e-15 * c.abs().max(1.0) {
                break;
            }
            if fc * fb < 0.0 {
                a = b;
                fa = fb;
            } else {
                fa *= 0.5;
            }
            b = c;
            fb = fc;
        }
        c
    };
    events.push(TurningEvent {
        s,
        h: step.eval(s)[0],
        direction,
    });
}
