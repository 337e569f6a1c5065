//! Periods of oscillating solutions by quadrature of `2∫ dh/√Φ`.

use serde::Serialize;

use super::roots::{classify, critical_point, periodic_pair, phi, phi_second, turning_points, Classification};
use super::{OdeError, OdeParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub params: OdeParams,
    pub h_min: f64,
    pub h_max: f64,
    pub period: f64,
}

/// Period with `nodes` midpoint nodes in the angle variable.
///
/// With `h = m − d cos θ` the integrand `dh/√Φ` becomes `dθ/√ψ(θ)` where
/// `ψ = Φ/((h − h_min)(h_max − h))` is smooth and even in `θ`, so the
/// midpoint (Gauss–Chebyshev) rule converges geometrically.
pub fn period_with_nodes(params: &OdeParams, h_min: f64, h_max: f64, nodes: usize) -> f64 {
    let m = 0.5 * (h_max + h_min);
    let d = 0.5 * (h_max - h_min);
    let step = std::f64::consts::PI / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|j| {
            let theta = (j as f64 + 0.5) * step;
            let h = m - d * theta.cos();
            let (half_s, half_c) = (0.5 * theta).sin_cos();
            // (h − h_min)(h_max − h) written without cancellation
            let gap = 4.0 * d * d * half_s * half_s * half_c * half_c;
            let psi = phi(params, h) / gap;
            1.0 / psi.sqrt()
        })
        .sum();
    2.0 * step * sum
}

/// The periodic orbit of `params` and its period.
pub fn period(params: &OdeParams) -> Result<PeriodicOrbit, OdeError> {
    match classify(params) {
        Classification::Periodic => {}
        other => return Err(OdeError::NotPeriodic(format!("{other:?}"))),
    }
    let roots = turning_points(params)?;
    let (h_min, h_max) =
        periodic_pair(params, &roots).ok_or_else(|| OdeError::NotPeriodic("no enclosing root pair".into()))?;
    let mut nodes = 32;
    let mut prev = period_with_nodes(params, h_min, h_max, nodes);
    while nodes < 1 << 14 {
        nodes *= 2;
        let next = period_with_nodes(params, h_min, h_max, nodes);
        let done = (next - prev).abs() <= 1e-13 * next.abs();
        prev = next;
        if done {
            break;
        }
    }
    Ok(PeriodicOrbit {
        params: *params,
        h_min,
        h_max,
        period: prev,
    })
}

/// Small-oscillation period `2π/ω`, `ω² = −Φ''(h*)/2`, about the
/// critical point of `Φ`.
pub fn harmonic_period(params: &OdeParams) -> Option<f64> {
    let hc = critical_point(params)?;
    let omega_sq = -0.5 * phi_second(params, hc);
    (omega_sq > 0.0).then(|| 2.0 * std::f64::consts::PI / omega_sq.sqrt())
}
