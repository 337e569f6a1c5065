//! Turning points of the first integral and the resulting classification.

use serde::Serialize;

use super::{OdeError, OdeParams, H_MAX_BOUND, H_MIN_BOUND};

/// `Φ(h) = k − 2c0/(n−2) h^(2−n) − R/(n(n−1)) h²`, so that `(h')² = Φ(h)`.
pub fn phi(params: &OdeParams, h: f64) -> f64 {
    let n = params.n as f64;
    params.k - 2.0 * params.c0 / (n - 2.0) * h.powi(2 - params.n as i32) - params.a() * h * h
}

pub fn phi_prime(params: &OdeParams, h: f64) -> f64 {
    2.0 * params.c0 * h.powi(1 - params.n as i32) - 2.0 * params.a() * h
}

pub fn phi_second(params: &OdeParams, h: f64) -> f64 {
    let n = params.n as f64;
    2.0 * params.c0 * (1.0 - n) * h.powi(-(params.n as i32)) - 2.0 * params.a()
}

/// Positive `h` where `Φ' = 0`, if any.
pub fn critical_point(params: &OdeParams) -> Option<f64> {
    let ratio = params.c0 / params.a();
    (ratio > 0.0 && ratio.is_finite()).then(|| ratio.powf(1.0 / params.n as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootKind {
    Simple,
    /// Double root: an equilibrium of the ODE.
    Double,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub h: f64,
    pub kind: RootKind,
    /// `Φ'` at the root.
    pub slope: f64,
}

/// Relative size below which `Φ` at its critical point counts as zero.
const DOUBLE_ROOT_TOL: f64 = 1e-12;
const GRID_POINTS: usize = 4000;

fn phi_scale(params: &OdeParams, h: f64) -> f64 {
    let n = params.n as f64;
    params
        .k
        .abs()
        .max((2.0 * params.c0 / (n - 2.0) * h.powi(2 - params.n as i32)).abs())
        .max((params.a() * h * h).abs())
        .max(f64::MIN_POSITIVE)
}

/// All positive roots of `Φ` in `[1e−8, 1e8]`, ascending.
pub fn turning_points(params: &OdeParams) -> Result<Vec<Root>, OdeError> {
    params.validate()?;
    let crit = critical_point(params).filter(|h| (H_MIN_BOUND..=H_MAX_BOUND).contains(h));
    if let Some(hc) = crit {
        let v = phi(params, hc);
        if v.abs() <= DOUBLE_ROOT_TOL * phi_scale(params, hc) {
            return Ok(vec![Root {
                h: hc,
                kind: RootKind::Double,
                slope: phi_prime(params, hc),
            }]);
        }
    }

    let (l0, l1) = (H_MIN_BOUND.ln(), H_MAX_BOUND.ln());
    let mut grid: Vec<f64> = (0..=GRID_POINTS)
        .map(|i| (l0 + (l1 - l0) * i as f64 / GRID_POINTS as f64).exp())
        .collect();
    if let Some(hc) = crit {
        grid.push(hc);
        grid.sort_by(f64::total_cmp);
    }

    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (phi(params, a), phi(params, b));
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            roots.push(refine(params, a, b));
        }
    }
    if roots.is_empty() {
        return Err(OdeError::NoPositiveRoots);
    }
    Ok(roots
        .into_iter()
        .map(|h| Root {
            h,
            kind: RootKind::Simple,
            slope: phi_prime(params, h),
        })
        .collect())
}

/// Bisection to a tight bracket, then guarded Newton.
fn refine(params: &OdeParams, mut a: f64, mut b: f64) -> f64 {
    let fa = phi(params, a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = phi(params, m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
        if b - a <= 1e-15 * b {
            break;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..3 {
        let d = phi_prime(params, x);
        if d == 0.0 {
            break;
        }
        let next = x - phi(params, x) / d;
        if !(next >= a && next <= b) {
            break;
        }
        x = next;
    }
    x
}

/// Solution types of the radial equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// `c0 = 0`: sphere, Euclidean or hyperbolic space.
    SpaceForm,
    /// Double root of `Φ`: the product `S¹ × S^(n−1)`.
    Cylinder,
    /// Two simple roots with `Φ > 0` between them: a periodic warping.
    Periodic,
    /// `Φ > 0` for arbitrarily large `h`: the solution escapes.
    Unbounded,
    Degenerate,
}

pub fn classify(params: &OdeParams) -> Classification {
    if params.validate().is_err() {
        return Classification::Degenerate;
    }
    if params.c0 == 0.0 {
        return Classification::SpaceForm;
    }
    let escapes = phi(params, H_MAX_BOUND) > 0.0;
    let roots = match turning_points(params) {
        Ok(r) => r,
        Err(_) if escapes => return Classification::Unbounded,
        Err(_) => return Classification::Degenerate,
    };
    if roots.iter().any(|r| r.kind == RootKind::Double) {
        return Classification::Cylinder;
    }
    if periodic_pair(params, &roots).is_some() {
        return Classification::Periodic;
    }
    if escapes {
        Classification::Unbounded
    } else {
        Classification::Degenerate
    }
}

/// Adjacent simple roots enclosing a region where `Φ > 0`.
pub(crate) fn periodic_pair(params: &OdeParams, roots: &[Root]) -> Option<(f64, f64)> {
    roots
        .windows(2)
        .find(|w| w.iter().all(|r| r.kind == RootKind::Simple) && phi(params, 0.5 * (w[0].h + w[1].h)) > 0.0)
        .map(|w| (w[0].h, w[1].h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, r: f64, c0: f64, k: f64) -> OdeParams {
        OdeParams::new(n, r, c0, k).unwrap()
    }

    #[test]
    fn sds_roots() {
        let params = p(3, 2.0, 0.3, 1.0);
        let roots = turning_points(&params).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert!(phi(&params, r.h).abs() < 1e-12);
        }
        // roots of the cubic h³ − 3h + 1.8 = 0
        assert!((roots[0].h - 0.729_299_28).abs() < 1e-8);
        assert!((roots[1].h - 1.248_140_47).abs() < 1e-8);
    }

    #[test]
    fn cylinder_double_root() {
        let params = p(3, 2.0, 1.0 / 3.0, 1.0);
        let roots = turning_points(&params).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].kind, RootKind::Double);
        assert!((roots[0].h - 1.0).abs() < 1e-12);
        assert!((phi_second(&params, 1.0) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_single_root() {
        let roots = turning_points(&p(3, 6.0, 0.0, 1.0)).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_roots_reported() {
        // Φ = 1 + h²/3 > 0 everywhere
        assert_eq!(turning_points(&p(3, -2.0, 0.0, 1.0)), Err(OdeError::NoPositiveRoots));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&p(3, 2.0, 1.0 / 3.0, 1.0)), Classification::Cylinder);
        assert_eq!(classify(&p(3, 2.0, 0.3, 1.0)), Classification::Periodic);
        assert_eq!(classify(&p(3, 0.0, 0.0, 0.0)), Classification::SpaceForm);
        assert_eq!(classify(&p(3, -6.0, 0.1, 1.0)), Classification::Unbounded);
        assert_eq!(classify(&p(3, 2.0, 0.5, 1.0)), Classification::Degenerate);
    }

    #[test]
    fn periodic_in_higher_dimension() {
        // n = 4, R = 12: a = 1, equilibrium at c0 = h*⁴ with k = 2h*²
        let params = p(4, 12.0, 0.8, 2.0);
        assert_eq!(classify(&params), Classification::Periodic);
    }
}
