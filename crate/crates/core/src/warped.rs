//! Radial geometry of warped products `g = ds² + h(s)² g_{N(k)}`.
//!
//! Everything here is a function of the single coordinate `s`. The warping
//! function and radial fields are supplied as Taylor [`Series`] about `s`,
//! so quantities needing four or five derivatives of `h` stay exact.
//!
//! Frame conventions: index 0 is `∂_s`, indices `1..n` are orthonormal fiber
//! directions. In that frame the Ricci tensor is `diag(λ_rad, λ_tan, …)` with
//!
//! * `λ_rad = −(n−1) h''/h`
//! * `λ_tan = −h''/h − (n−2)((h')² − k)/h²`
//!
//! and, writing `H = h'/h`, `ν = λ_rad − λ_tan`, the only nonzero components
//! of `∇Ric` are `R_{00,0} = λ_rad'`, `R_{aa,0} = λ_tan'` and
//! `R_{0a,a} = R_{a0,a} = νH`.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::chart::{metric_fn, Chart, Interval, ScalarField, SingularLocus};
use crate::jet::Jet;
use crate::series::Series;

/// A radial function given as its Taylor series about any `s`.
pub type Profile = Arc<dyn Fn(f64) -> Series + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("warping function is not positive at s = {s} (h = {h})")]
    DomainError { s: f64, h: f64 },
    #[error("potential is not static at s = {s}: residual {residual:e} > {tol:e}")]
    NotStatic { s: f64, residual: f64, tol: f64 },
    #[error("S is not constant: |S'| = {slope:e} > {tol:e} at s = {s}")]
    SNotConstant { s: f64, slope: f64, tol: f64 },
    #[error("operation requires dimension {required}, space has n = {n}")]
    Dimension { required: usize, n: usize },
}

/// Where the warping-function jets come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JetSource {
    Analytic,
    /// Jets recovered from an ODE solution by differentiating the equation.
    Ode,
}

#[derive(Clone)]
pub struct WarpedSpace {
    pub name: String,
    pub n: usize,
    /// Sectional curvature of the fiber.
    pub k: f64,
    pub h: Profile,
    pub source: JetSource,
    /// Interval of `s` on which `h` is defined.
    pub domain: (f64, f64),
}

impl std::fmt::Debug for WarpedSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WarpedSpace")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("k", &self.k)
            .field("source", &self.source)
            .field("domain", &self.domain)
            .finish()
    }
}

/// A radial function `f(s)`, typically a static potential candidate.
#[derive(Clone)]
pub struct RadialField {
    pub f: Profile,
}

impl RadialField {
    pub fn new(f: impl Fn(f64) -> Series + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    /// The field `h'` of a warped space.
    pub fn derivative_of(space: &WarpedSpace) -> Self {
        let h = space.h.clone();
        Self {
            f: Arc::new(move |s| h(s).deriv()),
        }
    }

    pub fn at(&self, s: f64) -> Series {
        (self.f)(s)
    }

    /// Lift to a scalar field on the chart of [`WarpedSpace::chart`]
    /// (the radial coordinate is axis 0).
    pub fn lift(&self) -> ScalarField {
        let f = self.f.clone();
        Arc::new(move |x: &[Jet]| x[0].apply(f(x[0].value()).derivatives4()))
    }
}

impl WarpedSpace {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        k: f64,
        domain: (f64, f64),
        h: impl Fn(f64) -> Series + Send + Sync + 'static,
    ) -> Self {
        assert!(n >= 2, "warped product needs n ≥ 2");
        Self {
            name: name.into(),
            n,
            k,
            h: Arc::new(h),
            source: JetSource::Analytic,
            domain,
        }
    }

    pub fn with_source(mut self, source: JetSource) -> Self {
        self.source = source;
        self
    }

    /// Coordinate chart `(s, θ, φ)` with fiber metric `dθ² + sn_k(θ)² dφ²`.
    /// Only `n = 3` has a chart here.
    pub fn chart(&self) -> Result<Chart, RadialError> {
        if self.n != 3 {
            return Err(RadialError::Dimension { required: 3, n: self.n });
        }
        let k = self.k;
        let h = self.h.clone();
        let theta_max = if k > 0.0 { std::f64::consts::PI / k.sqrt() } else { 3.0 };
        let mut loci = vec![SingularLocus { axis: 1, value: 0.0 }];
        if k > 0.0 {
            loci.push(SingularLocus {
                axis: 1,
                value: theta_max,
            });
        }
        for end in [self.domain.0, self.domain.1] {
            if h(end).value().abs() < 1e-12 {
                loci.push(SingularLocus { axis: 0, value: end });
            }
        }
        let metric = metric_fn(3, move |x, m| {
            let hs = x[0].apply(h(x[0].value()).derivatives4());
            let sn = fiber_sn(&x[1], k);
            m[0][0] = Jet::constant(1.0, x[0].dim());
            m[1][1] = hs.square();
            m[2][2] = (hs * sn).square();
        });
        Ok(Chart::new(
            self.name.clone(),
            vec![
                Interval::new(self.domain.0, self.domain.1),
                Interval::new(0.0, theta_max),
                Interval::periodic(0.0, 2.0 * std::f64::consts::PI),
            ],
            loci,
            metric,
        ))
    }
}

/// `sn_k(θ)`: the polar warping of the constant-curvature fiber.
fn fiber_sn(theta: &Jet, k: f64) -> Jet {
    if k > 0.0 {
        let r = k.sqrt();
        (*theta * r).sin() / r
    } else if k < 0.0 {
        let r = (-k).sqrt();
        (*theta * r).sinh() / r
    } else {
        *theta
    }
}

/// Radial curvature data at a point, as Taylor series in `s`.
struct RadialGeometry {
    n: usize,
    /// `H = h'/h`.
    hh: Series,
    lam_rad: Series,
    lam_tan: Series,
    scalar: Series,
    e_rad: Series,
    e_tan: Series,
}

impl RadialGeometry {
    fn at(space: &WarpedSpace, s: f64) -> Result<Self, RadialError> {
        let h = (space.h)(s);
        if !(h.value() > 0.0) {
            return Err(RadialError::DomainError { s, h: h.value() });
        }
        let n = space.n;
        let nf = n as f64;
        let hp = h.deriv();
        let hpp = hp.deriv();
        let inv_h = h.recip();
        let lam_rad = (hpp * inv_h).scale(-(nf - 1.0));
        let lam_tan = -(hpp * inv_h) - ((hp.square() - space.k) * inv_h.square()).scale(nf - 2.0);
        let scalar = lam_rad + lam_tan.scale(nf - 1.0);
        let e_rad = lam_rad - scalar.scale(1.0 / nf);
        let e_tan = lam_tan - scalar.scale(1.0 / nf);
        Ok(Self {
            n,
            hh: hp * inv_h,
            lam_rad,
            lam_tan,
            scalar,
            e_rad,
            e_tan,
        })
    }

    fn s_series(&self) -> Series {
        self.e_rad.square() + self.e_tan.square().scale(self.n as f64 - 1.0)
    }

    fn f3_series(&self) -> Series {
        self.e_rad.powi(3) + self.e_tan.powi(3).scale(self.n as f64 - 1.0)
    }

    /// Function Laplacian `u'' + (n−1)H u'` at the expansion point.
    fn laplacian(&self, u: &Series) -> f64 {
        u.derivative(2) + (self.n as f64 - 1.0) * self.hh.value() * u.derivative(1)
    }

    /// Rough Laplacian of `α g + β ds⊗ds`, returned as its radial-radial
    /// and tangential frame components.
    fn tensor_laplacian(&self, alpha: &Series, beta: &Series) -> (f64, f64) {
        let la = self.laplacian(alpha);
        let lb = self.laplacian(beta);
        let h2 = self.hh.value().powi(2);
        let b = beta.value();
        let m = self.n as f64 - 1.0;
        (la + lb - 2.0 * m * b * h2, la + 2.0 * b * h2)
    }

    fn frame(&self) -> RadialFrame {
        let n = self.n;
        let hh = self.hh.value();
        let nu = self.lam_rad.value() - self.lam_tan.value();
        let mu = self.e_rad.value() - self.e_tan.value();
        let mut ricci = vec![0.0; n];
        let mut e = vec![0.0; n];
        let mut ricci_d = vec![0.0; n * n * n];
        let mut e_d = vec![0.0; n * n * n];
        let at = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        ricci[0] = self.lam_rad.value();
        e[0] = self.e_rad.value();
        ricci_d[at(0, 0, 0)] = self.lam_rad.derivative(1);
        e_d[at(0, 0, 0)] = self.e_rad.derivative(1);
        for a in 1..n {
            ricci[a] = self.lam_tan.value();
            e[a] = self.e_tan.value();
            ricci_d[at(a, a, 0)] = self.lam_tan.derivative(1);
            e_d[at(a, a, 0)] = self.e_tan.derivative(1);
            ricci_d[at(0, a, a)] = nu * hh;
            ricci_d[at(a, 0, a)] = nu * hh;
            e_d[at(0, a, a)] = mu * hh;
            e_d[at(a, 0, a)] = mu * hh;
        }
        let mut cotton = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    cotton[at(i, j, k)] = ricci_d[at(i, j, k)] - ricci_d[at(i, k, j)];
                }
            }
        }
        RadialFrame {
            n,
            ricci,
            e,
            e_d,
            cotton,
            scalar: self.scalar.value(),
        }
    }
}

/// Frame components of the curvature at one radius.
#[derive(Clone, Debug)]
pub struct RadialFrame {
    pub n: usize,
    /// Ricci eigenvalues (diagonal).
    pub ricci: Vec<f64>,
    /// E eigenvalues (diagonal).
    pub e: Vec<f64>,
    /// `E_{ij,k}`, flattened `(i·n + j)·n + k`.
    pub e_d: Vec<f64>,
    /// `C_{ijk}`, same layout.
    pub cotton: Vec<f64>,
    pub scalar: f64,
}

impl RadialFrame {
    #[inline]
    fn ix(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn grad_e_sq(&self) -> f64 {
        self.e_d.iter().map(|v| v * v).sum()
    }

    pub fn cotton_sq(&self) -> f64 {
        self.cotton.iter().map(|v| v * v).sum()
    }

    /// `Σ E_{ik} E_{kj,m} E_{ij,m}`.
    pub fn cubic(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for m in 0..n {
                    // E is diagonal, so k = i
                    acc += self.e[i] * self.e_d[self.ix(i, j, m)] * self.e_d[self.ix(i, j, m)];
                }
            }
        }
        acc
    }

    /// `Σ f_{,m} E_{ik} E_{jk} C_{imj}` for a radial gradient `f'`.
    pub fn gradient_cotton_term(&self, fp: f64) -> f64 {
        (0..self.n)
            .map(|i| self.e[i] * self.e[i] * self.cotton[self.ix(i, 0, i)])
            .sum::<f64>()
            * fp
    }

    /// D tensor (general-n form) for the radial gradient `f'`.
    pub fn d_tensor(&self, fp: f64) -> Vec<f64> {
        let n = self.n;
        let nf = n as f64;
        let df = |i: usize| if i == 0 { fp } else { 0.0 };
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let ric = |i: usize, j: usize| if i == j { self.ricci[i] } else { 0.0 };
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = (nf - 1.0) * (ric(i, k) * df(j) - ric(i, j) * df(k))
                        + self.scalar * (df(k) * delta(i, j) - df(j) * delta(i, k));
                    for l in 0..n {
                        v += (ric(l, j) * delta(i, k) - ric(l, k) * delta(i, j)) * df(l);
                    }
                    out[self.ix(i, j, k)] = v / (nf - 2.0);
                }
            }
        }
        out
    }
}

/// Pointwise radial invariants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialInvariants {
    pub s: f64,
    pub lambda_rad: f64,
    pub lambda_tan: f64,
    pub scalar: f64,
    pub e_rad: f64,
    pub e_tan: f64,
    pub inv_s: f64,
    pub inv_f3: f64,
    /// `Σ R_{ij}²`.
    pub ricci_sq: f64,
    pub cotton_sq: f64,
    pub grad_e_sq: f64,
    /// `Σ E_{ik}E_{kj,m}E_{ij,m}`.
    pub cubic: f64,
    /// `dS/ds`.
    pub s_slope: f64,
}

pub fn radial_invariants(space: &WarpedSpace, s: f64) -> Result<RadialInvariants, RadialError> {
    let geo = RadialGeometry::at(space, s)?;
    let fr = geo.frame();
    let s_series = geo.s_series();
    let lr = geo.lam_rad.value();
    let lt = geo.lam_tan.value();
    Ok(RadialInvariants {
        s,
        lambda_rad: lr,
        lambda_tan: lt,
        scalar: geo.scalar.value(),
        e_rad: geo.e_rad.value(),
        e_tan: geo.e_tan.value(),
        inv_s: s_series.value(),
        inv_f3: geo.f3_series().value(),
        ricci_sq: lr * lr + (space.n as f64 - 1.0) * lt * lt,
        cotton_sq: fr.cotton_sq(),
        grad_e_sq: fr.grad_e_sq(),
        cubic: fr.cubic(),
        s_slope: s_series.derivative(1),
    })
}

/// Frame components of curvature at `s` (for cross-checks).
pub fn radial_frame(space: &WarpedSpace, s: f64) -> Result<RadialFrame, RadialError> {
    Ok(RadialGeometry::at(space, s)?.frame())
}

/// `Δu = u'' + (n−1)(h'/h)u'`.
pub fn radial_laplacian(space: &WarpedSpace, u: &RadialField, s: f64) -> Result<f64, RadialError> {
    let geo = RadialGeometry::at(space, s)?;
    Ok(geo.laplacian(&u.at(s)))
}

/// Largest deviation from `f_{,ij} = f(R_{ij} − R/(n−1) g_{ij})` over the
/// radial and tangential Hessian eigendirections.
pub fn static_residual(space: &WarpedSpace, f: &RadialField, s: f64) -> Result<f64, RadialError> {
    let geo = RadialGeometry::at(space, s)?;
    Ok(static_residual_with(&geo, &f.at(s)))
}

fn static_residual_with(geo: &RadialGeometry, f: &Series) -> f64 {
    let c = geo.scalar.value() / (geo.n as f64 - 1.0);
    let fv = f.value();
    let rad = f.derivative(2) - fv * (geo.lam_rad.value() - c);
    let tan = geo.hh.value() * f.derivative(1) - fv * (geo.lam_tan.value() - c);
    rad.abs().max(tan.abs())
}

fn require_static(geo: &RadialGeometry, f: &Series, s: f64, tol: f64) -> Result<(), RadialError> {
    let residual = static_residual_with(geo, f);
    if residual > tol || residual.is_nan() {
        return Err(RadialError::NotStatic { s, residual, tol });
    }
    Ok(())
}

fn require_three(space: &WarpedSpace) -> Result<(), RadialError> {
    if space.n != 3 {
        return Err(RadialError::Dimension {
            required: 3,
            n: space.n,
        });
    }
    Ok(())
}

/// Both sides of an identity evaluated at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Balance {
    pub lhs: f64,
    pub rhs: f64,
}

impl Balance {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// `½fΔS + ½⟨∇f,∇S⟩` against `f(Σ E_{ij,k}² + ½ΣC² + 6F₃ + RS)`.
pub fn bochner_s_balance(
    space: &WarpedSpace,
    f: &RadialField,
    s: f64,
    static_tol: f64,
) -> Result<Balance, RadialError> {
    require_three(space)?;
    let geo = RadialGeometry::at(space, s)?;
    let fs = f.at(s);
    require_static(&geo, &fs, s, static_tol)?;
    let fr = geo.frame();
    let sser = geo.s_series();
    let fv = fs.value();
    let lhs = 0.5 * fv * geo.laplacian(&sser) + 0.5 * fs.derivative(1) * sser.derivative(1);
    let r = geo.scalar.value();
    let rhs = fv * (fr.grad_e_sq() + 0.5 * fr.cotton_sq() + 6.0 * geo.f3_series().value() + r * sser.value());
    Ok(Balance { lhs, rhs })
}

pub fn bochner_s_residual(space: &WarpedSpace, f: &RadialField, s: f64, static_tol: f64) -> Result<f64, RadialError> {
    bochner_s_balance(space, f, s, static_tol).map(|b| b.residual())
}

/// `⅓fΔF₃ + ⅓⟨∇f,∇F₃⟩` against
/// `f(RF₃ + S² + 2ΣE_{ik}E_{kj,m}E_{ij,m}) + 2Σf_{,m}E_{ik}E_{jk}C_{imj}`.
pub fn bochner_f3_balance(
    space: &WarpedSpace,
    f: &RadialField,
    s: f64,
    static_tol: f64,
) -> Result<Balance, RadialError> {
    require_three(space)?;
    let geo = RadialGeometry::at(space, s)?;
    let fs = f.at(s);
    require_static(&geo, &fs, s, static_tol)?;
    let fr = geo.frame();
    let f3 = geo.f3_series();
    let sv = geo.s_series().value();
    let fv = fs.value();
    let fp = fs.derivative(1);
    let lhs = fv * geo.laplacian(&f3) / 3.0 + fp * f3.derivative(1) / 3.0;
    let r = geo.scalar.value();
    let rhs = fv * (r * f3.value() + sv * sv + 2.0 * fr.cubic()) + 2.0 * fr.gradient_cotton_term(fp);
    Ok(Balance { lhs, rhs })
}

pub fn bochner_f3_residual(space: &WarpedSpace, f: &RadialField, s: f64, static_tol: f64) -> Result<f64, RadialError> {
    bochner_f3_balance(space, f, s, static_tol).map(|b| b.residual())
}

/// Residuals of the two fourth-order static-space identities for
/// `Δ(f_{,ij})` and `fΔ(E_{ij})`, each the larger of the radial-radial and
/// tangential component gaps.
pub fn lemma31_residuals(
    space: &WarpedSpace,
    f: &RadialField,
    s: f64,
    static_tol: f64,
) -> Result<(f64, f64), RadialError> {
    require_three(space)?;
    let geo = RadialGeometry::at(space, s)?;
    let fs = f.at(s);
    require_static(&geo, &fs, s, static_tol)?;
    let fr = geo.frame();
    let fv = fs.value();
    let fp = fs.derivative(1);
    let r = geo.scalar.value();
    let sv = geo.s_series().value();
    let (er, et) = (geo.e_rad.value(), geo.e_tan.value());
    let (erp, etp) = (geo.e_rad.derivative(1), geo.e_tan.derivative(1));
    let hh = geo.hh.value();
    let mu = er - et;
    // C_{a0a}, the single independent Cotton component
    let c_a0a = fr.cotton[fr.ix(1, 0, 1)];
    let c_000 = fr.cotton[fr.ix(0, 0, 0)];

    // Hessian f_{,ij} = α g + β ds², α = Hf', β = f'' − Hf'
    let fpp_series = fs.deriv().deriv();
    let alpha = geo.hh * fs.deriv();
    let beta = fpp_series - alpha;
    let (lap_hess_rr, lap_hess_tt) = geo.tensor_laplacian(&alpha, &beta);
    let common = |e: f64| 6.0 * fv * e * e + 0.5 * r * fv * e + r * r / 12.0 * fv - 2.0 * fv * sv;
    let rhs_hess_rr = common(er) + fp * erp + fp * c_000;
    let rhs_hess_tt = common(et) + fp * mu * hh + fp * c_a0a;
    let res_hess = (lap_hess_rr - rhs_hess_rr).abs().max((lap_hess_tt - rhs_hess_tt).abs());

    // E = e_tan g + (e_rad − e_tan) ds²
    let (lap_e_rr, lap_e_tt) = geo.tensor_laplacian(&geo.e_tan, &(geo.e_rad - geo.e_tan));
    let common_e = |e: f64| 6.0 * fv * e * e + r * fv * e - 2.0 * fv * sv;
    let rhs_e_rr = common_e(er) + 2.0 * fp * c_000 - fp * erp;
    let rhs_e_tt = common_e(et) + 2.0 * fp * c_a0a - fp * etp;
    let res_e = (fv * lap_e_rr - rhs_e_rr).abs().max((fv * lap_e_tt - rhs_e_tt).abs());
    Ok((res_hess, res_e))
}

/// Largest `|Σ E_{ij,k}² + ½ΣC² + 6F₃ + RS|` over `points`, after checking
/// that `S` is constant there (`|S'| ≤ tol`) and that `f` is static.
pub fn eq41_balance(space: &WarpedSpace, f: &RadialField, points: &[f64], tol: f64) -> Result<f64, RadialError> {
    require_three(space)?;
    let mut worst = 0.0f64;
    for &s in points {
        let geo = RadialGeometry::at(space, s)?;
        require_static(&geo, &f.at(s), s, tol)?;
        let sser = geo.s_series();
        let slope = sser.derivative(1);
        if slope.abs() > tol {
            return Err(RadialError::SNotConstant {
                s,
                slope: slope.abs(),
                tol,
            });
        }
        let fr = geo.frame();
        let v =
            fr.grad_e_sq() + 0.5 * fr.cotton_sq() + 6.0 * geo.f3_series().value() + geo.scalar.value() * sser.value();
        worst = worst.max(v.abs());
    }
    Ok(worst)
}

/// Radial profiles used by the catalog.
pub mod profiles {
    use crate::series::Series;

    pub fn sin(s: f64) -> Series {
        Series::variable(s).sin()
    }

    pub fn cos(s: f64) -> Series {
        Series::variable(s).cos()
    }

    pub fn sinh(s: f64) -> Series {
        Series::variable(s).sinh()
    }

    pub fn cosh(s: f64) -> Series {
        Series::variable(s).cosh()
    }

    pub fn identity(s: f64) -> Series {
        Series::variable(s)
    }

    pub fn one(_s: f64) -> Series {
        Series::constant(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::profiles::*;
    use super::*;

    fn s3() -> WarpedSpace {
        WarpedSpace::new("s3", 3, 1.0, (0.0, std::f64::consts::PI), sin)
    }

    fn cylinder() -> WarpedSpace {
        WarpedSpace::new("s1xs2", 3, 1.0, (0.0, 2.0 * std::f64::consts::PI), one)
    }

    fn flat_polar() -> WarpedSpace {
        WarpedSpace::new("r3-polar", 3, 1.0, (0.0, 10.0), identity)
    }

    #[test]
    fn unit_sphere_invariants() {
        let inv = radial_invariants(&s3(), 1.0).unwrap();
        assert!((inv.lambda_rad - 2.0).abs() < 1e-14);
        assert!((inv.lambda_tan - 2.0).abs() < 1e-14);
        assert!((inv.scalar - 6.0).abs() < 1e-13);
        assert!(inv.inv_s.abs() < 1e-13);
    }

    #[test]
    fn cylinder_invariants() {
        let inv = radial_invariants(&cylinder(), 0.4).unwrap();
        assert_eq!((inv.lambda_rad, inv.lambda_tan), (0.0, 1.0));
        assert!((inv.scalar - 2.0).abs() < 1e-15);
        assert!((inv.inv_s - 2.0 / 3.0).abs() < 1e-15);
        assert!((inv.inv_f3 + 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn flat_polar_invariants_vanish() {
        let inv = radial_invariants(&flat_polar(), 2.0).unwrap();
        for v in [
            inv.lambda_rad,
            inv.lambda_tan,
            inv.scalar,
            inv.inv_s,
            inv.inv_f3,
            inv.cotton_sq,
            inv.grad_e_sq,
        ] {
            assert!(v.abs() < 1e-15);
        }
    }

    #[test]
    fn laplacian_examples() {
        let cosf = RadialField::new(cos);
        let s = 0.8;
        assert!((radial_laplacian(&cylinder(), &cosf, s).unwrap() + s.cos()).abs() < 1e-15);
        assert!((radial_laplacian(&s3(), &cosf, s).unwrap() + 3.0 * s.cos()).abs() < 1e-14);
        let sq = RadialField::new(|s| Series::variable(s).square());
        assert!((radial_laplacian(&flat_polar(), &sq, 2.0).unwrap() - 6.0).abs() < 1e-14);
    }

    #[test]
    fn static_residual_examples() {
        let cosf = RadialField::new(cos);
        for s in [0.3, 1.2, 2.9] {
            assert!(static_residual(&cylinder(), &cosf, s).unwrap() < 1e-15);
            assert!(static_residual(&s3(), &cosf, s).unwrap() < 1e-14);
        }
        let lin = RadialField::new(identity);
        for s in [0.5, -1.5, 3.0] {
            let r = static_residual(&cylinder(), &lin, s).unwrap();
            assert!((r - s.abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn bochner_and_lemma_vanish_on_model_spaces() {
        let cosf = RadialField::new(cos);
        for space in [s3(), cylinder()] {
            for s in [0.4, 1.3, 2.2] {
                assert!(bochner_s_residual(&space, &cosf, s, 1e-9).unwrap() < 1e-12);
                assert!(bochner_f3_residual(&space, &cosf, s, 1e-9).unwrap() < 1e-12);
                let (a, b) = lemma31_residuals(&space, &cosf, s, 1e-9).unwrap();
                assert!(a < 1e-12 && b < 1e-12, "{} {a:e} {b:e}", space.name);
            }
        }
        let b = bochner_s_balance(&cylinder(), &cosf, 0.7, 1e-9).unwrap();
        assert!(b.lhs.abs() < 1e-15 && b.rhs.abs() < 1e-14);
    }

    #[test]
    fn eq41_on_constant_s_spaces() {
        let cosf = RadialField::new(cos);
        let pts = [0.3, 0.9, 1.7, 2.5];
        assert!(eq41_balance(&cylinder(), &cosf, &pts, 1e-9).unwrap() < 1e-14);
        assert!(eq41_balance(&s3(), &cosf, &pts, 1e-9).unwrap() < 1e-12);
    }

    #[test]
    fn non_static_potential_is_reported() {
        let lin = RadialField::new(identity);
        let err = bochner_s_residual(&cylinder(), &lin, 1.0, 1e-9).unwrap_err();
        assert!(matches!(err, RadialError::NotStatic { .. }));
    }

    #[test]
    fn varying_s_rejected_by_eq41() {
        let bumpy = WarpedSpace::new("bumpy", 3, 1.0, (0.0, 6.0), |s| Series::variable(s).sin() * 0.3 + 1.0);
        let cosf = RadialField::new(cos);
        // not static either; the static check fires first
        assert!(eq41_balance(&bumpy, &cosf, &[1.0], 1e-9).is_err());
    }

    #[test]
    fn nonpositive_h_is_domain_error() {
        assert!(matches!(
            radial_invariants(&s3(), 4.0),
            Err(RadialError::DomainError { .. })
        ));
    }

    #[test]
    fn trace_free_and_f3_bound_on_generic_profile() {
        let space = WarpedSpace::new("g", 3, 1.0, (0.0, 6.0), |s| Series::variable(s).sin() * 0.3 + 1.2);
        for i in 0..20 {
            let inv = radial_invariants(&space, 0.3 * i as f64).unwrap();
            assert!((inv.e_rad + 2.0 * inv.e_tan).abs() < 1e-13);
            let bound = inv.inv_s.powf(1.5) / 6f64.sqrt();
            // two equal eigenvalues: the bound is attained
            assert!((inv.inv_f3.abs() - bound).abs() < 1e-12);
        }
    }
}
