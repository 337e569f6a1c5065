//! Decision predicates for a triple `(M, g, f)`: static, Cotton-flat,
//! D-flat, the three-dimensional tensor relations and the pointwise
//! inequality `Σ R_ij² ≤ R²/2`.
//!
//! All tensors are moved to the orthonormal frame of the chart's metric
//! before they are combined, so `δ_ij` is literal and norms are Frobenius.

use serde::Serialize;
use thiserror::Error;

use crate::catalog::SpaceSpec;
use crate::chart::{curvature_and_jets, Chart, ChartError, CovariantJets, CurvatureBundle, ScalarField};
use crate::identities::{IdentityCheck, ResidualTracker};
use crate::sampling::chart_samples;
use crate::tensor::frame_components;

/// `|∇f|` below this at every sample means the potential is constant.
const CONSTANT_GRAD: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifierError {
    #[error("D tensor needs n ≥ 3, got n = {0}")]
    DimensionTooLow(usize),
    #[error("operation is defined for n = 3 only, got n = {0}")]
    NotThreeDimensional(usize),
    #[error("potential is constant on every sample; a static potential must be non-constant")]
    ConstantPotential,
    #[error("no sample points")]
    NoSamples,
    #[error(transparent)]
    Chart(#[from] ChartError),
}

/// Frame components of the `D` tensor at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct DTensor {
    pub n: usize,
    /// `D_abc`, row-major in `n³`, from the general-dimension definition.
    pub components: Vec<f64>,
    /// The same tensor from the trace-free rewrite (n = 3 only).
    pub e_form: Option<Vec<f64>>,
}

impl DTensor {
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.components[(i * self.n + j) * self.n + k]
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest deviation between the two formulas (0 when only one exists).
    pub fn form_gap(&self) -> f64 {
        self.e_form.as_ref().map_or(0.0, |e| max_abs_diff(e, &self.components))
    }

    /// `D_ijk + D_ikj`, which must vanish.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.at(i, j, k) + self.at(i, k, j)).abs());
                }
            }
        }
        worst
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Pointwise data in the orthonormal frame.
struct FrameData {
    n: usize,
    ricci: Vec<f64>,
    e: Vec<f64>,
    grad: Vec<f64>,
    cotton: Vec<f64>,
    scalar: f64,
    f: f64,
}

impl FrameData {
    fn new(b: &CurvatureBundle, j: &CovariantJets) -> Self {
        let n = b.dim;
        let fr = &b.frame;
        Self {
            n,
            ricci: frame_components(2, n, fr, |i| b.ricci[i[0]][i[1]]),
            e: frame_components(2, n, fr, |i| b.einstein_traceless[i[0]][i[1]]),
            grad: frame_components(1, n, fr, |i| j.grad[i[0]]),
            cotton: frame_components(3, n, fr, |i| b.cotton[i[0]][i[1]][i[2]]),
            scalar: b.scalar,
            f: j.value,
        }
    }

    fn m(&self, v: &[f64], i: usize, j: usize) -> f64 {
        v[i * self.n + j]
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// `D` at a point from curvature and the gradient of `f` (coordinate
/// components). For `n = 3` the trace-free form is evaluated too.
pub fn d_tensor(bundle: &CurvatureBundle, grad: &[f64]) -> Result<DTensor, VerifierError> {
    let n = bundle.dim;
    if n < 3 {
        return Err(VerifierError::DimensionTooLow(n));
    }
    let fr = &bundle.frame;
    let ric = frame_components(2, n, fr, |i| bundle.ricci[i[0]][i[1]]);
    let e = frame_components(2, n, fr, |i| bundle.einstein_traceless[i[0]][i[1]]);
    let df = frame_components(1, n, fr, |i| grad[i[0]]);
    Ok(d_from_frame(n, &ric, &e, &df, bundle.scalar))
}

fn d_from_frame(n: usize, ric: &[f64], e: &[f64], df: &[f64], scalar: f64) -> DTensor {
    let at = |m: &[f64], i: usize, j: usize| m[i * n + j];
    let contract = |m: &[f64], j: usize| (0..n).map(|l| at(m, l, j) * df[l]).sum::<f64>();
    let nf = n as f64;
    let mut general = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = (nf - 1.0) * (at(ric, i, k) * df[j] - at(ric, i, j) * df[k])
                    + scalar * (df[k] * delta(i, j) - df[j] * delta(i, k))
                    + contract(ric, j) * delta(i, k)
                    - contract(ric, k) * delta(i, j);
                general[(i * n + j) * n + k] = v / (nf - 2.0);
            }
        }
    }
    let e_form = (n == 3).then(|| {
        let mut out = vec![0.0; 27];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out[(i * 3 + j) * 3 + k] = 2.0 * (at(e, i, k) * df[j] - at(e, i, j) * df[k])
                        + contract(e, j) * delta(i, k)
                        - contract(e, k) * delta(i, j);
                }
            }
        }
        out
    });
    DTensor {
        n,
        components: general,
        e_form,
    }
}

/// Extremes of `R²/2 − Σ R_ij²` over the samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmbrozioGate {
    pub margin_min: f64,
    pub margin_max: f64,
    /// Index of the sample attaining `margin_min`.
    pub argmin: usize,
    pub samples: usize,
}

impl AmbrozioGate {
    /// The pointwise hypothesis holds at every sample (within `tol`).
    pub fn satisfied(&self, tol: f64) -> bool {
        self.margin_min >= -tol
    }

    /// The margin is zero at every sample (within `tol`).
    pub fn equality(&self, tol: f64) -> bool {
        self.margin_min.abs() <= tol && self.margin_max.abs() <= tol
    }
}

/// Everything the verifier decides about one space.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct VerifierReport {
    pub space: String,
    pub dim: usize,
    pub samples: usize,
    pub tol: f64,
    /// Predicates, each `passed` iff its residual is within `tol`.
    pub checks: Vec<IdentityCheck>,
    pub ambrozio: Option<AmbrozioGate>,
}

impl VerifierReport {
    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn holds(&self, name: &str) -> bool {
        self.check(name).is_some_and(|c| c.passed && c.skipped.is_none())
    }
}

/// Curvature and jets of `f` at every point.
pub struct Evaluations {
    pub points: Vec<Vec<f64>>,
    pub data: Vec<(CurvatureBundle, CovariantJets)>,
}

pub fn evaluate(chart: &Chart, f: &ScalarField, points: &[Vec<f64>]) -> Result<Evaluations, VerifierError> {
    if points.is_empty() {
        return Err(VerifierError::NoSamples);
    }
    let data = points
        .iter()
        .map(|x| curvature_and_jets(chart, f, x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Evaluations {
        points: points.to_vec(),
        data,
    })
}

/// Residual of `f_{,ij} = f(R_ij − R/(n−1) g_ij)` at one point.
pub fn static_residual_at(b: &CurvatureBundle, j: &CovariantJets) -> f64 {
    let c = b.scalar / (b.dim as f64 - 1.0);
    b.norm(2, |ix| {
        let (p, q) = (ix[0], ix[1]);
        j.hess[p][q] - j.value * (b.ricci[p][q] - c * b.metric[p][q])
    })
}

/// The static equation, its trace `Δf = −R/(n−1) f` and `|∇R| = 0`.
pub fn verify_static(ev: &Evaluations, tol: f64) -> Result<Vec<IdentityCheck>, VerifierError> {
    if ev.data.iter().all(|(_, j)| j.grad_sq.sqrt() < CONSTANT_GRAD) {
        return Err(VerifierError::ConstantPotential);
    }
    let mut eq = ResidualTracker::new("static_equation", "f_ij=f(R_ij-R/(n-1) g_ij)", tol);
    let mut trace = ResidualTracker::new("static_laplacian", "Δf=-R/(n-1) f", tol);
    let mut scalar = ResidualTracker::new(
        "scalar_curvature_constant",
        "Lemma 2.2 scalar curvature is constant",
        tol,
    );
    for (s, (b, j)) in ev.data.iter().enumerate() {
        eq.record(s, static_residual_at(b, j));
        trace.record(s, (j.laplacian + b.scalar / (b.dim as f64 - 1.0) * j.value).abs());
        scalar.record(s, b.norm(1, |i| b.scalar_d[i[0]]));
    }
    Ok(vec![eq.finish(), trace.finish(), scalar.finish()])
}

/// Cotton-flatness and D-flatness (any `n ≥ 3`).
pub fn flatness_checks(ev: &Evaluations, tol: f64) -> Result<Vec<IdentityCheck>, VerifierError> {
    let mut cotton = ResidualTracker::new("cotton_flat", "C_ijk=R_ij,k-R_ik,j vanishes", tol);
    let mut dflat = ResidualTracker::new("d_flat", "D_ijk vanishes (D-flat)", tol);
    let mut anti = ResidualTracker::new("d_antisymmetry", "D_ijk=-D_ikj", tol);
    for (s, (b, j)) in ev.data.iter().enumerate() {
        let fd = FrameData::new(b, j);
        cotton.record(s, norm(&fd.cotton));
        let d = d_tensor(b, &j.grad)?;
        dflat.record(s, d.norm());
        anti.record(s, d.antisymmetry_residual());
    }
    Ok(vec![cotton.finish(), dflat.finish(), anti.finish()])
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The three-dimensional relations: both D formulas agree, `fC = D`,
/// `Σ D² = 8S|∇f|² − 12E²(∇f,∇f)`, and `|F3| ≤ S^(3/2)/√6`.
pub fn check_3d_relations(ev: &Evaluations, tol: f64) -> Result<Vec<IdentityCheck>, VerifierError> {
    let n = ev.data[0].0.dim;
    if n != 3 {
        return Err(VerifierError::NotThreeDimensional(n));
    }
    let mut forms = ResidualTracker::new("d_forms_agree", "§3 rewrite of D_ijk in terms of E_ij", tol);
    let mut fc = ResidualTracker::new("fc_equals_d", "Eq 3.2 fC_ijk=D_ijk", tol);
    let mut dnorm = ResidualTracker::new("d_norm_identity", "Eq 3.4 sum D_ijk^2=8S|∇f|^2-12E^2(∇f,∇f)", tol);
    let mut f3 = ResidualTracker::new("f3_bound", "§4 |F3| <= S^(3/2)/sqrt(6)", tol);
    let mut not_static = Vec::new();
    for (s, (b, j)) in ev.data.iter().enumerate() {
        if static_residual_at(b, j) > tol {
            not_static.push(s);
        }
        let fd = FrameData::new(b, j);
        let d = d_from_frame(3, &fd.ricci, &fd.e, &fd.grad, fd.scalar);
        forms.record(s, d.form_gap());
        let fcd: Vec<f64> = fd.cotton.iter().map(|c| fd.f * c).collect();
        fc.record(s, max_abs_diff(&fcd, &d.components));
        let grad_sq: f64 = fd.grad.iter().map(|g| g * g).sum();
        let mut e2 = 0.0;
        for i in 0..3 {
            for jj in 0..3 {
                for k in 0..3 {
                    e2 += fd.m(&fd.e, i, k) * fd.m(&fd.e, k, jj) * fd.grad[i] * fd.grad[jj];
                }
            }
        }
        let d_sq: f64 = d.components.iter().map(|v| v * v).sum();
        dnorm.record(s, (d_sq - (8.0 * b.inv_s * grad_sq - 12.0 * e2)).abs());
        let bound = b.inv_s.max(0.0).powf(1.5) / 6f64.sqrt() - b.inv_f3.abs();
        f3.record(s, (-bound).max(0.0));
    }
    let mut fc = fc.finish();
    if !not_static.is_empty() {
        fc.passed = false;
        fc.skipped = Some(format!("potential not static at {} sample(s)", not_static.len()));
    }
    Ok(vec![forms.finish(), fc, dnorm.finish(), f3.finish()])
}

/// Extremes of `R²/2 − Σ R_ij²` (three-dimensional charts only).
pub fn ambrozio_gate(chart: &Chart, points: &[Vec<f64>]) -> Result<AmbrozioGate, VerifierError> {
    if chart.dim != 3 {
        return Err(VerifierError::NotThreeDimensional(chart.dim));
    }
    let margins = points
        .iter()
        .map(|x| {
            let b = crate::chart::curvature(chart, x)?;
            Ok(0.5 * b.scalar * b.scalar - b.ricci_norm_sq())
        })
        .collect::<Result<Vec<f64>, ChartError>>()?;
    gate_from_margins(&margins)
}

fn gate_from_margins(margins: &[f64]) -> Result<AmbrozioGate, VerifierError> {
    if margins.is_empty() {
        return Err(VerifierError::NoSamples);
    }
    let (argmin, &margin_min) = margins
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let margin_max = margins.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(AmbrozioGate {
        margin_min,
        margin_max,
        argmin,
        samples: margins.len(),
    })
}

/// Runs every applicable predicate on `count` Halton samples of a catalog
/// space.
pub fn verify_space(spec: &SpaceSpec, count: usize, seed: u64, tol: f64) -> Result<VerifierReport, VerifierError> {
    let points = chart_samples(&spec.chart, count, seed);
    verify_chart(spec.name, &spec.chart, &spec.potential, &points, tol)
}

pub fn verify_chart(
    name: &str,
    chart: &Chart,
    f: &ScalarField,
    points: &[Vec<f64>],
    tol: f64,
) -> Result<VerifierReport, VerifierError> {
    let ev = evaluate(chart, f, points)?;
    let mut checks = verify_static(&ev, tol)?;
    checks.extend(flatness_checks(&ev, tol)?);
    let ambrozio = if chart.dim == 3 {
        checks.extend(check_3d_relations(&ev, tol)?);
        let margins: Vec<f64> = ev
            .data
            .iter()
            .map(|(b, _)| 0.5 * b.scalar * b.scalar - b.ricci_norm_sq())
            .collect();
        Some(gate_from_margins(&margins)?)
    } else {
        None
    };
    Ok(VerifierReport {
        space: name.to_string(),
        dim: chart.dim,
        samples: points.len(),
        tol,
        checks,
        ambrozio,
    })
}
