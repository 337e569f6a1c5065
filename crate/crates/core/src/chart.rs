//! Coordinate-chart differential geometry.
//!
//! A [`Chart`] supplies its metric as a function of jet-valued coordinates,
//! so evaluating it at seeded coordinates yields `g`, `∂g`, `∂²g` and `∂³g`
//! exactly. From these the engine builds Christoffel symbols, the Riemann,
//! Ricci, Weyl and Cotton tensors, first covariant derivatives of curvature,
//! and covariant derivatives of scalar fields up to third order.
//!
//! Sign convention: `R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce}Γ^e_{db}
//! − Γ^a_{de}Γ^e_{cb}`, `R_{abcd} = g_{ae} R^e_{bcd}` and `R_{bd} = g^{ac}
//! R_{abcd}`, which gives the unit sphere `R_{ij} = (n−1) g_{ij}`. With it
//! the Ricci identity reads `f_{,ijk} − f_{,ikj} = f^{,l} R_{lijk}`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::jet::{invert, Cube, Jet, Matrix, Vector, MAX_DIM};
use crate::tensor::{self, orthonormal_frame, spd_inverse};

pub type Tensor4 = [[[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];
pub type Tensor5 = [[[[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// Metric coefficients as a function of jet coordinates. Only the leading
/// `dim×dim` block of the returned matrix is read.
pub type MetricFn = Arc<dyn Fn(&[Jet]) -> [[Jet; MAX_DIM]; MAX_DIM] + Send + Sync>;

/// A scalar field on a chart, evaluated on jet coordinates.
pub type ScalarField = Arc<dyn Fn(&[Jet]) -> Jet + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("metric is not positive definite at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("point {point:?} lies outside the chart domain or within {margin} of a singular locus")]
    OutOfDomain { point: Vec<f64>, margin: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A coordinate interval of the chart box.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    /// Periodic coordinates accept any value.
    pub periodic: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: false,
        }
    }

    pub fn periodic(lo: f64, hi: f64) -> Self {
        Self { lo, hi, periodic: true }
    }
}

/// The coordinate hyperplane `x[axis] = value`, where the chart degenerates.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SingularLocus {
    pub axis: usize,
    pub value: f64,
}

/// How metric derivatives are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum DerivativeSource {
    /// Exact jets from the metric function.
    #[default]
    Analytic,
    /// Central finite differences of metric values with the given step.
    FiniteDifference { step: f64 },
}

#[derive(Clone)]
pub struct Chart {
    pub name: String,
    pub dim: usize,
    pub domain: Vec<Interval>,
    pub singular_loci: Vec<SingularLocus>,
    /// Minimum distance kept from singular loci.
    pub margin: f64,
    pub metric: MetricFn,
    pub derivatives: DerivativeSource,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("singular_loci", &self.singular_loci)
            .field("margin", &self.margin)
            .field("derivatives", &self.derivatives)
            .finish()
    }
}

pub const DEFAULT_MARGIN: f64 = 5e-2;

impl Chart {
    pub fn new(
        name: impl Into<String>,
        domain: Vec<Interval>,
        singular_loci: Vec<SingularLocus>,
        metric: MetricFn,
    ) -> Self {
        let dim = domain.len();
        assert!((1..=MAX_DIM).contains(&dim), "unsupported chart dimension {dim}");
        Self {
            name: name.into(),
            dim,
            domain,
            singular_loci,
            margin: DEFAULT_MARGIN,
            metric,
            derivatives: DerivativeSource::Analytic,
        }
    }

    pub fn with_derivatives(mut self, source: DerivativeSource) -> Self {
        self.derivatives = source;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    /// Checks that `x` is inside the box and clear of singular loci.
    pub fn check_point(&self, x: &[f64]) -> Result<(), ChartError> {
        if x.len() != self.dim {
            return Err(ChartError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let out = || ChartError::OutOfDomain {
            point: x.to_vec(),
            margin: self.margin,
        };
        for (v, iv) in x.iter().zip(&self.domain) {
            if !v.is_finite() || (!iv.periodic && (*v < iv.lo || *v > iv.hi)) {
                return Err(out());
            }
        }
        for locus in &self.singular_loci {
            let iv = &self.domain[locus.axis];
            let mut d = (x[locus.axis] - locus.value).abs();
            if iv.periodic {
                let p = iv.hi - iv.lo;
                d = d.rem_euclid(p);
                d = d.min(p - d);
            }
            if d < self.margin {
                return Err(out());
            }
        }
        Ok(())
    }

    /// Metric values (no derivatives).
    pub fn metric_values(&self, x: &[f64]) -> Matrix {
        let consts: Vec<Jet> = x.iter().map(|&v| Jet::constant(v, self.dim)).collect();
        let m = (self.metric)(&consts);
        let mut g = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..self.dim {
            for j in 0..self.dim {
                g[i][j] = m[i][j].value();
            }
        }
        g
    }

    /// Metric jets to order three at `x`, from the configured source.
    pub fn metric_jets(&self, x: &[f64]) -> [[Jet; MAX_DIM]; MAX_DIM] {
        match self.derivatives {
            DerivativeSource::Analytic => (self.metric)(&Jet::seeds(x)),
            DerivativeSource::FiniteDifference { step } => self.metric_jets_fd(x, step),
        }
    }

    fn metric_jets_fd(&self, x: &[f64], h: f64) -> [[Jet; MAX_DIM]; MAX_DIM] {
        let n = self.dim;
        let at = |shift: &[(usize, f64)]| {
            let mut p = x.to_vec();
            for &(axis, d) in shift {
                p[axis] += d;
            }
            self.metric_values(&p)
        };
        // second derivatives at a shifted point
        let second = |base: &[(usize, f64)], i: usize, j: usize| -> Matrix {
            let with = |extra: &[(usize, f64)]| {
                let mut s = base.to_vec();
                s.extend_from_slice(extra);
                at(&s)
            };
            let mut out = [[0.0; MAX_DIM]; MAX_DIM];
            if i == j {
                let (p, c, m) = (with(&[(i, h)]), with(&[]), with(&[(i, -h)]));
                for a in 0..n {
                    for b in 0..n {
                        out[a][b] = (p[a][b] - 2.0 * c[a][b] + m[a][b]) / (h * h);
                    }
                }
            } else {
                let pp = with(&[(i, h), (j, h)]);
                let pm = with(&[(i, h), (j, -h)]);
                let mp = with(&[(i, -h), (j, h)]);
                let mm = with(&[(i, -h), (j, -h)]);
                for a in 0..n {
                    for b in 0..n {
                        out[a][b] = (pp[a][b] - pm[a][b] - mp[a][b] + mm[a][b]) / (4.0 * h * h);
                    }
                }
            }
            out
        };
        let g0 = at(&[]);
        let mut d1 = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
        let mut d2 = [[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];
        let mut d3 = [[[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            let (p, m) = (at(&[(i, h)]), at(&[(i, -h)]));
            for a in 0..n {
                for b in 0..n {
                    d1[i][a][b] = (p[a][b] - m[a][b]) / (2.0 * h);
                }
            }
            for j in 0..n {
                let s = second(&[], i, j);
                for a in 0..n {
                    for b in 0..n {
                        d2[i][j][a][b] = s[a][b];
                    }
                }
                for k in 0..n {
                    let sp = second(&[(k, h)], i, j);
                    let sm = second(&[(k, -h)], i, j);
                    for a in 0..n {
                        for b in 0..n {
                            d3[i][j][k][a][b] = (sp[a][b] - sm[a][b]) / (2.0 * h);
                        }
                    }
                }
            }
        }
        let zero = Jet::constant(0.0, n);
        let mut out = [[zero; MAX_DIM]; MAX_DIM];
        for a in 0..n {
            for b in 0..n {
                let mut v1 = [0.0; MAX_DIM];
                let mut v2 = [[0.0; MAX_DIM]; MAX_DIM];
                let mut v3 = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
                for i in 0..n {
                    v1[i] = d1[i][a][b];
                    for j in 0..n {
                        v2[i][j] = d2[i][j][a][b];
                        for k in 0..n {
                            v3[i][j][k] = d3[i][j][k][a][b];
                        }
                    }
                }
                out[a][b] = Jet::from_parts(g0[a][b], v1, v2, v3, n);
            }
        }
        out
    }
}

/// Connection data shared by the curvature and covariant-derivative paths.
pub(crate) struct Connection {
    pub n: usize,
    pub g: [[Jet; MAX_DIM]; MAX_DIM],
    pub ginv: [[Jet; MAX_DIM]; MAX_DIM],
    /// `gamma[k][i][j] = Γ^k_{ij}` as order-2 jets.
    pub gamma: Vec<Jet>,
}

impl Connection {
    pub fn build(chart: &Chart, x: &[f64]) -> Result<Self, ChartError> {
        chart.check_point(x)?;
        let n = chart.dim;
        let g = chart.metric_jets(x);
        let mut gv = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            for j in 0..n {
                gv[i][j] = g[i][j].value();
            }
        }
        if tensor::cholesky(&gv, n).is_none() {
            return Err(ChartError::SingularMetric { point: x.to_vec() });
        }
        let mut g2 = g;
        for row in g2.iter_mut().take(n) {
            for v in row.iter_mut().take(n) {
                *v = v.truncate(2);
            }
        }
        let ginv = invert(&g2, n).ok_or_else(|| ChartError::SingularMetric { point: x.to_vec() })?;
        // dg[l][i][j] = ∂_l g_ij, order 2
        let zero = Jet::constant(0.0, n).truncate(2);
        let mut dg = vec![zero; n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in i..n {
                    let d = g[i][j].partial(l);
                    dg[(l * n + i) * n + j] = d;
                    dg[(l * n + j) * n + i] = d;
                }
            }
        }
        let dgi = |l: usize, i: usize, j: usize| dg[(l * n + i) * n + j];
        let mut gamma = vec![zero; n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = zero;
                    for l in 0..n {
                        acc += ginv[k][l] * (dgi(i, j, l) + dgi(j, i, l) - dgi(l, i, j));
                    }
                    let v = acc.scale(0.5);
                    gamma[(k * n + i) * n + j] = v;
                    gamma[(k * n + j) * n + i] = v;
                }
            }
        }
        Ok(Self { n, g, ginv, gamma })
    }

    #[inline]
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Jet {
        &self.gamma[(k * self.n + i) * self.n + j]
    }

    pub fn metric_value(&self) -> Matrix {
        let mut gv = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..self.n {
            for j in 0..self.n {
                gv[i][j] = self.g[i][j].value();
            }
        }
        gv
    }

    pub fn gamma_values(&self) -> Cube {
        let n = self.n;
        let mut out = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[k][i][j] = self.gamma(k, i, j).value();
                }
            }
        }
        out
    }
}

/// Christoffel symbols `Γ^k_{ij}` (`[k][i][j]`) and their partials
/// `∂_l Γ^k_{ij}` (`[l][k][i][j]`).
pub fn christoffel(chart: &Chart, x: &[f64]) -> Result<(Cube, Tensor4), ChartError> {
    let conn = Connection::build(chart, x)?;
    let n = conn.n;
    let mut dgamma = [[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for (l, dl) in dgamma.iter_mut().enumerate().take(n) {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dl[k][i][j] = conn.gamma(k, i, j).grad()[l];
                }
            }
        }
    }
    Ok((conn.gamma_values(), dgamma))
}

/// All pointwise curvature data at one point, in coordinate components.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    pub dim: usize,
    pub point: Vec<f64>,
    pub metric: Matrix,
    pub metric_inv: Matrix,
    /// `gamma[k][i][j] = Γ^k_{ij}`.
    pub gamma: Cube,
    /// `dgamma[l][k][i][j] = ∂_l Γ^k_{ij}`.
    pub dgamma: Box<Tensor4>,
    /// `R_{ijkl}`, all indices lowered.
    pub riemann: Box<Tensor4>,
    /// `R_{ijkl,m}`.
    pub riemann_d: Box<Tensor5>,
    pub ricci: Matrix,
    pub scalar: f64,
    /// `R_{,j}`.
    pub scalar_d: Vector,
    /// `R_{ij,k}` stored as `[i][j][k]`.
    pub ricci_d: Cube,
    /// Zero for `n < 3`.
    pub weyl: Box<Tensor4>,
    /// `E_{ij} = R_{ij} − (R/n) g_{ij}`.
    pub einstein_traceless: Matrix,
    /// `E_{ij,k}`.
    pub einstein_traceless_d: Cube,
    /// `S = E_{ij}E^{ij}`.
    pub inv_s: f64,
    /// `F₃ = E_i^j E_j^k E_k^i`.
    pub inv_f3: f64,
    /// `C_{ijk} = R_{ij,k} − R_{ik,j}`.
    pub cotton: Cube,
    /// Orthonormal coframe used for norms.
    pub frame: Matrix,
}

/// Computes the full [`CurvatureBundle`] at `x`.
pub fn curvature(chart: &Chart, x: &[f64]) -> Result<CurvatureBundle, ChartError> {
    let conn = Connection::build(chart, x)?;
    curvature_with(&conn, x)
}

pub(crate) fn curvature_with(conn: &Connection, x: &[f64]) -> Result<CurvatureBundle, ChartError> {
    let n = conn.n;
    let idx4 = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    let zero1 = Jet::constant(0.0, n).truncate(1);

    // R^a_{bcd}
    let mut r_up = vec![zero1; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in c + 1..n {
                    let mut v = conn.gamma(a, d, b).partial(c) - conn.gamma(a, c, b).partial(d);
                    for e in 0..n {
                        v += *conn.gamma(a, c, e) * *conn.gamma(e, d, b) - *conn.gamma(a, d, e) * *conn.gamma(e, c, b);
                    }
                    let v = v.truncate(1);
                    r_up[idx4(a, b, c, d)] = v;
                    r_up[idx4(a, b, d, c)] = -v;
                }
            }
        }
    }
    // R_{abcd} = g_ae R^e_bcd
    let mut r_low = vec![zero1; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in c + 1..n {
                    let mut v = zero1;
                    for e in 0..n {
                        v += conn.g[a][e] * r_up[idx4(e, b, c, d)];
                    }
                    r_low[idx4(a, b, c, d)] = v;
                    r_low[idx4(a, b, d, c)] = -v;
                }
            }
        }
    }
    // R_{bd} = R^a_{bad}
    let mut ricci_j = [[zero1; MAX_DIM]; MAX_DIM];
    for b in 0..n {
        for d in 0..n {
            let mut v = zero1;
            for a in 0..n {
                v += r_up[idx4(a, b, a, d)];
            }
            ricci_j[b][d] = v;
        }
    }
    let mut scalar_j = zero1;
    for b in 0..n {
        for d in 0..n {
            scalar_j += conn.ginv[b][d] * ricci_j[b][d];
        }
    }

    let g = conn.metric_value();
    let ginv = spd_inverse(&g, n).ok_or_else(|| ChartError::SingularMetric { point: x.to_vec() })?;
    let frame = orthonormal_frame(&g, n).ok_or_else(|| ChartError::SingularMetric { point: x.to_vec() })?;
    let gamma = conn.gamma_values();

    let mut dgamma = Box::new([[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM]);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dgamma[l][k][i][j] = conn.gamma(k, i, j).grad()[l];
                }
            }
        }
    }

    let mut riemann = Box::new([[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM]);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    riemann[a][b][c][d] = r_low[idx4(a, b, c, d)].value();
                }
            }
        }
    }
    let mut ricci = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            ricci[i][j] = ricci_j[i][j].value();
        }
    }
    let scalar = scalar_j.value();
    let mut scalar_d = [0.0; MAX_DIM];
    scalar_d[..n].copy_from_slice(&scalar_j.grad()[..n]);

    // ∇Ric
    let mut ricci_d = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = ricci_j[i][j].grad()[k];
                for m in 0..n {
                    v -= gamma[m][k][i] * ricci[m][j] + gamma[m][k][j] * ricci[i][m];
                }
                ricci_d[i][j][k] = v;
            }
        }
    }
    // ∇Riem
    let mut riemann_d = Box::new([[[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM]);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let r = &r_low[idx4(a, b, c, d)];
                    for m in 0..n {
                        let mut v = r.grad()[m];
                        for e in 0..n {
                            v -= gamma[e][m][a] * riemann[e][b][c][d]
                                + gamma[e][m][b] * riemann[a][e][c][d]
                                + gamma[e][m][c] * riemann[a][b][e][d]
                                + gamma[e][m][d] * riemann[a][b][c][e];
                        }
                        riemann_d[a][b][c][d][m] = v;
                    }
                }
            }
        }
    }

    let nf = n as f64;
    let mut einstein_traceless = [[0.0; MAX_DIM]; MAX_DIM];
    let mut einstein_traceless_d = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            einstein_traceless[i][j] = ricci[i][j] - scalar / nf * g[i][j];
            for k in 0..n {
                einstein_traceless_d[i][j][k] = ricci_d[i][j][k] - scalar_d[k] / nf * g[i][j];
            }
        }
    }
    let mixed = tensor::raise_first(&ginv, &einstein_traceless, n);
    let mixed2 = tensor::mat_mul(&mixed, &mixed, n);
    let inv_s = tensor::trace(&mixed2, n);
    let inv_f3 = tensor::trace(&tensor::mat_mul(&mixed2, &mixed, n), n);

    let mut weyl = Box::new([[[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM]; MAX_DIM]);
    if n >= 3 {
        let mut schouten_like = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            for j in 0..n {
                schouten_like[i][j] = ricci[i][j] - scalar / (2.0 * (nf - 1.0)) * g[i][j];
            }
        }
        let a = &schouten_like;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        weyl[i][j][k][l] = riemann[i][j][k][l]
                            - (a[i][k] * g[j][l] + a[j][l] * g[i][k] - a[i][l] * g[j][k] - a[j][k] * g[i][l])
                                / (nf - 2.0);
                    }
                }
            }
        }
    }

    let mut cotton = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                cotton[i][j][k] = ricci_d[i][j][k] - ricci_d[i][k][j];
            }
        }
    }

    Ok(CurvatureBundle {
        dim: n,
        point: x.to_vec(),
        metric: g,
        metric_inv: ginv,
        gamma,
        dgamma,
        riemann,
        riemann_d,
        ricci,
        scalar,
        scalar_d,
        ricci_d,
        weyl,
        einstein_traceless,
        einstein_traceless_d,
        inv_s,
        inv_f3,
        cotton,
        frame,
    })
}

impl CurvatureBundle {
    /// g-contracted norm of a covariant tensor at this point.
    pub fn norm(&self, rank: usize, component: impl Fn(&[usize]) -> f64) -> f64 {
        tensor::g_norm(rank, self.dim, &self.frame, component)
    }

    /// `Σ R_{ij}R^{ij}`.
    pub fn ricci_norm_sq(&self) -> f64 {
        let r = &self.ricci;
        self.norm(2, |i| r[i[0]][i[1]]).powi(2)
    }

    /// `Σ E_{ij,k}E^{ij,k}`.
    pub fn grad_e_norm_sq(&self) -> f64 {
        let e = &self.einstein_traceless_d;
        self.norm(3, |i| e[i[0]][i[1]][i[2]]).powi(2)
    }

    /// `Σ C_{ijk}C^{ijk}`.
    pub fn cotton_norm_sq(&self) -> f64 {
        let c = &self.cotton;
        self.norm(3, |i| c[i[0]][i[1]][i[2]]).powi(2)
    }

    /// `E^{ik} E_k^{j,m} E_{ij,m}`, the cubic contraction of E with ∇E.
    pub fn cubic_e_grad_e(&self) -> f64 {
        let n = self.dim;
        let fr = &self.frame;
        let e = tensor::frame_components(2, n, fr, |i| self.einstein_traceless[i[0]][i[1]]);
        let de = tensor::frame_components(3, n, fr, |i| self.einstein_traceless_d[i[0]][i[1]][i[2]]);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        acc += e[i * n + k] * de[(k * n + j) * n + m] * de[(i * n + j) * n + m];
                    }
                }
            }
        }
        acc
    }

    /// Ricci tensor in the orthonormal frame.
    pub fn ricci_frame(&self) -> Matrix {
        let n = self.dim;
        let v = tensor::frame_components(2, n, &self.frame, |i| self.ricci[i[0]][i[1]]);
        let mut out = [[0.0; MAX_DIM]; MAX_DIM];
        for a in 0..n {
            for b in 0..n {
                out[a][b] = v[a * n + b];
            }
        }
        out
    }
}

/// Covariant derivatives of a scalar field at a point.
#[derive(Clone, Debug)]
pub struct CovariantJets {
    pub value: f64,
    /// `f_{,i}`.
    pub grad: Vector,
    /// `f_{,ij}`.
    pub hess: Matrix,
    /// `f_{,ijk}` with `k` the last differentiation.
    pub third: Cube,
    pub laplacian: f64,
    pub grad_sq: f64,
}

pub fn covariant_jets(chart: &Chart, f: &ScalarField, x: &[f64]) -> Result<CovariantJets, ChartError> {
    let conn = Connection::build(chart, x)?;
    Ok(covariant_jets_with(&conn, f, x))
}

pub(crate) fn covariant_jets_with(conn: &Connection, f: &ScalarField, x: &[f64]) -> CovariantJets {
    let n = conn.n;
    let fj = f(&Jet::seeds(x));
    let df: Vec<Jet> = (0..n).map(|i| fj.partial(i)).collect();
    let zero1 = Jet::constant(0.0, n).truncate(1);
    // f_{,ij} as order-1 jets
    let mut hj = [[zero1; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in i..n {
            let mut v = df[i].partial(j);
            for k in 0..n {
                v -= *conn.gamma(k, i, j) * df[k];
            }
            hj[i][j] = v;
            hj[j][i] = v;
        }
    }
    let gamma = conn.gamma_values();
    let mut grad = [0.0; MAX_DIM];
    let mut hess = [[0.0; MAX_DIM]; MAX_DIM];
    let mut third = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        grad[i] = df[i].value();
        for j in 0..n {
            hess[i][j] = hj[i][j].value();
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = hj[i][j].grad()[k];
                for m in 0..n {
                    v -= gamma[m][k][i] * hess[m][j] + gamma[m][k][j] * hess[i][m];
                }
                third[i][j][k] = v;
            }
        }
    }
    let g = conn.metric_value();
    let ginv = spd_inverse(&g, n).expect("metric checked positive definite");
    let mut laplacian = 0.0;
    let mut grad_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            laplacian += ginv[i][j] * hess[i][j];
            grad_sq += ginv[i][j] * grad[i] * grad[j];
        }
    }
    CovariantJets {
        value: fj.value(),
        grad,
        hess,
        third,
        laplacian,
        grad_sq,
    }
}

/// Curvature and covariant jets of `f` sharing one connection build.
pub fn curvature_and_jets(
    chart: &Chart,
    f: &ScalarField,
    x: &[f64],
) -> Result<(CurvatureBundle, CovariantJets), ChartError> {
    let conn = Connection::build(chart, x)?;
    let bundle = curvature_with(&conn, x)?;
    Ok((bundle, covariant_jets_with(&conn, f, x)))
}

/// Builds a metric function from a closure over the leading block; the
/// returned matrix is symmetrised from its upper triangle.
///
/// Jets passed in may carry more variables than `dim` (as when the chart is
/// a factor of a product), so constants should take their size from `x`.
pub fn metric_fn<F>(dim: usize, f: F) -> MetricFn
where
    F: Fn(&[Jet], &mut [[Jet; MAX_DIM]; MAX_DIM]) + Send + Sync + 'static,
{
    Arc::new(move |x: &[Jet]| {
        let zero = Jet::constant(0.0, x[0].dim());
        let mut m = [[zero; MAX_DIM]; MAX_DIM];
        f(x, &mut m);
        for i in 0..dim {
            for j in 0..i {
                m[i][j] = m[j][i];
            }
        }
        m
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn euclidean3() -> Chart {
        Chart::new(
            "r3",
            vec![Interval::new(-2.0, 2.0); 3],
            vec![],
            metric_fn(3, |x, m| {
                let one = Jet::constant(1.0, x.len());
                for i in 0..3 {
                    m[i][i] = one;
                }
            }),
        )
    }

    fn round_s2() -> Chart {
        Chart::new(
            "s2",
            vec![Interval::new(0.0, PI), Interval::periodic(0.0, 2.0 * PI)],
            vec![
                SingularLocus { axis: 0, value: 0.0 },
                SingularLocus { axis: 0, value: PI },
            ],
            metric_fn(2, |x, m| {
                m[0][0] = Jet::constant(1.0, 2);
                m[1][1] = x[0].sin().square();
            }),
        )
    }

    fn polar_plane() -> Chart {
        Chart::new(
            "polar",
            vec![Interval::new(0.0, 10.0), Interval::periodic(0.0, 2.0 * PI)],
            vec![SingularLocus { axis: 0, value: 0.0 }],
            metric_fn(2, |x, m| {
                m[0][0] = Jet::constant(1.0, 2);
                m[1][1] = x[0].square();
            }),
        )
    }

    /// Γ by central differences of metric values.
    fn fd_gamma(chart: &Chart, x: &[f64]) -> Cube {
        let n = chart.dim;
        let h = 1e-5;
        let g = chart.metric_values(x);
        let ginv = spd_inverse(&g, n).unwrap();
        let mut dg = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
        for l in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[l] += h;
            xm[l] -= h;
            let (gp, gm) = (chart.metric_values(&xp), chart.metric_values(&xm));
            for i in 0..n {
                for j in 0..n {
                    dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
                }
            }
        }
        let mut out = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[k][i][j] = 0.5
                        * (0..n)
                            .map(|l| ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                            .sum::<f64>();
                }
            }
        }
        out
    }

    #[test]
    fn euclidean_christoffel_vanishes() {
        let (gamma, dgamma) = christoffel(&euclidean3(), &[0.3, -1.2, 0.7]).unwrap();
        assert!(gamma.iter().flatten().flatten().all(|v| *v == 0.0));
        assert!(dgamma.iter().flatten().flatten().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn sphere_equator_christoffel() {
        let chart = round_s2();
        let x = [PI / 2.0, 0.0];
        let (gamma, _) = christoffel(&chart, &x).unwrap();
        // Γ^θ_φφ = −sinθcosθ, Γ^φ_θφ = cotθ, both 0 on the equator
        assert!(gamma[0][1][1].abs() < 1e-15);
        assert!(gamma[1][0][1].abs() < 1e-15);
        let fd = fd_gamma(&chart, &x);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!((fd[k][i][j] - gamma[k][i][j]).abs() < 1e-8);
                }
            }
        }
        // and off the equator
        let x = [0.9, 1.0];
        let (gamma, _) = christoffel(&chart, &x).unwrap();
        assert!((gamma[0][1][1] + 0.9f64.sin() * 0.9f64.cos()).abs() < 1e-14);
        assert!((gamma[1][0][1] - 1.0 / 0.9f64.tan()).abs() < 1e-14);
    }

    #[test]
    fn polar_christoffel() {
        let chart = polar_plane();
        let x = [2.0, 0.4];
        let (gamma, dgamma) = christoffel(&chart, &x).unwrap();
        let fd = fd_gamma(&chart, &x);
        assert!((gamma[0][1][1] + 2.0).abs() < 1e-14);
        assert!((fd[0][1][1] + 2.0).abs() < 1e-8);
        // ∂_s Γ^s_θθ = −1, ∂_s Γ^θ_sθ = −1/s²
        assert!((dgamma[0][0][1][1] + 1.0).abs() < 1e-14);
        assert!((dgamma[0][1][0][1] + 0.25).abs() < 1e-14);
    }

    #[test]
    fn sphere_sign_convention() {
        let b = curvature(&round_s2(), &[1.1, 0.3]).unwrap();
        assert!((b.scalar - 2.0).abs() < 1e-13);
        assert!((b.ricci[0][0] - 1.0).abs() < 1e-13);
        assert!((b.ricci[1][1] - 1.1f64.sin().powi(2)).abs() < 1e-13);
        assert!(b.ricci[0][1].abs() < 1e-14);
    }

    #[test]
    fn euclidean_curvature_exactly_zero() {
        let b = curvature(&euclidean3(), &[1.0, 0.5, -0.25]).unwrap();
        assert_eq!(b.scalar, 0.0);
        assert!(b.riemann.iter().flatten().flatten().flatten().all(|v| *v == 0.0));
        assert!(b.cotton.iter().flatten().flatten().all(|v| *v == 0.0));
        assert_eq!(b.inv_s, 0.0);
        assert_eq!(b.inv_f3, 0.0);
    }

    #[test]
    fn out_of_domain_and_singular_points_rejected() {
        let chart = round_s2();
        assert!(matches!(
            christoffel(&chart, &[1e-3, 0.0]),
            Err(ChartError::OutOfDomain { .. })
        ));
        assert!(matches!(
            christoffel(&chart, &[4.0, 0.0]),
            Err(ChartError::OutOfDomain { .. })
        ));
        // periodic axis accepts any angle
        assert!(christoffel(&chart, &[1.0, 17.0]).is_ok());
        let bad = Chart::new(
            "bad",
            vec![Interval::new(-1.0, 1.0); 2],
            vec![],
            metric_fn(2, |x, m| {
                m[0][0] = Jet::constant(1.0, 2);
                m[1][1] = x[0];
            }),
        );
        assert!(matches!(
            curvature(&bad, &[-0.5, 0.0]),
            Err(ChartError::SingularMetric { .. })
        ));
    }

    #[test]
    fn polar_laplacian_of_radius_squared() {
        let chart = polar_plane();
        let f: ScalarField = Arc::new(|x: &[Jet]| x[0].square());
        let j = covariant_jets(&chart, &f, &[1.5, 0.2]).unwrap();
        assert!((j.laplacian - 4.0).abs() < 1e-13);
        assert!((j.grad_sq - 9.0).abs() < 1e-13);
        // Hessian of r² in the plane is 2g
        assert!((j.hess[1][1] - 2.0 * 1.5 * 1.5).abs() < 1e-12);
        assert!(j.third.iter().flatten().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn finite_difference_source_approximates_jets() {
        let exact = curvature(&round_s2(), &[1.1, 0.3]).unwrap();
        let fd = curvature(
            &round_s2().with_derivatives(DerivativeSource::FiniteDifference { step: 1e-4 }),
            &[1.1, 0.3],
        )
        .unwrap();
        assert!((exact.scalar - fd.scalar).abs() < 1e-5);
    }
}
