//! Named model spaces with known static potentials and invariants.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::chart::{metric_fn, Chart, ChartError, Interval, ScalarField, SingularLocus};
use crate::jet::{Jet, MAX_DIM};
use crate::ode::{self, OdeParams};
use crate::warped::{profiles, JetSource, RadialField, WarpedSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown space '{0}' (try one of: {known})", known = NAMES.join(", "))]
    UnknownSpace(String),
}

/// How a space relates to the pointwise inequality `Σ R_ij² ≤ R²/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbrozioExpectation {
    Strict,
    Equality,
    Violated,
    /// Not a three-dimensional space with `R ≥ 0`.
    NotApplicable,
}

/// Known facts about a catalog space. `None` means "not constant".
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expected {
    #[serde(rename = "R")]
    pub scalar: Option<f64>,
    #[serde(rename = "S")]
    pub inv_s: Option<f64>,
    #[serde(rename = "F3")]
    pub inv_f3: Option<f64>,
    pub cotton_flat: bool,
    pub d_flat: bool,
    #[serde(rename = "static")]
    pub is_static: bool,
    pub ambrozio: AmbrozioExpectation,
    /// Whether claims that assume `R ≥ 0` apply.
    pub r_nonnegative: bool,
}

/// Coordinate identification of a compact quotient (metadata only).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Periodicity {
    pub axis: usize,
    pub period: f64,
}

#[derive(Clone)]
pub struct SpaceSpec {
    pub name: &'static str,
    pub description: &'static str,
    pub dim: usize,
    pub chart: Chart,
    /// Radial description, when the space is a warped product.
    pub radial: Option<(WarpedSpace, RadialField)>,
    pub potential: ScalarField,
    pub expected: Expected,
    pub source: JetSource,
    pub periodicity: Option<Periodicity>,
}

impl std::fmt::Debug for SpaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpaceSpec")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("expected", &self.expected)
            .finish()
    }
}

impl SpaceSpec {
    /// Default verification tolerance for the way jets are produced.
    pub fn default_tol(&self) -> f64 {
        match self.source {
            JetSource::Analytic => 1e-8,
            JetSource::Ode => 1e-6,
        }
    }

    /// JSON-friendly summary.
    pub fn summary(&self) -> SpaceSummary {
        SpaceSummary {
            name: self.name,
            description: self.description,
            dim: self.dim,
            radial: self.radial.is_some(),
            jets: self.source,
            periodicity: self.periodicity,
            expected: self.expected.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceSummary {
    pub name: &'static str,
    pub description: &'static str,
    pub dim: usize,
    pub radial: bool,
    pub jets: JetSource,
    pub periodicity: Option<Periodicity>,
    pub expected: Expected,
}

pub const NAMES: [&str; 7] = ["s3", "r3", "h3", "s1xs2", "rxs2", "s2xs2", "sds"];

/// Parameters of the catalog's Schwarzschild–de Sitter representative.
pub const SDS_PARAMS: OdeParams = OdeParams {
    n: 3,
    r: 2.0,
    c0: 0.3,
    k: 1.0,
};

pub fn catalog() -> Vec<SpaceSpec> {
    NAMES.iter().map(|n| lookup(n).expect("catalog name")).collect()
}

pub fn lookup(name: &str) -> Result<SpaceSpec, CatalogError> {
    let spec = match name {
        "s3" => radial_spec(
            "s3",
            "unit round sphere S³, f = cos s",
            WarpedSpace::new("s3", 3, 1.0, (0.0, PI), profiles::sin),
            RadialField::new(profiles::cos),
            Expected {
                scalar: Some(6.0),
                inv_s: Some(0.0),
                inv_f3: Some(0.0),
                cotton_flat: true,
                d_flat: true,
                is_static: true,
                ambrozio: AmbrozioExpectation::Strict,
                r_nonnegative: true,
            },
            None,
        ),
        "r3" => SpaceSpec {
            name: "r3",
            description: "Euclidean ℝ³ in Cartesian coordinates, f = x₁",
            dim: 3,
            chart: euclidean_chart("r3", 3),
            radial: None,
            potential: Arc::new(|x: &[Jet]| x[0]),
            expected: Expected {
                scalar: Some(0.0),
                inv_s: Some(0.0),
                inv_f3: Some(0.0),
                cotton_flat: true,
                d_flat: true,
                is_static: true,
                ambrozio: AmbrozioExpectation::Equality,
                r_nonnegative: true,
            },
            source: JetSource::Analytic,
            periodicity: None,
        },
        "h3" => radial_spec(
            "h3",
            "hyperbolic space H³, f = cosh s (negative R: identity checks only)",
            WarpedSpace::new("h3", 3, 1.0, (0.0, 2.5), profiles::sinh),
            RadialField::new(profiles::cosh),
            Expected {
                scalar: Some(-6.0),
                inv_s: Some(0.0),
                inv_f3: Some(0.0),
                cotton_flat: true,
                d_flat: true,
                is_static: true,
                ambrozio: AmbrozioExpectation::NotApplicable,
                r_nonnegative: false,
            },
            None,
        ),
        "s1xs2" => radial_spec(
            "s1xs2",
            "product S¹ × S²(1) with circumference 2π, f = cos s",
            WarpedSpace::new("s1xs2", 3, 1.0, (0.0, 2.0 * PI), profiles::one),
            RadialField::new(profiles::cos),
            cylinder_expected(),
            Some(Periodicity {
                axis: 0,
                period: 2.0 * PI,
            }),
        ),
        "rxs2" => radial_spec(
            "rxs2",
            "product ℝ × S²(1), f = cos s",
            WarpedSpace::new("rxs2", 3, 1.0, (-6.0, 6.0), profiles::one),
            RadialField::new(profiles::cos),
            cylinder_expected(),
            None,
        ),
        "s2xs2" => {
            let chart = product_chart("s2xs2", &[sphere2_chart("s2(1)", 1.0), sphere2_chart("s2(2)", 2.0)])
                .expect("two surfaces fit in MAX_DIM");
            SpaceSpec {
                name: "s2xs2",
                description: "product S²(K=1) × S²(K=2), R = 6, f = cos s on the first factor",
                dim: 4,
                chart,
                radial: None,
                potential: Arc::new(|x: &[Jet]| x[0].cos()),
                expected: Expected {
                    scalar: Some(6.0),
                    inv_s: Some(1.0),
                    inv_f3: Some(0.0),
                    cotton_flat: true,
                    d_flat: false,
                    is_static: true,
                    ambrozio: AmbrozioExpectation::NotApplicable,
                    r_nonnegative: true,
                },
                source: JetSource::Analytic,
                periodicity: None,
            }
        }
        "sds" => {
            let scan = ode::sds_build_and_scan(&SDS_PARAMS, 1).expect("catalog SdS parameters are periodic");
            let space = scan.space.clone();
            let period = scan.orbit.period;
            let mut spec = radial_spec(
                "sds",
                "Schwarzschild–de Sitter warping (R = 2, c0 = 0.3, k = 1), f = h'",
                space,
                scan.potential,
                Expected {
                    scalar: Some(SDS_PARAMS.r),
                    inv_s: None,
                    inv_f3: None,
                    cotton_flat: true,
                    d_flat: true,
                    is_static: true,
                    ambrozio: AmbrozioExpectation::Violated,
                    r_nonnegative: true,
                },
                Some(Periodicity { axis: 0, period }),
            );
            // restrict sampling to one period
            spec.chart.domain[0] = Interval::new(0.0, period);
            spec.source = JetSource::Ode;
            spec
        }
        other => return Err(CatalogError::UnknownSpace(other.to_string())),
    };
    Ok(spec)
}

fn cylinder_expected() -> Expected {
    Expected {
        scalar: Some(2.0),
        inv_s: Some(2.0 / 3.0),
        inv_f3: Some(-2.0 / 9.0),
        cotton_flat: true,
        d_flat: true,
        is_static: true,
        ambrozio: AmbrozioExpectation::Equality,
        r_nonnegative: true,
    }
}

fn radial_spec(
    name: &'static str,
    description: &'static str,
    space: WarpedSpace,
    f: RadialField,
    expected: Expected,
    periodicity: Option<Periodicity>,
) -> SpaceSpec {
    let chart = space.chart().expect("catalog warped spaces are three-dimensional");
    SpaceSpec {
        name,
        description,
        dim: space.n,
        chart,
        potential: f.lift(),
        source: space.source,
        radial: Some((space, f)),
        expected,
        periodicity,
    }
}

/// Flat chart on `[-2, 2]^dim`.
pub fn euclidean_chart(name: &str, dim: usize) -> Chart {
    Chart::new(
        name,
        vec![Interval::new(-2.0, 2.0); dim],
        vec![],
        metric_fn(dim, move |x, m| {
            let one = Jet::constant(1.0, x[0].dim());
            for (i, row) in m.iter_mut().enumerate().take(dim) {
                row[i] = one;
            }
        }),
    )
}

/// Polar chart `dθ² + sn_K(θ)² dφ²` on the surface of constant Gauss
/// curvature `K > 0`.
pub fn sphere2_chart(name: &str, curvature: f64) -> Chart {
    assert!(curvature > 0.0);
    let r = curvature.sqrt();
    let theta_max = PI / r;
    Chart::new(
        name,
        vec![Interval::new(0.0, theta_max), Interval::periodic(0.0, 2.0 * PI)],
        vec![
            SingularLocus { axis: 0, value: 0.0 },
            SingularLocus {
                axis: 0,
                value: theta_max,
            },
        ],
        metric_fn(2, move |x, m| {
            m[0][0] = Jet::constant(1.0, x[0].dim());
            m[1][1] = ((x[0] * r).sin() / r).square();
        }),
    )
}

/// Block-diagonal Riemannian product of `factors`, coordinates concatenated.
pub fn product_chart(name: &str, factors: &[Chart]) -> Result<Chart, ChartError> {
    let dim: usize = factors.iter().map(|c| c.dim).sum();
    if factors.is_empty() || dim > MAX_DIM {
        return Err(ChartError::DimensionMismatch {
            expected: MAX_DIM,
            got: dim,
        });
    }
    let mut domain = Vec::with_capacity(dim);
    let mut loci = Vec::new();
    let mut blocks = Vec::with_capacity(factors.len());
    let mut offset = 0;
    for c in factors {
        domain.extend(c.domain.iter().cloned());
        loci.extend(c.singular_loci.iter().map(|l| SingularLocus {
            axis: l.axis + offset,
            value: l.value,
        }));
        blocks.push((offset, c.dim, c.metric.clone()));
        offset += c.dim;
    }
    let margin = factors.iter().map(|c| c.margin).fold(0.0, f64::max);
    let metric = metric_fn(dim, move |x, m| {
        for (off, d, g) in &blocks {
            let sub = g(&x[*off..off + d]);
            for i in 0..*d {
                for j in i..*d {
                    m[off + i][off + j] = sub[i][j];
                }
            }
        }
    });
    Ok(Chart::new(name, domain, loci, metric).with_margin(margin))
}

/// The catalog's expected records, keyed by name.
pub fn expected_json() -> serde_json::Value {
    serde_json::to_value(catalog().iter().map(|s| s.summary()).collect::<Vec<_>>()).expect("serialisable")
}
