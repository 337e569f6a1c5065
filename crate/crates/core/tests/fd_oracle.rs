//! Christoffel symbols and curvature from the metric values alone, by
//! nested finite differences, against the jet-based engine.

#![allow(clippy::needless_range_loop)]

use vss_core::catalog::lookup;
use vss_core::chart::{christoffel, curvature, metric_fn, Chart, Interval};
use vss_core::jet::{Matrix, MAX_DIM};
use vss_core::sampling::chart_samples;
use vss_core::tensor::spd_inverse;

const ORACLE_TOL: f64 = 1e-5;
const INNER_STEP: f64 = 1e-4;
const OUTER_STEP: f64 = 1e-3;

type Gamma = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// Fourth-order central difference of a vector-valued function along `axis`.
fn diff<const N: usize>(f: &dyn Fn(&[f64]) -> [f64; N], x: &[f64], axis: usize, h: f64) -> [f64; N] {
    let at = |t: f64| {
        let mut y = x.to_vec();
        y[axis] += t;
        f(&y)
    };
    let (p2, p1, m1, m2) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h);
    }
    out
}

fn flat_metric(chart: &Chart, x: &[f64]) -> [f64; 16] {
    let g = chart.metric_values(x);
    let mut out = [0.0; 16];
    for i in 0..MAX_DIM {
        for j in 0..MAX_DIM {
            out[i * 4 + j] = g[i][j];
        }
    }
    out
}

fn oracle_gamma(chart: &Chart, x: &[f64]) -> Gamma {
    let n = chart.dim;
    let g: Matrix = chart.metric_values(x);
    let ginv = spd_inverse(&g, n).unwrap();
    let mf = |y: &[f64]| flat_metric(chart, y);
    let dg: Vec<[f64; 16]> = (0..n).map(|a| diff(&mf, x, a, INNER_STEP)).collect();
    let d = |l: usize, i: usize, j: usize| dg[l][i * 4 + j];
    let mut gam = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                gam[k][i][j] = (0..n)
                    .map(|l| 0.5 * ginv[k][l] * (d(i, j, l) + d(j, i, l) - d(l, i, j)))
                    .sum();
            }
        }
    }
    gam
}

fn flat_gamma(chart: &Chart, x: &[f64]) -> [f64; 64] {
    let g = oracle_gamma(chart, x);
    let mut out = [0.0; 64];
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                out[(k * 4 + i) * 4 + j] = g[k][i][j];
            }
        }
    }
    out
}

/// `R_abcd` (all lowered) with the engine's sign convention, and Ricci.
fn oracle_riemann(chart: &Chart, x: &[f64]) -> (Vec<f64>, Matrix) {
    let n = chart.dim;
    let gam = oracle_gamma(chart, x);
    let gf = |y: &[f64]| flat_gamma(chart, y);
    let dgam: Vec<[f64; 64]> = (0..n).map(|c| diff(&gf, x, c, OUTER_STEP)).collect();
    let dg = |c: usize, a: usize, d: usize, b: usize| dgam[c][(a * 4 + d) * 4 + b];
    let g = chart.metric_values(x);
    let mut up = vec![0.0; n * n * n * n];
    let ix = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dg(c, a, d, b) - dg(d, a, c, b);
                    for e in 0..n {
                        v += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
                    }
                    up[ix(a, b, c, d)] = v;
                }
            }
        }
    }
    let mut low = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    low[ix(a, b, c, d)] = (0..n).map(|e| g[a][e] * up[ix(e, b, c, d)]).sum();
                }
            }
        }
    }
    let mut ric = [[0.0; MAX_DIM]; MAX_DIM];
    for b in 0..n {
        for d in 0..n {
            ric[b][d] = (0..n).map(|a| up[ix(a, b, a, d)]).sum();
        }
    }
    (low, ric)
}

fn skewed_chart() -> Chart {
    Chart::new(
        "skewed",
        vec![Interval::new(-1.0, 1.0); 3],
        vec![],
        metric_fn(3, |x, m| {
            let (a, b, c) = (x[0], x[1], x[2]);
            m[0][0] = a.square() * 0.1 + 1.0;
            m[0][1] = b.sin() * 0.2;
            m[0][2] = a * c * 0.05;
            m[1][1] = (a * c).cos() * 0.3 + 2.0;
            m[1][2] = b * 0.1;
            m[2][2] = a * b * 0.2 + 1.5;
        }),
    )
}

/// Catalog charts with a wider margin: finite differences lose accuracy
/// near coordinate singularities, the jets do not.
fn charts() -> Vec<Chart> {
    let mut out: Vec<Chart> = ["s3", "h3", "s1xs2", "s2xs2", "sds"]
        .iter()
        .map(|n| lookup(n).unwrap().chart.with_margin(0.2))
        .collect();
    out.push(skewed_chart());
    out
}

#[test]
fn christoffel_matches_oracle() {
    for chart in charts() {
        for x in chart_samples(&chart, 6, 11) {
            let (gam, _) = christoffel(&chart, &x).unwrap();
            let oracle = oracle_gamma(&chart, &x);
            let n = chart.dim;
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let d = (gam[k][i][j] - oracle[k][i][j]).abs();
                        assert!(d < ORACLE_TOL, "{} Γ^{k}_{i}{j} at {x:?}: {d:e}", chart.name);
                    }
                }
            }
        }
    }
}

#[test]
fn riemann_and_ricci_match_oracle() {
    for chart in charts() {
        let n = chart.dim;
        for x in chart_samples(&chart, 4, 5) {
            let b = curvature(&chart, &x).unwrap();
            let (low, ric) = oracle_riemann(&chart, &x);
            let ix = |a: usize, bb: usize, c: usize, d: usize| ((a * n + bb) * n + c) * n + d;
            for a in 0..n {
                for bb in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let diff = (b.riemann[a][bb][c][d] - low[ix(a, bb, c, d)]).abs();
                            assert!(diff < ORACLE_TOL, "{} R_{a}{bb}{c}{d}: {diff:e}", chart.name);
                        }
                    }
                    let diff = (b.ricci[a][bb] - ric[a][bb]).abs();
                    assert!(diff < ORACLE_TOL, "{} Ric_{a}{bb} at {x:?}: {diff:e}", chart.name);
                }
            }
        }
    }
}

#[test]
fn equator_and_polar_examples() {
    // unit S² at the equator
    let s2 = vss_core::catalog::sphere2_chart("s2", 1.0);
    let (g, _) = christoffel(&s2, &[std::f64::consts::FRAC_PI_2, 0.0]).unwrap();
    let o = oracle_gamma(&s2, &[std::f64::consts::FRAC_PI_2, 0.0]);
    assert!(g[0][1][1].abs() < 1e-15 && o[0][1][1].abs() < 1e-9);
    assert!(g[1][0][1].abs() < 1e-15 && o[1][0][1].abs() < 1e-9);
    // ds² + s²dθ² at s = 2
    let polar = Chart::new(
        "polar",
        vec![Interval::new(0.0, 5.0), Interval::periodic(0.0, 6.3)],
        vec![],
        metric_fn(2, |x, m| {
            m[0][0] = vss_core::Jet::constant(1.0, x[0].dim());
            m[1][1] = x[0].square();
        }),
    );
    let (g, _) = christoffel(&polar, &[2.0, 1.0]).unwrap();
    let o = oracle_gamma(&polar, &[2.0, 1.0]);
    assert!((g[0][1][1] + 2.0).abs() < 1e-14);
    assert!((o[0][1][1] + 2.0).abs() < 1e-9);
}
