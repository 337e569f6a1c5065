//! Dormand–Prince 5(4) with Hairer's continuous extension, for autonomous
//! systems in two variables.

/// Right-hand side `y' = rhs(y)`.
pub trait Rhs2 {
    fn eval(&self, y: [f64; 2]) -> [f64; 2];
}

impl<F: Fn([f64; 2]) -> [f64; 2]> Rhs2 for F {
    fn eval(&self, y: [f64; 2]) -> [f64; 2] {
        self(y)
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its interpolation coefficients.
#[derive(Clone, Debug)]
pub struct DenseStep {
    pub s0: f64,
    pub h: f64,
    rcont: [[f64; 2]; 5],
}

impl DenseStep {
    pub fn s1(&self) -> f64 {
        self.s0 + self.h
    }

    /// Interpolated state at `s` (meant for `s` inside the step).
    pub fn eval(&self, s: f64) -> [f64; 2] {
        let t = (s - self.s0) / self.h;
        let t1 = 1.0 - t;
        let r = &self.rcont;
        [0, 1].map(|i| r[0][i] + t * (r[1][i] + t1 * (r[2][i] + t * (r[3][i] + t1 * r[4][i]))))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

/// Outcome of one attempted step.
pub struct Attempt {
    pub y1: [f64; 2],
    pub k7: [f64; 2],
    pub err: f64,
    pub dense: DenseStep,
}

fn axpy(y: [f64; 2], terms: &[(f64, [f64; 2])], h: f64) -> [f64; 2] {
    let mut out = y;
    for (a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

/// Single Dormand–Prince step from `(s0, y0)` with derivative `k1`.
pub fn attempt<F: Rhs2>(rhs: &F, s0: f64, y0: [f64; 2], k1: [f64; 2], h: f64, ctl: &StepControl) -> Attempt {
    let k2 = rhs.eval(axpy(y0, &[(A21, k1)], h));
    let k3 = rhs.eval(axpy(y0, &[(A31, k1), (A32, k2)], h));
    let k4 = rhs.eval(axpy(y0, &[(A41, k1), (A42, k2), (A43, k3)], h));
    let k5 = rhs.eval(axpy(y0, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h));
    let k6 = rhs.eval(axpy(y0, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h));
    let y1 = axpy(y0, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)], h);
    let k7 = rhs.eval(y1);
    let mut err = 0.0;
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = ctl.atol + ctl.rtol * y0[i].abs().max(y1[i].abs());
        err += (e / sc).powi(2);
    }
    let err = (err / 2.0).sqrt();
    let mut rcont = [[0.0; 2]; 5];
    for i in 0..2 {
        let dy = y1[i] - y0[i];
        let bspl = h * k1[i] - dy;
        rcont[0][i] = y0[i];
        rcont[1][i] = dy;
        rcont[2][i] = bspl;
        rcont[3][i] = dy - h * k7[i] - bspl;
        rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Attempt {
        y1,
        k7,
        err,
        dense: DenseStep { s0, h, rcont },
    }
}

/// Initial step guess (Hairer's `hinit`, simplified).
pub fn initial_step<F: Rhs2>(rhs: &F, y0: [f64; 2], k1: [f64; 2], ctl: &StepControl, direction: f64) -> f64 {
    let sc = |i: usize| ctl.atol + ctl.rtol * y0[i].abs();
    let norm = |v: [f64; 2]| ((v[0] / sc(0)).powi(2) / 2.0 + (v[1] / sc(1)).powi(2) / 2.0).sqrt();
    let d0 = norm(y0);
    let d1 = norm(k1);
    let h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = [y0[0] + direction * h0 * k1[0], y0[1] + direction * h0 * k1[1]];
    let k2 = rhs.eval(y1);
    let d2 = norm([k2[0] - k1[0], k2[1] - k1[1]]) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(0.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_single_steps() {
        let rhs = |y: [f64; 2]| [y[1], -y[0]];
        let ctl = StepControl {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 10,
        };
        let y0 = [1.0, 0.0];
        let at = attempt(&rhs, 0.0, y0, rhs(y0), 0.1, &ctl);
        assert!((at.y1[0] - 0.1f64.cos()).abs() < 1e-9);
        assert!((at.y1[1] + 0.1f64.sin()).abs() < 1e-9);
        // dense output reproduces both ends and is accurate mid-step
        let mid = at.dense.eval(0.05);
        assert!((mid[0] - 0.05f64.cos()).abs() < 1e-9);
        let end = at.dense.eval(0.1);
        assert!((end[0] - at.y1[0]).abs() < 1e-15);
    }
}
