//! Truncated multivariate Taylor jets (forward-mode AD to third order).
//!
//! A [`Jet`] carries a value together with all partial derivatives up to
//! order three with respect to at most [`MAX_DIM`] coordinates. Arithmetic
//! follows the Leibniz and Faà di Bruno rules, so composing metric
//! coefficients out of elementary functions yields exact derivatives up to
//! rounding.
//!
//! Each jet also records the highest order that is still meaningful. Taking
//! a partial derivative lowers it by one, and binary operations keep the
//! minimum of their operands, so quantities such as Christoffel symbols
//! (first derivatives of the metric) are carried as order-2 jets and the
//! curvature built from them as order-1 jets.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 4;

pub type Vector = [f64; MAX_DIM];
pub type Matrix = [[f64; MAX_DIM]; MAX_DIM];
pub type Cube = [[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM];

/// Value plus partial derivatives up to order three.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    dim: u8,
    order: u8,
    value: f64,
    d1: Vector,
    d2: Matrix,
    d3: Cube,
}

/// The scalar-field jet `(f, ∂f, ∂∂f, ∂∂∂f)` at a point.
pub type ScalarJet = Jet;

impl Jet {
    /// A constant in `dim` coordinates.
    pub fn constant(value: f64, dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds MAX_DIM");
        Self {
            dim: dim as u8,
            order: 3,
            value,
            d1: [0.0; MAX_DIM],
            d2: [[0.0; MAX_DIM]; MAX_DIM],
            d3: [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM],
        }
    }

    /// The coordinate function `x_axis` evaluated at `value`.
    pub fn variable(value: f64, axis: usize, dim: usize) -> Self {
        assert!(axis < dim);
        let mut jet = Self::constant(value, dim);
        jet.d1[axis] = 1.0;
        jet
    }

    /// Seeds for every coordinate of the point `x`.
    pub fn seeds(x: &[f64]) -> Vec<Jet> {
        let dim = x.len();
        x.iter()
            .enumerate()
            .map(|(axis, &v)| Jet::variable(v, axis, dim))
            .collect()
    }

    /// Builds a jet from explicit derivative arrays.
    pub fn from_parts(value: f64, d1: Vector, d2: Matrix, d3: Cube, dim: usize) -> Self {
        Self {
            dim: dim as u8,
            order: 3,
            value,
            d1,
            d2,
            d3,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order as usize
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn grad(&self) -> &Vector {
        debug_assert!(self.order >= 1);
        &self.d1
    }

    #[inline]
    pub fn hess(&self) -> &Matrix {
        debug_assert!(self.order >= 2);
        &self.d2
    }

    #[inline]
    pub fn third(&self) -> &Cube {
        debug_assert!(self.order >= 3);
        &self.d3
    }

    /// Drops derivatives above `order`.
    pub fn truncate(mut self, order: usize) -> Self {
        if order < self.order() {
            self.order = order as u8;
            if order < 3 {
                self.d3 = [[[0.0; MAX_DIM]; MAX_DIM]; MAX_DIM];
            }
            if order < 2 {
                self.d2 = [[0.0; MAX_DIM]; MAX_DIM];
            }
            if order < 1 {
                self.d1 = [0.0; MAX_DIM];
            }
        }
        self
    }

    /// `∂_axis` of the jet, one order lower.
    pub fn partial(&self, axis: usize) -> Jet {
        assert!(self.order >= 1, "partial of an order-0 jet");
        let n = self.dim();
        let mut out = Jet::constant(self.d1[axis], n);
        out.order = self.order - 1;
        if out.order >= 1 {
            for j in 0..n {
                out.d1[j] = self.d2[axis][j];
            }
        }
        if out.order >= 2 {
            for j in 0..n {
                for k in 0..n {
                    out.d2[j][k] = self.d3[axis][j][k];
                }
            }
        }
        out
    }

    /// Composes a univariate function with this jet, given the function's
    /// value and first three derivatives at `self.value()`.
    pub fn apply(&self, phi: [f64; 4]) -> Jet {
        let n = self.dim();
        let a = self;
        let mut out = Jet::constant(phi[0], n);
        out.order = a.order;
        if a.order >= 1 {
            for i in 0..n {
                out.d1[i] = phi[1] * a.d1[i];
            }
        }
        if a.order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.d2[i][j] = phi[2] * a.d1[i] * a.d1[j] + phi[1] * a.d2[i][j];
                }
            }
        }
        if a.order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.d3[i][j][k] = phi[3] * a.d1[i] * a.d1[j] * a.d1[k]
                            + phi[2] * (a.d2[i][j] * a.d1[k] + a.d2[i][k] * a.d1[j] + a.d2[j][k] * a.d1[i])
                            + phi[1] * a.d3[i][j][k];
                    }
                }
            }
        }
        out
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.apply([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.apply([c, -s, -c, s])
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.apply([s, c, s, c])
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.apply([c, s, c, s])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.apply([e, e, e, e])
    }

    pub fn ln(&self) -> Jet {
        let x = self.value;
        self.apply([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    pub fn sqrt(&self) -> Jet {
        let r = self.value.sqrt();
        let x = self.value;
        self.apply([r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x)])
    }

    pub fn recip(&self) -> Jet {
        let x = self.value;
        let r = 1.0 / x;
        self.apply([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn powi(&self, p: i32) -> Jet {
        let x = self.value;
        let pf = p as f64;
        self.apply([
            x.powi(p),
            pf * x.powi(p - 1),
            pf * (pf - 1.0) * x.powi(p - 2),
            pf * (pf - 1.0) * (pf - 2.0) * x.powi(p - 3),
        ])
    }

    pub fn square(&self) -> Jet {
        *self * *self
    }

    pub fn scale(mut self, c: f64) -> Jet {
        let n = self.dim();
        self.value *= c;
        for i in 0..n {
            self.d1[i] *= c;
            for j in 0..n {
                self.d2[i][j] *= c;
                for k in 0..n {
                    self.d3[i][j][k] *= c;
                }
            }
        }
        self
    }

    fn zip(self, rhs: Jet, sign: f64) -> Jet {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim();
        let mut out = self.truncate(rhs.order());
        out.value += sign * rhs.value;
        if out.order >= 1 {
            for i in 0..n {
                out.d1[i] += sign * rhs.d1[i];
            }
        }
        if out.order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    out.d2[i][j] += sign * rhs.d2[i][j];
                }
            }
        }
        if out.order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        out.d3[i][j][k] += sign * rhs.d3[i][j][k];
                    }
                }
            }
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.zip(rhs, 1.0)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.zip(rhs, -1.0)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, b: Jet) -> Jet {
        debug_assert_eq!(self.dim, b.dim);
        let a = self;
        let n = a.dim();
        let mut out = Jet::constant(a.value * b.value, n);
        out.order = a.order.min(b.order);
        if out.order >= 1 {
            for i in 0..n {
                out.d1[i] = a.d1[i] * b.value + a.value * b.d1[i];
            }
        }
        if out.order >= 2 {
            for i in 0..n {
                for j in i..n {
                    let v = a.d2[i][j] * b.value + a.d1[i] * b.d1[j] + a.d1[j] * b.d1[i] + a.value * b.d2[i][j];
                    out.d2[i][j] = v;
                    out.d2[j][i] = v;
                }
            }
        }
        if out.order >= 3 {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let v = a.d3[i][j][k] * b.value
                            + a.d2[i][j] * b.d1[k]
                            + a.d2[i][k] * b.d1[j]
                            + a.d2[j][k] * b.d1[i]
                            + a.d1[i] * b.d2[j][k]
                            + a.d1[j] * b.d2[i][k]
                            + a.d1[k] * b.d2[i][j]
                            + a.value * b.d3[i][j][k];
                        for (p, q, r) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                            out.d3[p][q][r] = v;
                        }
                    }
                }
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

/// Inverse of the leading `n×n` block of a jet matrix by Gauss-Jordan
/// elimination with partial pivoting on the values.
pub fn invert(m: &[[Jet; MAX_DIM]; MAX_DIM], n: usize) -> Option<[[Jet; MAX_DIM]; MAX_DIM]> {
    let zero = Jet::constant(0.0, m[0][0].dim());
    let one = Jet::constant(1.0, m[0][0].dim());
    let mut a = *m;
    let mut inv = [[zero; MAX_DIM]; MAX_DIM];
    for (i, row) in inv.iter_mut().enumerate().take(n) {
        row[i] = one;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&p, &q| a[p][col].value().abs().total_cmp(&a[q][col].value().abs()))?;
        if a[pivot][col].value().abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let r = a[col][col].recip();
        for j in 0..n {
            a[col][j] = a[col][j] * r;
            inv[col][j] = inv[col][j] * r;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            for j in 0..n {
                a[row][j] -= factor * a[col][j];
                inv[row][j] -= factor * inv[col][j];
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: impl Fn(&[Jet]) -> Jet, x: &[f64]) {
        let n = x.len();
        let jet = f(&Jet::seeds(x));
        let val = |p: &[f64]| f(&p.iter().map(|&v| Jet::constant(v, n)).collect::<Vec<_>>()).value();
        let h = 1e-4;
        for i in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let fd = (val(&xp) - val(&xm)) / (2.0 * h);
            assert!((fd - jet.grad()[i]).abs() < 1e-7, "grad {i}");
            let gp = f(&Jet::seeds(&xp));
            let gm = f(&Jet::seeds(&xm));
            for j in 0..n {
                let fd2 = (gp.grad()[j] - gm.grad()[j]) / (2.0 * h);
                assert!((fd2 - jet.hess()[i][j]).abs() < 1e-6, "hess {i}{j}");
                for k in 0..n {
                    let fd3 = (gp.hess()[j][k] - gm.hess()[j][k]) / (2.0 * h);
                    assert!((fd3 - jet.third()[i][j][k]).abs() < 1e-5, "third {i}{j}{k}");
                }
            }
        }
    }

    #[test]
    fn product_and_quotient_match_finite_differences() {
        fd_check(|x| x[0] * x[1].sin() / (x[2].square() + 1.0), &[0.3, 1.1, -0.7]);
    }

    #[test]
    fn elementary_functions_match_finite_differences() {
        fd_check(
            |x| x[0].cosh() * x[1].exp() + x[0].sinh().sqrt() * x[1].ln(),
            &[0.8, 1.7],
        );
        fd_check(|x| x[0].powi(-2) * x[1].cos() + x[0].recip(), &[1.3, 0.4]);
    }

    #[test]
    fn partial_lowers_order() {
        let x = Jet::seeds(&[0.5, 2.0]);
        let f = x[0].square() * x[1];
        let fx = f.partial(0);
        assert_eq!(fx.order(), 2);
        assert!((fx.value() - 2.0).abs() < 1e-15);
        assert!((fx.grad()[0] - 4.0).abs() < 1e-15);
        assert!((fx.hess()[0][1] - 2.0).abs() < 1e-15);
        assert_eq!(fx.partial(1).partial(0).order(), 0);
    }

    #[test]
    fn mixed_order_arithmetic_takes_minimum() {
        let x = Jet::seeds(&[0.5, 2.0]);
        let low = x[0].partial(0);
        assert_eq!((x[1] * low).order(), 2);
        assert_eq!((x[1] + low).order(), 2);
    }

    #[test]
    fn invert_recovers_identity() {
        let x = Jet::seeds(&[0.4, 0.9, 1.3]);
        let z = Jet::constant(0.0, 3);
        let mut m = [[z; MAX_DIM]; MAX_DIM];
        m[0][0] = x[0].cos() + 2.0;
        m[0][1] = x[1] * x[2];
        m[1][0] = m[0][1];
        m[1][1] = x[2].square() + 1.0;
        m[2][2] = x[0].exp();
        m[1][2] = x[0] * 0.1;
        m[2][1] = m[1][2];
        let inv = invert(&m, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut p = z;
                for l in 0..3 {
                    p += m[i][l] * inv[l][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((p.value() - target).abs() < 1e-14);
                for a in 0..3 {
                    assert!(p.grad()[a].abs() < 1e-13);
                    for b in 0..3 {
                        assert!(p.hess()[a][b].abs() < 1e-12);
                        for c in 0..3 {
                            assert!(p.third()[a][b][c].abs() < 1e-11);
                        }
                    }
                }
            }
        }
    }
}
