//! Univariate truncated Taylor series, used for the radial (one-variable)
//! geometry where derivatives beyond third order are required.
//!
//! Coefficients are normalised: `c[k] = f^(k)(s0) / k!`.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of stored coefficients (orders 0 through 8).
pub const SERIES_LEN: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series {
    c: [f64; SERIES_LEN],
    /// Highest coefficient index that is exact.
    valid: usize,
}

impl Series {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; SERIES_LEN];
        c[0] = v;
        Self {
            c,
            valid: SERIES_LEN - 1,
        }
    }

    /// The identity function `s ↦ s` expanded about `s0`.
    pub fn variable(s0: f64) -> Self {
        let mut out = Self::constant(s0);
        out.c[1] = 1.0;
        out
    }

    /// From derivative values `f, f', f'', …` (as many as are known).
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        assert!(!derivs.is_empty() && derivs.len() <= SERIES_LEN);
        let mut c = [0.0; SERIES_LEN];
        let mut fact = 1.0;
        for (k, d) in derivs.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            c[k] = d / fact;
        }
        Self {
            c,
            valid: derivs.len() - 1,
        }
    }

    pub fn from_coefficients(c: [f64; SERIES_LEN], valid: usize) -> Self {
        Self {
            c,
            valid: valid.min(SERIES_LEN - 1),
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn valid_order(&self) -> usize {
        self.valid
    }

    pub fn coefficient(&self, k: usize) -> f64 {
        self.c[k]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(
            k <= self.valid,
            "derivative of order {k} requested, series exact only to {}",
            self.valid
        );
        let fact: f64 = (1..=k).map(|v| v as f64).product();
        self.c[k] * fact
    }

    /// `[f, f', f'', f''']`, the shape taken by [`crate::jet::Jet::apply`].
    pub fn derivatives4(&self) -> [f64; 4] {
        [
            self.derivative(0),
            self.derivative(1),
            self.derivative(2),
            self.derivative(3),
        ]
    }

    /// Series of the derivative; loses one order.
    pub fn deriv(&self) -> Series {
        assert!(self.valid >= 1, "derivative of an order-0 series");
        let mut c = [0.0; SERIES_LEN];
        for k in 0..SERIES_LEN - 1 {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Series {
            c,
            valid: self.valid - 1,
        }
    }

    pub fn truncate(mut self, valid: usize) -> Series {
        self.valid = self.valid.min(valid);
        for k in self.valid + 1..SERIES_LEN {
            self.c[k] = 0.0;
        }
        self
    }

    pub fn scale(mut self, a: f64) -> Series {
        for v in &mut self.c {
            *v *= a;
        }
        self
    }

    pub fn square(&self) -> Series {
        *self * *self
    }

    pub fn recip(&self) -> Series {
        let x = &self.c;
        assert!(x[0] != 0.0, "reciprocal of a series with zero constant term");
        let mut y = [0.0; SERIES_LEN];
        y[0] = 1.0 / x[0];
        for k in 1..=self.valid {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += x[j] * y[k - j];
            }
            y[k] = -acc / x[0];
        }
        Series {
            c: y,
            valid: self.valid,
        }
    }

    /// `self^p` for real `p`; requires a positive constant term.
    pub fn powf(&self, p: f64) -> Series {
        let x = &self.c;
        assert!(x[0] > 0.0, "powf of a series with non-positive constant term");
        let mut y = [0.0; SERIES_LEN];
        y[0] = x[0].powf(p);
        for k in 1..=self.valid {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (p * j as f64 - (k - j) as f64) * x[j] * y[k - j];
            }
            y[k] = acc / (k as f64 * x[0]);
        }
        Series {
            c: y,
            valid: self.valid,
        }
    }

    pub fn powi(&self, p: i32) -> Series {
        match p {
            0 => Series::constant(1.0).truncate(self.valid),
            p if p < 0 => self.recip().powi(-p),
            p => {
                let mut acc = *self;
                for _ in 1..p {
                    acc = acc * *self;
                }
                acc
            }
        }
    }

    /// Simultaneous sine and cosine series.
    pub fn sin_cos(&self) -> (Series, Series) {
        let x = &self.c;
        let mut s = [0.0; SERIES_LEN];
        let mut c = [0.0; SERIES_LEN];
        (s[0], c[0]) = x[0].sin_cos();
        for k in 1..=self.valid {
            let mut as_ = 0.0;
            let mut ac = 0.0;
            for j in 1..=k {
                let w = j as f64 * x[j];
                as_ += w * c[k - j];
                ac += w * s[k - j];
            }
            s[k] = as_ / k as f64;
            c[k] = -ac / k as f64;
        }
        (
            Series {
                c: s,
                valid: self.valid,
            },
            Series { c, valid: self.valid },
        )
    }

    pub fn sin(&self) -> Series {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Series {
        self.sin_cos().1
    }

    pub fn exp(&self) -> Series {
        let x = &self.c;
        let mut y = [0.0; SERIES_LEN];
        y[0] = x[0].exp();
        for k in 1..=self.valid {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * x[j] * y[k - j];
            }
            y[k] = acc / k as f64;
        }
        Series {
            c: y,
            valid: self.valid,
        }
    }

    pub fn sinh(&self) -> Series {
        let e = self.exp();
        let m = self.neg().exp();
        (e - m).scale(0.5)
    }

    pub fn cosh(&self) -> Series {
        let e = self.exp();
        let m = self.neg().exp();
        (e + m).scale(0.5)
    }

    pub fn sqrt(&self) -> Series {
        self.powf(0.5)
    }
}

impl Add for Series {
    type Output = Series;
    fn add(mut self, rhs: Series) -> Series {
        for k in 0..SERIES_LEN {
            self.c[k] += rhs.c[k];
        }
        self.valid = self.valid.min(rhs.valid);
        self.truncate(self.valid)
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        self + (-rhs)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

impl Add<f64> for Series {
    type Output = Series;
    fn add(mut self, rhs: f64) -> Series {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Series {
    type Output = Series;
    fn sub(mut self, rhs: f64) -> Series {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Series {
    type Output = Series;
    fn mul(self, rhs: f64) -> Series {
        self.scale(rhs)
    }
}

impl Mul<Series> for f64 {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        rhs.scale(self)
    }
}

impl Div<f64> for Series {
    type Output = Series;
    fn div(self, rhs: f64) -> Series {
        self.scale(1.0 / rhs)
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let valid = self.valid.min(rhs.valid);
        let mut c = [0.0; SERIES_LEN];
        for (k, ck) in c.iter_mut().enumerate().take(valid + 1) {
            for j in 0..=k {
                *ck += self.c[j] * rhs.c[k - j];
            }
        }
        Series { c, valid }
    }
}

impl Div for Series {
    type Output = Series;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Series) -> Series {
        self * rhs.recip()
    }
}
