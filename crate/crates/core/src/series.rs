//! Scalar fields used to evaluate radial coefficients: plain `f64` for integration and
//! truncated Laurent series in r for the expansion about the origin.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic needed by the coefficient formulas.
pub trait Field:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// A constant of the same kind as `self`.
    fn lift(&self, c: f64) -> Self;

    fn recip(&self) -> Self {
        self.lift(1.0) / self.clone()
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Field for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }

    fn recip(&self) -> Self {
        1.0 / self
    }
}

/// Σ_{k=val}^{prec−1} c_k r^k + O(r^prec).
///
/// `order` is the truncation requested for constants created by [`Field::lift`].
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    val: i32,
    coef: Vec<f64>,
    prec: i32,
    order: i32,
}

impl Series {
    /// The variable r, known through O(r^order).
    pub fn variable(order: i32) -> Self {
        Self::monomial(1.0, 1, order)
    }

    pub fn constant(c: f64, order: i32) -> Self {
        Self::monomial(c, 0, order)
    }

    fn monomial(c: f64, k: i32, order: i32) -> Self {
        if c == 0.0 {
            return Self::zero(order, order);
        }
        let prec = order.max(k + 1);
        let mut coef = vec![0.0; (prec - k) as usize];
        coef[0] = c;
        Self { val: k, coef, prec, order }
    }

    fn zero(prec: i32, order: i32) -> Self {
        Self { val: prec, coef: Vec::new(), prec, order }
    }

    fn normalized(mut self) -> Self {
        let lead = self.coef.iter().position(|&c| c != 0.0).unwrap_or(self.coef.len());
        self.coef.drain(..lead);
        self.val += lead as i32;
        if self.coef.is_empty() {
            self.val = self.prec;
        }
        self
    }

    /// Lowest exponent with a nonzero coefficient (equals `precision` for an unknown-zero).
    pub fn valuation(&self) -> i32 {
        self.val
    }

    /// Exponent where the truncation error begins.
    pub fn precision(&self) -> i32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_empty()
    }

    /// Coefficient of r^k (0 outside the stored window).
    pub fn coeff(&self, k: i32) -> f64 {
        if k < self.val || k >= self.prec {
            return 0.0;
        }
        self.coef[(k - self.val) as usize]
    }

    pub fn eval(&self, r: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coef.iter().rev() {
            acc = acc * r + c;
        }
        acc * r.powi(self.val)
    }

    fn add_impl(&self, other: &Series, sign: f64) -> Series {
        let prec = self.prec.min(other.prec);
        let order = self.order.max(other.order);
        let val = self.val.min(other.val).min(prec);
        let coef = (val..prec).map(|k| self.coeff(k) + sign * other.coeff(k)).collect();
        Series { val, coef, prec, order }.normalized()
    }
}

impl Add for Series {
    type Output = Series;
    fn add(self, rhs: Series) -> Series {
        self.add_impl(&rhs, 1.0)
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        self.add_impl(&rhs, -1.0)
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(mut self) -> Series {
        self.coef.iter_mut().for_each(|c| *c = -*c);
        self
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let order = self.order.max(rhs.order);
        if self.is_zero() || rhs.is_zero() {
            let prec = (self.prec + rhs.val).min(rhs.prec + self.val);
            return Series::zero(prec, order);
        }
        let val = self.val + rhs.val;
        let prec = (self.prec + rhs.val).min(rhs.prec + self.val);
        let n = (prec - val).max(0) as usize;
        let mut coef = vec![0.0; n];
        for (i, a) in self.coef.iter().enumerate().take(n) {
            for (j, b) in rhs.coef.iter().enumerate().take(n - i) {
                coef[i + j] += a * b;
            }
        }
        Series { val, coef, prec, order }.normalized()
    }
}

impl Div for Series {
    type Output = Series;
    fn div(self, rhs: Series) -> Series {
        self * rhs.recip()
    }
}

impl Add<f64> for Series {
    type Output = Series;
    fn add(self, rhs: f64) -> Series {
        let c = self.lift(rhs);
        self + c
    }
}

impl Sub<f64> for Series {
    type Output = Series;
    fn sub(self, rhs: f64) -> Series {
        let c = self.lift(rhs);
        self - c
    }
}

impl Mul<f64> for Series {
    type Output = Series;
    fn mul(mut self, rhs: f64) -> Series {
        if rhs == 0.0 {
            return Series::zero(self.prec, self.order);
        }
        self.coef.iter_mut().for_each(|c| *c *= rhs);
        self
    }
}

impl Div<f64> for Series {
    type Output = Series;
    fn div(self, rhs: f64) -> Series {
        self * (1.0 / rhs)
    }
}

impl Field for Series {
    fn lift(&self, c: f64) -> Self {
        Series::constant(c, self.order)
    }

    /// Panics on a series with no known nonzero term.
    fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of a vanishing series");
        let n = self.coef.len();
        let b0 = self.coef[0];
        let mut out = vec![0.0; n];
        out[0] = 1.0 / b0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|i| self.coef[i] * out[k - i]).sum();
            out[k] = -s / b0;
        }
        Series { val: -self.val, coef: out, prec: self.prec - 2 * self.val, order: self.order }
    }
}
