//! Band-limited trigonometric polynomials on the circle.
//!
//! A [`TrigPoly`] is either periodic, with modes `k = 0, 1, ..., N`, or
//! anti-periodic, with half-integer modes `k + 1/2`. Both kinds are stored in
//! "slots": slot `k` holds the coefficients of `cos(w_k x)` and `sin(w_k x)`
//! where `w_k = k` (periodic) or `w_k = k + 1/2` (anti-periodic).
//!
//! Differentiation, multiplication and integration over a period are exact.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Periodic,
    AntiPeriodic,
}

impl Parity {
    fn offset(self) -> f64 {
        match self {
            Parity::Periodic => 0.0,
            Parity::AntiPeriodic => 0.5,
        }
    }

    /// Parity of a product.
    pub fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Periodic
        } else {
            Parity::AntiPeriodic
        }
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigPolyRepr", into = "TrigPolyRepr")]
pub struct TrigPoly {
    parity: Parity,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPoly {
    /// Builds a polynomial from raw slot coefficients.
    ///
    /// Panics if the slices have different lengths, or if a periodic
    /// polynomial carries a non-zero `sin(0 x)` coefficient.
    pub fn from_slots(parity: Parity, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        assert_eq!(cos.len(), sin.len(), "cos/sin slot count mismatch");
        let mut p = TrigPoly { parity, cos, sin };
        if parity == Parity::Periodic && !p.sin.is_empty() {
            p.sin[0] = 0.0;
        }
        p
    }

    /// `a0 + sum_k (a_k cos kx + b_k sin kx)` with `cos = [a_1..]`, `sin = [b_1..]`.
    pub fn new(a0: f64, cos: &[f64], sin: &[f64]) -> Self {
        let n = cos.len().max(sin.len());
        let mut c = vec![0.0; n + 1];
        let mut s = vec![0.0; n + 1];
        c[0] = a0;
        c[1..=cos.len()].copy_from_slice(cos);
        s[1..=sin.len()].copy_from_slice(sin);
        TrigPoly::from_slots(Parity::Periodic, c, s)
    }

    /// Anti-periodic `sum_k (c_k cos (k+1/2)x + s_k sin (k+1/2)x)`.
    pub fn half(cos: &[f64], sin: &[f64]) -> Self {
        let n = cos.len().max(sin.len());
        let mut c = vec![0.0; n];
        let mut s = vec![0.0; n];
        c[..cos.len()].copy_from_slice(cos);
        s[..sin.len()].copy_from_slice(sin);
        TrigPoly::from_slots(Parity::AntiPeriodic, c, s)
    }

    pub fn zero() -> Self {
        TrigPoly::from_slots(Parity::Periodic, vec![], vec![])
    }

    pub fn zero_of(parity: Parity) -> Self {
        TrigPoly::from_slots(parity, vec![], vec![])
    }

    pub fn constant(c: f64) -> Self {
        TrigPoly::from_slots(Parity::Periodic, vec![c], vec![0.0])
    }

    /// `cos(k x)`.
    pub fn cos_mode(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        TrigPoly::from_slots(Parity::Periodic, c, vec![0.0; k + 1])
    }

    /// `sin(k x)`; zero for `k = 0`.
    pub fn sin_mode(k: usize) -> Self {
        let mut s = vec![0.0; k + 1];
        s[k] = 1.0;
        TrigPoly::from_slots(Parity::Periodic, vec![0.0; k + 1], s)
    }

    /// `cos((k + 1/2) x)`.
    pub fn half_cos_mode(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        TrigPoly::from_slots(Parity::AntiPeriodic, c, vec![0.0; k + 1])
    }

    /// `sin((k + 1/2) x)`.
    pub fn half_sin_mode(k: usize) -> Self {
        let mut s = vec![0.0; k + 1];
        s[k] = 1.0;
        TrigPoly::from_slots(Parity::AntiPeriodic, vec![0.0; k + 1], s)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_periodic(&self) -> bool {
        self.parity == Parity::Periodic
    }

    pub fn slots(&self) -> usize {
        self.cos.len()
    }

    /// Highest stored mode index (slot count minus one, zero when empty).
    pub fn degree(&self) -> usize {
        self.cos.len().saturating_sub(1)
    }

    pub fn frequency(&self, slot: usize) -> f64 {
        slot as f64 + self.parity.offset()
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// Constant term (zero for anti-periodic polynomials).
    pub fn a0(&self) -> f64 {
        match self.parity {
            Parity::Periodic => self.cos.first().copied().unwrap_or(0.0),
            Parity::AntiPeriodic => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    /// Largest absolute coefficient.
    pub fn max_norm(&self) -> f64 {
        self.cos
            .iter()
            .chain(&self.sin)
            .fold(0.0, |m: f64, c| m.max(c.abs()))
    }

    /// Sum of absolute coefficients, an upper bound for the sup norm.
    pub fn l1_norm(&self) -> f64 {
        self.cos.iter().chain(&self.sin).map(|c| c.abs()).sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.cos.is_empty() {
            return 0.0;
        }
        let (mut c, mut s) = match self.parity {
            Parity::Periodic => (1.0, 0.0),
            Parity::AntiPeriodic => ((0.5 * x).cos(), (0.5 * x).sin()),
        };
        let (c1, s1) = (x.cos(), x.sin());
        let mut acc = 0.0;
        for (a, b) in self.cos.iter().zip(&self.sin) {
            acc += a * c + b * s;
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        acc
    }

    /// Values at the `m` equispaced nodes `2 pi j / m`.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        (0..m)
            .map(|j| self.eval(2.0 * PI * j as f64 / m as f64))
            .collect()
    }

    pub fn derivative(&self) -> TrigPoly {
        let mut cos = Vec::with_capacity(self.cos.len());
        let mut sin = Vec::with_capacity(self.sin.len());
        for k in 0..self.cos.len() {
            let w = self.frequency(k);
            cos.push(w * self.sin[k]);
            sin.push(-w * self.cos[k]);
        }
        TrigPoly::from_slots(self.parity, cos, sin)
    }

    pub fn nth_derivative(&self, n: usize) -> TrigPoly {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Exact `int_0^{2 pi} f dx`.
    pub fn integrate_period(&self) -> f64 {
        match self.parity {
            Parity::Periodic => 2.0 * PI * self.a0(),
            Parity::AntiPeriodic => self
                .sin
                .iter()
                .enumerate()
                .map(|(k, s)| 2.0 * s / (k as f64 + 0.5))
                .sum(),
        }
    }

    pub fn scale(&self, factor: f64) -> TrigPoly {
        TrigPoly::from_slots(
            self.parity,
            self.cos.iter().map(|c| c * factor).collect(),
            self.sin.iter().map(|c| c * factor).collect(),
        )
    }

    /// Exact product by coefficient convolution.
    pub fn product(&self, other: &TrigPoly) -> TrigPoly {
        let parity = self.parity.times(other.parity);
        if self.cos.is_empty() || other.cos.is_empty() {
            return TrigPoly::zero_of(parity);
        }
        // Work with doubled integer frequencies so both kinds share one rule.
        let (ac, as_) = self.doubled();
        let (bc, bs) = other.doubled();
        let len = ac.len() + bc.len();
        let mut rc = vec![0.0; len];
        let mut rs = vec![0.0; len];
        for n in 0..ac.len() {
            let (cn, sn) = (ac[n], as_[n]);
            if cn == 0.0 && sn == 0.0 {
                continue;
            }
            for m in 0..bc.len() {
                let (cm, sm) = (bc[m], bs[m]);
                if cm == 0.0 && sm == 0.0 {
                    continue;
                }
                let sum = n + m;
                let diff = n.abs_diff(m);
                // sign of sin((n - m) x) relative to sin(|n - m| x)
                let sgn = if n >= m { 1.0 } else { -1.0 };
                rc[sum] += 0.5 * (cn * cm - sn * sm);
                rc[diff] += 0.5 * (cn * cm + sn * sm);
                rs[sum] += 0.5 * (sn * cm + cn * sm);
                rs[diff] += 0.5 * sgn * (sn * cm - cn * sm);
            }
        }
        TrigPoly::from_doubled(parity, &rc, &rs)
    }

    fn doubled(&self) -> (Vec<f64>, Vec<f64>) {
        let off = match self.parity {
            Parity::Periodic => 0,
            Parity::AntiPeriodic => 1,
        };
        let len = 2 * self.cos.len() + off;
        let mut c = vec![0.0; len];
        let mut s = vec![0.0; len];
        for k in 0..self.cos.len() {
            c[2 * k + off] = self.cos[k];
            s[2 * k + off] = self.sin[k];
        }
        (c, s)
    }

    fn from_doubled(parity: Parity, c: &[f64], s: &[f64]) -> TrigPoly {
        let off = match parity {
            Parity::Periodic => 0,
            Parity::AntiPeriodic => 1,
        };
        let mut cos = Vec::new();
        let mut sin = Vec::new();
        let mut n = off;
        while n < c.len() {
            cos.push(c[n]);
            sin.push(s[n]);
            n += 2;
        }
        TrigPoly::from_slots(parity, cos, sin).trimmed(0.0)
    }

    /// Drops trailing slots whose coefficients are all within `tol` of zero.
    pub fn trimmed(mut self, tol: f64) -> TrigPoly {
        while let (Some(c), Some(s)) = (self.cos.last(), self.sin.last()) {
            if c.abs() <= tol && s.abs() <= tol {
                self.cos.pop();
                self.sin.pop();
            } else {
                break;
            }
        }
        self
    }

    /// Keeps only slots `0..=degree`.
    pub fn truncated(&self, degree: usize) -> TrigPoly {
        let n = self.cos.len().min(degree + 1);
        TrigPoly::from_slots(self.parity, self.cos[..n].to_vec(), self.sin[..n].to_vec())
    }

    /// Coefficient max-norm of `self - other`.
    pub fn distance(&self, other: &TrigPoly) -> f64 {
        (self - other).max_norm()
    }

    pub fn approx_eq(&self, other: &TrigPoly, tol: f64) -> bool {
        self.parity_compatible(other) && self.distance(other) <= tol
    }

    fn parity_compatible(&self, other: &TrigPoly) -> bool {
        self.parity == other.parity || self.is_zero() || other.is_zero()
    }

    fn combine(&self, other: &TrigPoly, sign: f64) -> TrigPoly {
        // a zero operand adopts the other's parity
        let parity = if self.is_zero() {
            other.parity
        } else if other.is_zero() {
            self.parity
        } else {
            assert_eq!(
                self.parity, other.parity,
                "cannot add periodic and anti-periodic polynomials"
            );
            self.parity
        };
        let n = self.cos.len().max(other.cos.len());
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 0..n {
            cos[k] = self.cos.get(k).copied().unwrap_or(0.0)
                + sign * other.cos.get(k).copied().unwrap_or(0.0);
            sin[k] = self.sin.get(k).copied().unwrap_or(0.0)
                + sign * other.sin.get(k).copied().unwrap_or(0.0);
        }
        TrigPoly::from_slots(parity, cos, sin)
    }

    pub fn checked_add(&self, other: &TrigPoly) -> Result<TrigPoly> {
        if !self.parity_compatible(other) {
            return Err(Error::ParityMismatch);
        }
        Ok(self.combine(other, 1.0))
    }
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrigPoly")
            .field("parity", &self.parity)
            .field("cos", &self.cos)
            .field("sin", &self.sin)
            .finish()
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        self.combine(rhs, 1.0)
    }
}

impl Add for TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: TrigPoly) -> TrigPoly {
        self.combine(&rhs, 1.0)
    }
}

impl AddAssign<&TrigPoly> for TrigPoly {
    fn add_assign(&mut self, rhs: &TrigPoly) {
        *self = self.combine(rhs, 1.0);
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self.combine(rhs, -1.0)
    }
}

impl Sub for TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: TrigPoly) -> TrigPoly {
        self.combine(&rhs, -1.0)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

impl Neg for TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        self.product(rhs)
    }
}

impl Mul for TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: TrigPoly) -> TrigPoly {
        self.product(&rhs)
    }
}

impl Mul<&TrigPoly> for f64 {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        rhs.scale(self)
    }
}

impl Mul<TrigPoly> for f64 {
    type Output = TrigPoly;
    fn mul(self, rhs: TrigPoly) -> TrigPoly {
        rhs.scale(self)
    }
}

/// Wire format: `{"a0":…, "cos":[a_1..], "sin":[b_1..]}` for periodic
/// polynomials and `{"half":true, "cos":[c_0..], "sin":[s_0..]}` for
/// anti-periodic ones.
#[derive(Serialize, Deserialize)]
struct TrigPolyRepr {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    half: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a0: Option<f64>,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

impl TryFrom<TrigPolyRepr> for TrigPoly {
    type Error = Error;

    fn try_from(r: TrigPolyRepr) -> Result<Self> {
        if r.half {
            if r.a0.is_some_and(|a| a != 0.0) {
                return Err(Error::Parse(
                    "anti-periodic polynomial cannot carry a0".into(),
                ));
            }
            Ok(TrigPoly::half(&r.cos, &r.sin))
        } else {
            Ok(TrigPoly::new(r.a0.unwrap_or(0.0), &r.cos, &r.sin))
        }
    }
}

impl From<TrigPoly> for TrigPolyRepr {
    fn from(p: TrigPoly) -> Self {
        match p.parity {
            Parity::Periodic => TrigPolyRepr {
                half: false,
                a0: Some(p.a0()),
                cos: p.cos.iter().skip(1).copied().collect(),
                sin: p.sin.iter().skip(1).copied().collect(),
            },
            Parity::AntiPeriodic => TrigPolyRepr {
                half: true,
                a0: None,
                cos: p.cos,
                sin: p.sin,
            },
        }
    }
}
