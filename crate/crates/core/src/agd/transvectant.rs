//! sl2-equivariant bilinear operations on densities, the homogeneous lift to the
//! plane, and the second-order Lie derivative.
//!
//! Chart computations use the affine coordinate `t = tan(x/2)`, in which the
//! fields `1, t, t^2` generate the projective action. On the circle the same
//! operations have constant coefficients, obtained by Taylor expansion at `t = 0`.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::laurent::{binomial, factorial, moyal_term, rational, LaurentPoly2};
use crate::density::Density;
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::trig::TrigPoly;

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite weight")
}

fn falling(k: &BigRational, n: usize) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, i| acc * (k - rational(i as i64)))
}

fn sign(i: usize) -> BigRational {
    if i.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// Coefficient of `φ^{(i)} ψ^{(m-i)}` in the flat transvectant of weights `λ, μ`.
pub fn chart_coefficients(lambda: f64, mu: f64, m: usize) -> Vec<BigRational> {
    let a = exact(2.0 * lambda) + rational(m as i64 - 1);
    let b = exact(2.0 * mu) + rational(m as i64 - 1);
    (0..=m)
        .map(|i| sign(i) * binomial(m, i) * falling(&a, m - i) * falling(&b, i))
        .collect()
}

/// `t^a (dt)^λ` in the affine chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomialDensity {
    pub exponent: i32,
    pub weight: f64,
}

impl MonomialDensity {
    pub fn new(exponent: i32, weight: f64) -> Self {
        MonomialDensity { exponent, weight }
    }
}

/// `q^a p^{-2λ-a}`.
pub fn lift(phi: &MonomialDensity) -> Result<LaurentPoly2> {
    let twice = 2.0 * phi.weight;
    if twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
        return Err(Error::NonIntegerExponent { weight: phi.weight });
    }
    let a = phi.exponent;
    Ok(LaurentPoly2::monomial(-(twice as i32) - a, a, BigRational::one()))
}

/// Flat transvectant of two monomials: a rational multiple of `t^{a+b-m} (dt)^{λ+μ+m}`.
pub fn monomial_transvectant(
    phi: &MonomialDensity,
    psi: &MonomialDensity,
    m: usize,
) -> (BigRational, MonomialDensity) {
    let (a, b) = (phi.exponent, psi.exponent);
    let coeffs = chart_coefficients(phi.weight, psi.weight, m);
    let c = coeffs.iter().enumerate().fold(BigRational::zero(), |acc, (i, k)| {
        acc + k * falling(&rational(a as i64), i) * falling(&rational(b as i64), m - i)
    });
    let out = MonomialDensity::new(a + b - m as i32, phi.weight + psi.weight + m as f64);
    (c, out)
}

/// Lie derivative along the chart field `t^e d/dt`.
pub fn monomial_lie(e: i32, phi: &MonomialDensity) -> (BigRational, MonomialDensity) {
    let c = rational(phi.exponent as i64) + exact(phi.weight) * rational(e as i64);
    (c, MonomialDensity::new(phi.exponent + e - 1, phi.weight))
}

/// Both sides of the lift correspondence: the lifted transvectant and the Moyal term of the lifts.
pub fn lift_correspondence(
    phi: &MonomialDensity,
    psi: &MonomialDensity,
    m: usize,
) -> Result<(LaurentPoly2, LaurentPoly2)> {
    let (c, out) = monomial_transvectant(phi, psi, m);
    let lifted = lift(&out)?.scale(&c);
    let moyal = moyal_term(&lift(phi)?, &lift(psi)?, m);
    Ok((lifted, moyal))
}

/// The scalar `r` with `moyal = r * lifted`; `None` when both sides vanish.
pub fn lift_constant(phi: &MonomialDensity, psi: &MonomialDensity, m: usize) -> Result<Option<BigRational>> {
    let (lifted, moyal) = lift_correspondence(phi, psi, m)?;
    if lifted.is_zero() && moyal.is_zero() {
        return Ok(None);
    }
    match moyal.ratio_to(&lifted) {
        Some(r) => Ok(Some(r)),
        None => Err(Error::ActionMismatch {
            residual: f64::INFINITY,
            tolerance: 0.0,
        }),
    }
}

type Series = Vec<BigRational>;

fn series_mul(a: &Series, b: &Series) -> Series {
    let n = a.len();
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `D[i][k]`: the `i`-th t-derivative at `t = 0` of `(1+t^2)^{-λ} φ(2 arctan t)` in terms of `φ^{(k)}(0)`.
fn chart_jet(lambda: &BigRational, m: usize) -> Vec<Series> {
    let n = m + 1;
    let mut weight = vec![BigRational::zero(); n];
    let neg = -lambda.clone();
    for k in (0..n).step_by(2) {
        weight[k] = falling(&neg, k / 2) / factorial(k / 2);
    }
    let mut angle = vec![BigRational::zero(); n];
    for k in (1..n).step_by(2) {
        angle[k] = sign(k / 2) * rational(2) / rational(k as i64);
    }
    let mut power = vec![BigRational::zero(); n];
    power[0] = BigRational::one();
    let mut jet = vec![vec![BigRational::zero(); n]; n];
    for k in 0..n {
        let term = series_mul(&weight, &power);
        let scale = factorial(k);
        for (i, row) in jet.iter_mut().enumerate() {
            row[k] = &term[i] * factorial(i) / &scale;
        }
        power = series_mul(&power, &angle);
    }
    jet
}

/// Coefficient `c[k][l]` of `φ^{(k)} ψ^{(l)}` in the circle transvectant.
pub fn circle_coefficients(lambda: f64, mu: f64, m: usize) -> Vec<Vec<BigRational>> {
    let flat = chart_coefficients(lambda, mu, m);
    let (dl, dm) = (chart_jet(&exact(lambda), m), chart_jet(&exact(mu), m));
    let norm = BigRational::one() / rational(1i64 << m);
    let mut out = vec![vec![BigRational::zero(); m + 1]; m + 1];
    for (i, f) in flat.iter().enumerate() {
        let j = m - i;
        for (k, row) in out.iter_mut().enumerate() {
            for (l, c) in row.iter_mut().enumerate() {
                *c += f * &dl[i][k] * &dm[j][l] * &norm;
            }
        }
    }
    out
}

fn to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

/// `m`-th transvectant of two circle densities; weight `λ + μ + m`.
pub fn transvectant(phi: &Density, psi: &Density, m: usize) -> Density {
    let coeffs = circle_coefficients(phi.lambda, psi.lambda, m);
    let dphi: Vec<TrigPoly> = (0..=m).map(|k| phi.value.nth_derivative(k)).collect();
    let dpsi: Vec<TrigPoly> = (0..=m).map(|k| psi.value.nth_derivative(k)).collect();
    let mut out = TrigPoly::zero();
    for (k, row) in coeffs.iter().enumerate() {
        for (l, c) in row.iter().enumerate() {
            if !c.is_zero() {
                out += &dphi[k].product(&dpsi[l]).scale(to_f64(c));
            }
        }
    }
    Density::new(phi.lambda + psi.lambda + m as f64, out)
}

/// `ψ ↦ transvectant(φ, ψ, m)` for `ψ` of weight `mu`, as a differential operator.
pub fn transvectant_operator(phi: &Density, mu: f64, m: usize) -> DiffOp {
    let coeffs = circle_coefficients(phi.lambda, mu, m);
    let dphi: Vec<TrigPoly> = (0..=m).map(|k| phi.value.nth_derivative(k)).collect();
    let ops = (0..=m)
        .map(|l| {
            let mut c = TrigPoly::zero();
            for (k, row) in coeffs.iter().enumerate() {
                if !row[l].is_zero() {
                    c += &dphi[k].scale(to_f64(&row[l]));
                }
            }
            c
        })
        .collect();
    DiffOp::new(ops)
}

/// `L²_Z φ`, the second transvectant with a weight `-2` density `Z`.
pub fn second_lie(z: &TrigPoly, phi: &Density) -> Density {
    transvectant(&Density::new(-2.0, z.clone()), phi, 2)
}

pub fn second_lie_operator(z: &TrigPoly, lambda: f64) -> DiffOp {
    transvectant_operator(&Density::new(-2.0, z.clone()), lambda, 2)
}
