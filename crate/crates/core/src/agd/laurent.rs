//! Exact Laurent polynomials in `(p, q)` and the Moyal star product.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

/// `Σ c_ij p^i q^j` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly2 {
    terms: BTreeMap<(i32, i32), BigRational>,
}

pub(crate) fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn binomial(m: usize, i: usize) -> BigRational {
    (0..i).fold(BigRational::one(), |acc, k| {
        acc * rational((m - k) as i64) / rational(k as i64 + 1)
    })
}

pub(crate) fn factorial(m: usize) -> BigRational {
    (1..=m).fold(BigRational::one(), |acc, k| acc * rational(k as i64))
}

/// Falling power `e (e-1) ... (e-n+1)` of an integer exponent.
fn falling_int(e: i32, n: usize) -> i64 {
    (0..n as i64).map(|k| e as i64 - k).product()
}

impl LaurentPoly2 {
    pub fn zero() -> Self {
        LaurentPoly2::default()
    }

    pub fn one() -> Self {
        LaurentPoly2::monomial(0, 0, BigRational::one())
    }

    /// `c p^i q^j`.
    pub fn monomial(i: i32, j: i32, c: BigRational) -> Self {
        let mut out = LaurentPoly2::zero();
        out.add_term(i, j, c);
        out
    }

    pub fn p() -> Self {
        LaurentPoly2::monomial(1, 0, BigRational::one())
    }

    pub fn q() -> Self {
        LaurentPoly2::monomial(0, 1, BigRational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i32, BigRational)>) -> Self {
        let mut out = LaurentPoly2::zero();
        for (i, j, c) in terms {
            out.add_term(i, j, c);
        }
        out
    }

    fn add_term(&mut self, i: i32, j: i32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: i32, j: i32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly2) -> LaurentPoly2 {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, s: &BigRational) -> LaurentPoly2 {
        if s.is_zero() {
            return LaurentPoly2::zero();
        }
        LaurentPoly2 {
            terms: self.terms.iter().map(|(k, c)| (*k, c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly2) -> LaurentPoly2 {
        let mut out = LaurentPoly2::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &other.terms {
                out.add_term(i + k, j + l, a * b);
            }
        }
        out
    }

    /// `∂_p^np ∂_q^nq`.
    pub fn partial(&self, np: usize, nq: usize) -> LaurentPoly2 {
        let mut out = LaurentPoly2::zero();
        for (&(i, j), c) in &self.terms {
            let f = falling_int(i, np) * falling_int(j, nq);
            if f != 0 {
                out.add_term(i - np as i32, j - nq as i32, c * rational(f));
            }
        }
        out
    }

    /// The common scalar `r` with `self = r * other`, if there is one.
    pub fn ratio_to(&self, other: &LaurentPoly2) -> Option<BigRational> {
        let (key, c) = other.terms.iter().next()?;
        let r = self.terms.get(key)? / c;
        (other.scale(&r) == *self).then_some(r)
    }
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) p^{i} q^{j}")?;
        }
        Ok(())
    }
}

fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

fn parse_int(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl Serialize for LaurentPoly2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Value> = self
            .terms
            .iter()
            .map(|(&(i, j), c)| {
                Value::Array(vec![
                    Value::from(i),
                    Value::from(j),
                    int_value(c.numer()),
                    int_value(c.denom()),
                ])
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Value>>::deserialize(d)?;
        let mut out = LaurentPoly2::zero();
        for row in rows {
            let bad = || D::Error::custom("expected [i, j, numerator, denominator]");
            if row.len() != 4 {
                return Err(bad());
            }
            let exp = |v: &Value| v.as_i64().and_then(|e| i32::try_from(e).ok()).ok_or_else(bad);
            let num = parse_int(&row[2]).ok_or_else(bad)?;
            let den = parse_int(&row[3]).ok_or_else(bad)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            out.add_term(exp(&row[0])?, exp(&row[1])?, BigRational::new(num, den));
        }
        Ok(out)
    }
}

/// `Σ_i (-1)^i C(m,i) ∂_p^{m-i} ∂_q^i F · ∂_p^i ∂_q^{m-i} G`.
pub fn moyal_term(f: &LaurentPoly2, g: &LaurentPoly2, m: usize) -> LaurentPoly2 {
    let mut out = LaurentPoly2::zero();
    for i in 0..=m {
        let mut c = binomial(m, i);
        if i % 2 == 1 {
            c = -c;
        }
        let term = f.partial(m - i, i).mul(&g.partial(i, m - i));
        out = out.add(&term.scale(&c));
    }
    out
}

pub fn poisson(f: &LaurentPoly2, g: &LaurentPoly2) -> LaurentPoly2 {
    moyal_term(f, g, 1)
}

/// Formal series in `ħ`, truncated after `order()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HbarSeries {
    pub coeffs: Vec<LaurentPoly2>,
}

impl HbarSeries {
    pub fn constant(f: LaurentPoly2, order: usize) -> Self {
        let mut coeffs = vec![LaurentPoly2::zero(); order + 1];
        coeffs[0] = f;
        HbarSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &LaurentPoly2 {
        &self.coeffs[n]
    }
}

/// Weight `1 / (2^m m!)` of the `ħ^m` term.
fn star_weight(m: usize) -> BigRational {
    BigRational::one() / (factorial(m) * rational(1i64 << m))
}

/// `F ⋆ G = Σ_m ħ^m {F,G}_m / (2^m m!)`, up to `ħ^order`.
pub fn star(f: &LaurentPoly2, g: &LaurentPoly2, order: usize) -> HbarSeries {
    HbarSeries {
        coeffs: (0..=order)
            .map(|m| moyal_term(f, g, m).scale(&star_weight(m)))
            .collect(),
    }
}

/// Star product of two series, truncated at the smaller order.
pub fn star_series(a: &HbarSeries, b: &HbarSeries) -> HbarSeries {
    let order = a.order().min(b.order());
    let mut coeffs = vec![LaurentPoly2::zero(); order + 1];
    for (i, x) in a.coeffs.iter().enumerate().take(order + 1) {
        for (j, y) in b.coeffs.iter().enumerate().take(order + 1 - i) {
            for m in 0..=order - i - j {
                let t = moyal_term(x, y, m).scale(&star_weight(m));
                coeffs[i + j + m] = coeffs[i + j + m].add(&t);
            }
        }
    }
    HbarSeries { coeffs }
}

/// Largest absolute coefficient, as a float.
pub fn residual_terms(x: &LaurentPoly2) -> f64 {
    x.terms
        .values()
        .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn moyal_anchors() {
        let (p, q) = (LaurentPoly2::p(), LaurentPoly2::q());
        assert_eq!(moyal_term(&p, &q, 1), LaurentPoly2::one());
        assert_eq!(moyal_term(&p, &q, 0), p.mul(&q));
        let f = LaurentPoly2::from_terms([(2, -1, r(3, 2)), (-1, 3, r(1, 1))]);
        let g = LaurentPoly2::from_terms([(1, 2, r(1, 1)), (0, -2, r(-2, 3))]);
        for m in 0..5 {
            let lhs = moyal_term(&f, &g, m);
            let rhs = moyal_term(&g, &f, m);
            let sign = if m % 2 == 0 { r(1, 1) } else { r(-1, 1) };
            assert_eq!(lhs, rhs.scale(&sign));
        }
    }

    #[test]
    fn star_anchors() {
        let (p, q) = (LaurentPoly2::p(), LaurentPoly2::q());
        let s = star(&p, &q, 3);
        assert_eq!(s.coeffs[0], p.mul(&q));
        assert_eq!(s.coeffs[1], LaurentPoly2::monomial(0, 0, r(1, 2)));
        assert!(s.coeffs[2].is_zero() && s.coeffs[3].is_zero());
        let f = LaurentPoly2::from_terms([(3, -2, r(5, 7))]);
        let t = star(&f, &LaurentPoly2::one(), 4);
        assert_eq!(t.coeffs[0], f);
        assert!(t.coeffs[1..].iter().all(LaurentPoly2::is_zero));
    }

    #[test]
    fn star_is_associative_on_anchor() {
        let p2 = LaurentPoly2::monomial(2, 0, r(1, 1));
        let q = LaurentPoly2::q();
        let k = 4;
        let lhs = star_series(&star(&p2, &q, k), &HbarSeries::constant(q.clone(), k));
        let rhs = star_series(&HbarSeries::constant(p2, k), &star(&q, &q, k));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_roundtrip() {
        let f = LaurentPoly2::from_terms([(2, -1, r(3, 2)), (-1, 3, r(-1, 5))]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "[[-1,3,-1,5],[2,-1,3,2]]");
        let back: LaurentPoly2 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
