//! Linear differential operators `sum_k c_k(x) d^k/dx^k` with trigonometric coefficients.

use crate::trig::TrigPoly;

#[derive(Debug, Clone)]
pub struct DiffOp {
    coeffs: Vec<TrigPoly>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl DiffOp {
    /// `coeffs[k]` multiplies the `k`-th derivative.
    pub fn new(coeffs: Vec<TrigPoly>) -> Self {
        DiffOp { coeffs }
    }

    pub fn zero() -> Self {
        DiffOp { coeffs: Vec::new() }
    }

    pub fn multiplication(f: TrigPoly) -> Self {
        DiffOp { coeffs: vec![f] }
    }

    /// The Lie derivative `X d/dx + lambda X'` on weight-`lambda` densities.
    pub fn lie(x: &TrigPoly, lambda: f64) -> Self {
        DiffOp {
            coeffs: vec![x.derivative().scale(lambda), x.clone()],
        }
    }

    /// Coefficient of the `k`-th derivative; zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> TrigPoly {
        self.coeffs.get(k).cloned().unwrap_or_else(TrigPoly::zero)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Largest max-norm among coefficients of order `k` and above.
    pub fn tail_norm(&self, k: usize) -> f64 {
        self.coeffs
            .iter()
            .skip(k)
            .map(TrigPoly::max_norm)
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, f: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero();
        let mut d = f.clone();
        for c in &self.coeffs {
            out += &c.product(&d);
            d = d.derivative();
        }
        out
    }

    /// `self ∘ other`, using `d^i ∘ b = sum_l C(i,l) b^(l) d^(i-l)`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return DiffOp::zero();
        }
        let mut out = vec![TrigPoly::zero(); self.order() + other.order() + 1];
        for (j, b) in other.coeffs.iter().enumerate() {
            let mut db = b.clone();
            for l in 0..=self.order() {
                for i in l..=self.order() {
                    let term = self.coeffs[i].product(&db).scale(binomial(i, l));
                    out[i - l + j] += &term;
                }
                db = db.derivative();
            }
        }
        DiffOp { coeffs: out }
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(other.coeffs.len());
        DiffOp {
            coeffs: (0..n).map(|k| &self.coeff(k) - &other.coeff(k)).collect(),
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(other.coeffs.len());
        DiffOp {
            coeffs: (0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> DiffOp {
        DiffOp {
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// `self ∘ other - other ∘ self`.
    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        self.compose(other).sub(&other.compose(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_matches_application() {
        let a = DiffOp::new(vec![TrigPoly::cos_mode(1), TrigPoly::sin_mode(2), TrigPoly::constant(0.5)]);
        let b = DiffOp::lie(&TrigPoly::new(0.3, &[0.0, 1.0], &[0.7]), 1.5);
        let f = TrigPoly::new(0.1, &[0.2, -0.4], &[1.0, 0.0, 0.3]);
        let lhs = a.compose(&b).apply(&f);
        let rhs = a.apply(&b.apply(&f));
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn lie_operators_commute_to_bracket() {
        let x = TrigPoly::sin_mode(1);
        let y = TrigPoly::new(0.5, &[0.0, 1.0], &[]);
        let lam = -0.5;
        let c = DiffOp::lie(&x, lam).commutator(&DiffOp::lie(&y, lam));
        let br = &x.product(&y.derivative()) - &x.derivative().product(&y);
        let expected = DiffOp::lie(&br, lam);
        assert!(c.sub(&expected).tail_norm(0) < 1e-12);
    }
}
