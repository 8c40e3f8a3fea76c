//! Tensor densities `a(x) (dx)^lambda`, periodic or anti-periodic.

use serde::{Deserialize, Serialize};

use crate::diffeo::CircleDiffeo;
use crate::error::{Error, Result};
use crate::grid;
use crate::settings::Settings;
use crate::trig::{Parity, TrigPoly};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct Density {
    pub lambda: f64,
    pub value: TrigPoly,
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    lambda: f64,
    #[serde(default)]
    antiperiodic: bool,
    value: TrigPoly,
}

impl TryFrom<DensityRepr> for Density {
    type Error = Error;
    fn try_from(r: DensityRepr) -> Result<Self> {
        let anti = r.value.parity() == Parity::AntiPeriodic;
        if anti != r.antiperiodic && !r.value.is_zero() {
            return Err(Error::ParityMismatch);
        }
        let value = if r.value.is_zero() && r.antiperiodic {
            TrigPoly::zero_of(Parity::AntiPeriodic)
        } else {
            r.value
        };
        Ok(Density {
            lambda: r.lambda,
            value,
        })
    }
}

impl From<Density> for DensityRepr {
    fn from(d: Density) -> Self {
        DensityRepr {
            lambda: d.lambda,
            antiperiodic: d.is_antiperiodic(),
            value: d.value,
        }
    }
}

impl Density {
    pub fn new(lambda: f64, value: TrigPoly) -> Self {
        Density { lambda, value }
    }

    pub fn is_antiperiodic(&self) -> bool {
        self.value.parity() == Parity::AntiPeriodic
    }

    /// Pointwise product; weights add.
    pub fn product(&self, other: &Density) -> Density {
        Density::new(self.lambda + other.lambda, self.value.product(&other.value))
    }
}

/// `a ∘ g^{-1} ((g^{-1})')^lambda`, sampled and projected.
pub fn diffeo_act(g: &CircleDiffeo, a: &Density, cfg: &Settings) -> Result<Density> {
    if a.is_antiperiodic() {
        return Err(Error::AntiPeriodicTransport);
    }
    let m = cfg.grid_size();
    let lambda = a.lambda;
    let proj = grid::try_project_fn(m, cfg.degree_cap, |x| {
        let y = g.preimage(x, cfg.newton_max_iter)?;
        let jac = g.d1(y);
        assert!(jac > 0.0, "valid diffeomorphisms have positive derivative");
        Ok(a.value.eval(y) * (-lambda * jac.ln()).exp())
    })?;
    Ok(Density::new(lambda, proj.within(cfg.eps_proj)?))
}

/// Pullback `a(g(x)) g'(x)^lambda`, the action of `g^{-1}`, computed without inversion.
pub fn pullback(g: &CircleDiffeo, a: &Density, cfg: &Settings) -> Result<Density> {
    if a.is_antiperiodic() {
        return Err(Error::AntiPeriodicTransport);
    }
    let lambda = a.lambda;
    let proj = grid::project_fn(cfg.grid_size(), cfg.degree_cap, |x| {
        a.value.eval(g.eval(x)) * (lambda * g.d1(x).ln()).exp()
    });
    Ok(Density::new(lambda, proj.within(cfg.eps_proj)?))
}

/// `X a' + lambda X' a`.
pub fn lie_derivative(x: &TrigPoly, a: &Density) -> Density {
    let v = &x.product(&a.value.derivative()) + &x.derivative().product(&a.value).scale(a.lambda);
    Density::new(a.lambda, v)
}

/// `∫ a b dx` for weights summing to one.
pub fn pairing(a: &Density, b: &Density) -> Result<f64> {
    if (a.lambda + b.lambda - 1.0).abs() > 1e-12 {
        return Err(Error::WeightMismatch {
            lhs: a.lambda,
            rhs: b.lambda,
        });
    }
    if a.is_antiperiodic() != b.is_antiperiodic() {
        return Err(Error::ParityMismatch);
    }
    Ok(a.value.product(&b.value).integrate_period())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::{compose, flow};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn identity_and_rotation() {
        let cfg = Settings::default();
        let a = Density::new(1.5, TrigPoly::sin_mode(1));
        let same = diffeo_act(&CircleDiffeo::identity(), &a, &cfg).unwrap();
        assert!(same.value.approx_eq(&a.value, 1e-14));
        let r = diffeo_act(&CircleDiffeo::rotation(0.4), &a, &cfg).unwrap();
        let expected = TrigPoly::new(0.0, &[-(0.4f64).sin()], &[(0.4f64).cos()]);
        assert!(r.value.approx_eq(&expected, 1e-13));
    }

    #[test]
    fn functions_transport_by_inverse() {
        let cfg = Settings::default();
        let g = CircleDiffeo::new(0.0, TrigPoly::sin_mode(1).scale(0.3)).unwrap();
        let a = Density::new(0.0, TrigPoly::cos_mode(1));
        let b = diffeo_act(&g, &a, &cfg).unwrap();
        for x in [0.0, 0.5, 2.0, 4.0] {
            let y = g.preimage(x, 100).unwrap();
            assert_abs_diff_eq!(b.value.eval(x), y.cos(), epsilon = 1e-9);
        }
    }

    #[test]
    fn lie_derivative_examples() {
        let a = Density::new(2.0, TrigPoly::cos_mode(1));
        let l = lie_derivative(&TrigPoly::sin_mode(1), &a);
        assert!(l.value.approx_eq(&TrigPoly::new(0.5, &[0.0, 1.5], &[]), 1e-15));
        let t = lie_derivative(&TrigPoly::constant(1.0), &a);
        assert!(t.value.approx_eq(&a.value.derivative(), 1e-15));
    }

    #[test]
    fn pairing_examples() {
        let two = Density::new(2.0, TrigPoly::sin_mode(1));
        let field = Density::new(-1.0, TrigPoly::cos_mode(1));
        assert_abs_diff_eq!(pairing(&two, &field).unwrap(), 0.0, epsilon = 1e-15);
        let one = Density::new(2.0, TrigPoly::constant(1.0));
        let unit = Density::new(-1.0, TrigPoly::constant(1.0));
        assert_abs_diff_eq!(pairing(&one, &unit).unwrap(), 2.0 * PI, epsilon = 1e-14);
        let h1 = Density::new(1.5, TrigPoly::half_sin_mode(0));
        let h2 = Density::new(-0.5, TrigPoly::half_sin_mode(0));
        assert_abs_diff_eq!(pairing(&h1, &h2).unwrap(), PI, epsilon = 1e-14);
        assert!(matches!(
            pairing(&one, &one),
            Err(Error::WeightMismatch { .. })
        ));
    }

    #[test]
    fn anti_periodic_transport_is_rejected() {
        let h = Density::new(-0.5, TrigPoly::half_cos_mode(0));
        let err = diffeo_act(&CircleDiffeo::identity(), &h, &Settings::default()).unwrap_err();
        assert_eq!(err, Error::AntiPeriodicTransport);
    }

    #[test]
    fn action_law_and_pullback() {
        let cfg = Settings::default();
        let g = CircleDiffeo::new(0.2, TrigPoly::sin_mode(1).scale(0.2)).unwrap();
        let h = CircleDiffeo::new(-0.1, TrigPoly::cos_mode(2).scale(0.1)).unwrap();
        let a = Density::new(-0.5, TrigPoly::new(0.3, &[1.0], &[0.0, 0.5]));
        let lhs = diffeo_act(&g, &diffeo_act(&h, &a, &cfg).unwrap(), &cfg).unwrap();
        let rhs = diffeo_act(&compose(&g, &h, &cfg).unwrap(), &a, &cfg).unwrap();
        assert!(lhs.value.distance(&rhs.value) < 10.0 * cfg.eps_proj);
        let back = pullback(&g, &diffeo_act(&g, &a, &cfg).unwrap(), &cfg).unwrap();
        assert!(back.value.distance(&a.value) < 10.0 * cfg.eps_proj);
    }

    #[test]
    fn flow_derivative_is_minus_lie() {
        let cfg = Settings::default();
        let x = TrigPoly::new(0.2, &[0.5], &[0.3]);
        let a = Density::new(1.5, TrigPoly::new(0.0, &[0.4], &[0.0, 0.6]));
        let h = 1e-3;
        let p = diffeo_act(&flow(&x, h, &cfg).unwrap(), &a, &cfg).unwrap();
        let m = diffeo_act(&flow(&x, -h, &cfg).unwrap(), &a, &cfg).unwrap();
        let fd = (&p.value - &m.value).scale(0.5 / h);
        let l = lie_derivative(&x, &a).value.scale(-1.0);
        assert!(fd.distance(&l) < 1e-5);
    }
}
