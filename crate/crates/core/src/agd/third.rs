//! Third-order operators `d³ + u d + u'/2 + w` from weight -1 to weight 2 densities.

use serde::{Deserialize, Serialize};

use super::transvectant::second_lie_operator;
use crate::density::{self, Density};
use crate::diffeo::CircleDiffeo;
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::grid;
use crate::settings::Settings;
use crate::sturm::SturmLiouville;
use crate::trig::TrigPoly;
use crate::virasoro::{self, CocycleKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThirdOrderOp {
    pub u: TrigPoly,
    pub w: TrigPoly,
}

impl ThirdOrderOp {
    pub fn new(u: TrigPoly, w: TrigPoly) -> Self {
        ThirdOrderOp { u, w }
    }

    /// Recovers `(u, w)` from the zeroth- and first-order coefficients.
    pub fn from_coefficients(u: TrigPoly, v: TrigPoly) -> Self {
        let w = &v - &u.derivative().scale(0.5);
        ThirdOrderOp { u, w }
    }

    pub fn v(&self) -> TrigPoly {
        &self.w + &self.u.derivative().scale(0.5)
    }

    pub fn operator(&self) -> DiffOp {
        DiffOp::new(vec![
            self.v(),
            self.u.clone(),
            TrigPoly::zero(),
            TrigPoly::constant(1.0),
        ])
    }

    pub fn distance(&self, other: &ThirdOrderOp) -> f64 {
        self.u.distance(&other.u).max(self.w.distance(&other.w))
    }
}

fn ensure_first_order(comm: &DiffOp, tol: f64) -> Result<()> {
    for k in 2..=comm.order() {
        let residual = comm.coeff(k).max_norm();
        if residual > tol {
            return Err(Error::NotTangent { order: k, residual });
        }
    }
    Ok(())
}

/// `(Xu' + 2X'u + 2X''', Xw' + 3X'w)`, checked against `L_X^{(2)} A - A L_X^{(-1)}`.
pub fn third_vect_act(x: &TrigPoly, a: &ThirdOrderOp, tol: f64) -> Result<(TrigPoly, TrigPoly)> {
    let x1 = x.derivative();
    let du = &(&x.product(&a.u.derivative()) + &x1.product(&a.u).scale(2.0)) + &x1.nth_derivative(2).scale(2.0);
    let dw = &x.product(&a.w.derivative()) + &x1.product(&a.w).scale(3.0);

    let op = a.operator();
    let comm = DiffOp::lie(x, 2.0).compose(&op).sub(&op.compose(&DiffOp::lie(x, -1.0)));
    ensure_first_order(&comm, tol)?;
    let symbolic = ThirdOrderOp::from_coefficients(comm.coeff(1), comm.coeff(0));
    let residual = symbolic.u.distance(&du).max(symbolic.w.distance(&dw));
    if residual > tol {
        return Err(Error::ActionMismatch {
            residual,
            tolerance: tol,
        });
    }
    Ok((du, dw))
}

/// Transport `g_2 ∘ A ∘ g_{-1}^{-1}`, by conjugation on test densities and by the closed form
/// `u ↦ (u - 2 S(g)) / g'^2`, `w ↦ w / g'^3` evaluated at the preimage.
pub fn third_diffeo_act(g: &CircleDiffeo, a: &ThirdOrderOp, cfg: &Settings) -> Result<ThirdOrderOp> {
    let op = a.operator();
    let conj = |phi: &TrigPoly| -> Result<TrigPoly> {
        let pulled = density::pullback(g, &Density::new(-1.0, phi.clone()), cfg)?;
        let image = Density::new(2.0, op.apply(&pulled.value));
        Ok(density::diffeo_act(g, &image, cfg)?.value)
    };
    let v = conj(&TrigPoly::constant(1.0))?;
    let rest = |phi: &TrigPoly| -> Result<TrigPoly> {
        Ok(&(&conj(phi)? - &phi.nth_derivative(3)) - &v.product(phi))
    };
    let (c, s) = (TrigPoly::cos_mode(1), TrigPoly::sin_mode(1));
    let (rc, rs) = (rest(&c)?, rest(&s)?);
    let u = &rs.product(&c) - &rc.product(&s);
    let c2 = TrigPoly::cos_mode(2);
    let second_order = &rest(&c2)? - &u.product(&c2.derivative());
    let conjugated = ThirdOrderOp::from_coefficients(u, v);

    let closed_u = grid::try_project_fn(cfg.grid_size(), cfg.degree_cap, |y| {
        let x = g.preimage(y, cfg.newton_max_iter)?;
        let d1 = g.d1(x);
        let s = virasoro::schwarzian_at(g, x, CocycleKind::Standard);
        Ok((a.u.eval(x) - 2.0 * s) / (d1 * d1))
    })?
    .within(cfg.eps_proj)?;
    let closed_w = grid::try_project_fn(cfg.grid_size(), cfg.degree_cap, |y| {
        let x = g.preimage(y, cfg.newton_max_iter)?;
        Ok(a.w.eval(x) / g.d1(x).powi(3))
    })?
    .within(cfg.eps_proj)?;
    let closed = ThirdOrderOp::new(closed_u, closed_w);

    // The conjugation route differentiates projected data three times, which
    // amplifies truncation noise in the top modes; compare on the lower half.
    let band = cfg.degree_cap / 2;
    let tolerance = 10.0 * cfg.eps_proj;
    let residual = [
        closed.u.truncated(band).distance(&conjugated.u.truncated(band)),
        closed.w.truncated(band).distance(&conjugated.w.truncated(band)),
        second_order.truncated(band).max_norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if residual > tolerance {
        return Err(Error::ActionMismatch { residual, tolerance });
    }
    Ok(closed)
}

/// Linear functionals generating the Hamiltonian fields on third-order operators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data")]
pub enum Functional {
    /// A vector field, acting through the Lie derivative.
    X(TrigPoly),
    /// A weight -2 density, acting through the second-order Lie derivative.
    Z(TrigPoly),
}

/// Commutator `L²_Z^{(2)} ∘ A - A ∘ L²_Z^{(-1)}` as a differential operator.
pub fn second_lie_commutator(z: &TrigPoly, a: &ThirdOrderOp) -> DiffOp {
    let op = a.operator();
    second_lie_operator(z, 2.0)
        .compose(&op)
        .sub(&op.compose(&second_lie_operator(z, -1.0)))
}

/// Second-order part of `second_lie_commutator`; it equals `24 (Z (u - 1))'`.
pub fn second_lie_defect(z: &TrigPoly, a: &ThirdOrderOp) -> TrigPoly {
    second_lie_commutator(z, a).coeff(2)
}

/// `second_lie_commutator` plus the commutator with multiplication by `8 Z (u - 1)`,
/// which removes the second-order part.
pub fn compensated_second_lie_commutator(z: &TrigPoly, a: &ThirdOrderOp) -> DiffOp {
    let op = a.operator();
    let f = DiffOp::multiplication(z.product(&(&a.u - &TrigPoly::constant(1.0))).scale(8.0));
    second_lie_commutator(z, a).add(&f.commutator(&op))
}

/// `(δu, δv)`, the first- and zeroth-order coefficients of the induced variation of `A`.
pub fn agd_field(f: &Functional, a: &ThirdOrderOp, tol: f64) -> Result<(TrigPoly, TrigPoly)> {
    match f {
        Functional::X(x) => {
            let (du, dw) = third_vect_act(x, a, tol)?;
            let dv = &dw + &du.derivative().scale(0.5);
            Ok((du, dv))
        }
        Functional::Z(z) => {
            let comm = second_lie_commutator(z, a);
            ensure_first_order(&comm, tol)?;
            Ok((comm.coeff(1), comm.coeff(0)))
        }
    }
}

/// `4 d²/dx² + u`.
pub fn project_to_sturm(a: &ThirdOrderOp) -> SturmLiouville {
    SturmLiouville::new(4.0, a.u.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::flow;
    use crate::sturm::sl_diffeo_act;

    fn sample_op() -> ThirdOrderOp {
        ThirdOrderOp::new(
            TrigPoly::new(0.4, &[0.3, -0.1], &[0.2]),
            TrigPoly::new(-0.2, &[0.1], &[0.0, 0.25]),
        )
    }

    #[test]
    fn vect_act_examples() {
        let a = sample_op();
        let (du, dw) = third_vect_act(&TrigPoly::constant(1.0), &a, 1e-10).unwrap();
        assert!(du.approx_eq(&a.u.derivative(), 1e-14));
        assert!(dw.approx_eq(&a.w.derivative(), 1e-14));
        let zero = ThirdOrderOp::new(TrigPoly::zero(), TrigPoly::zero());
        let x = TrigPoly::new(0.0, &[0.5], &[0.0, 0.3]);
        let (du, dw) = third_vect_act(&x, &zero, 1e-10).unwrap();
        assert!(du.approx_eq(&x.nth_derivative(3).scale(2.0), 1e-14));
        assert!(dw.is_zero());
    }

    #[test]
    fn diffeo_act_matches_closed_form_and_projection() {
        let cfg = Settings::default();
        let g = CircleDiffeo::new(0.3, TrigPoly::new(0.0, &[0.1], &[0.05, 0.02])).unwrap();
        let a = sample_op();
        let moved = third_diffeo_act(&g, &a, &cfg).unwrap();
        let lhs = project_to_sturm(&moved);
        let rhs = sl_diffeo_act(&g, &project_to_sturm(&a), &cfg).unwrap();
        assert!(lhs.u.distance(&rhs.u) < 1e-8);
        let r = third_diffeo_act(&CircleDiffeo::rotation(0.7), &a, &cfg).unwrap();
        assert!((r.w.eval(1.0) - a.w.eval(0.3)).abs() < 1e-12);
    }

    #[test]
    fn flow_derivative_matches_vect_act() {
        let cfg = Settings::default();
        let a = sample_op();
        let x = TrigPoly::new(0.1, &[0.2], &[0.3]);
        let h = 1e-3;
        let fwd = third_diffeo_act(&flow(&x, h, &cfg).unwrap(), &a, &cfg).unwrap();
        let back = third_diffeo_act(&flow(&x, -h, &cfg).unwrap(), &a, &cfg).unwrap();
        let (du, dw) = third_vect_act(&x, &a, 1e-10).unwrap();
        let fd_u = (&fwd.u - &back.u).scale(0.5 / h);
        let fd_w = (&fwd.w - &back.w).scale(0.5 / h);
        assert!(fd_u.distance(&du.scale(-1.0)) < 1e-5);
        assert!(fd_w.distance(&dw.scale(-1.0)) < 1e-5);
    }

    #[test]
    fn second_lie_tangency_needs_standard_structure() {
        let z = TrigPoly::new(0.2, &[0.1, 0.4], &[0.3, 0.0, 0.1]);
        let standard = ThirdOrderOp::new(TrigPoly::constant(1.0), TrigPoly::cos_mode(2));
        agd_field(&Functional::Z(z.clone()), &standard, 1e-9).unwrap();
        let a = sample_op();
        assert!(matches!(
            agd_field(&Functional::Z(z.clone()), &a, 1e-9),
            Err(Error::NotTangent { order: 2, .. })
        ));
        let predicted = z.product(&(&a.u - &TrigPoly::constant(1.0))).derivative().scale(24.0);
        assert!(second_lie_defect(&z, &a).distance(&predicted) < 1e-12);
        assert!(compensated_second_lie_commutator(&z, &a).tail_norm(2) < 1e-12);
        let (du, dv) = agd_field(&Functional::Z(TrigPoly::zero()), &a, 1e-9).unwrap();
        assert!(du.is_zero() && dv.is_zero());
    }
}
