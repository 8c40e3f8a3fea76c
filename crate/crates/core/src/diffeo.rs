//! Orientation-preserving circle diffeomorphisms `f(x) = x + c + p(x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, QuadratureGrid};
use crate::settings::Settings;
use crate::trig::TrigPoly;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DiffeoRepr", into = "DiffeoRepr")]
pub struct CircleDiffeo {
    shift: f64,
    p: TrigPoly,
    dp: TrigPoly,
    d2p: TrigPoly,
    d3p: TrigPoly,
    residual: f64,
}

#[derive(Serialize, Deserialize)]
struct DiffeoRepr {
    shift: f64,
    p: TrigPoly,
}

impl TryFrom<DiffeoRepr> for CircleDiffeo {
    type Error = Error;
    fn try_from(r: DiffeoRepr) -> Result<Self> {
        CircleDiffeo::new(r.shift, r.p)
    }
}

impl From<CircleDiffeo> for DiffeoRepr {
    fn from(f: CircleDiffeo) -> Self {
        DiffeoRepr {
            shift: f.shift,
            p: f.p,
        }
    }
}

impl CircleDiffeo {
    /// Builds `x + shift + p(x)`, folding the mean of `p` into the shift.
    ///
    /// Rejects maps whose derivative is not positive on a verification grid.
    pub fn new(shift: f64, p: TrigPoly) -> Result<Self> {
        if !p.is_periodic() {
            return Err(Error::ParityMismatch);
        }
        let f = Self::build(shift, p, 0.0);
        let m = (8 * (f.p.degree() + 1)).max(256).next_power_of_two();
        let min = QuadratureGrid::new(m)
            .nodes()
            .map(|x| f.d1(x))
            .fold(f64::INFINITY, f64::min);
        if min.is_nan() || min <= 0.0 {
            return Err(Error::NotOrientationPreserving {
                min_derivative: min,
            });
        }
        Ok(f)
    }

    fn build(shift: f64, p: TrigPoly, residual: f64) -> Self {
        let a0 = p.a0();
        let p = &p - &TrigPoly::constant(a0);
        let dp = p.derivative();
        let d2p = dp.derivative();
        let d3p = d2p.derivative();
        CircleDiffeo {
            shift: shift + a0,
            p,
            dp,
            d2p,
            d3p,
            residual,
        }
    }

    pub fn identity() -> Self {
        Self::build(0.0, TrigPoly::zero(), 0.0)
    }

    pub fn rotation(angle: f64) -> Self {
        Self::build(angle, TrigPoly::zero(), 0.0)
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Periodic part `p`, normalized to zero mean.
    pub fn periodic_part(&self) -> &TrigPoly {
        &self.p
    }

    /// Projection residual accumulated when this map was produced by an inexact operation.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn eval(&self, x: f64) -> f64 {
        x + self.shift + self.p.eval(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        1.0 + self.dp.eval(x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.d2p.eval(x)
    }

    pub fn d3(&self, x: f64) -> f64 {
        self.d3p.eval(x)
    }

    /// Max over `m` nodes of `|self(x) - other(x)|`.
    pub fn distance(&self, other: &CircleDiffeo, m: usize) -> f64 {
        QuadratureGrid::new(m)
            .nodes()
            .map(|x| (self.eval(x) - other.eval(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Solves `self(y) = target` by safeguarded Newton iteration.
    pub fn preimage(&self, target: f64, max_iter: usize) -> Result<f64> {
        let bound = self.p.l1_norm();
        let mut lo = target - self.shift - bound - 1e-12;
        let mut hi = target - self.shift + bound + 1e-12;
        let mut y = target - self.shift;
        let tol = 4.0 * f64::EPSILON * (1.0 + target.abs());
        for _ in 0..max_iter {
            let r = self.eval(y) - target;
            if r.abs() <= tol {
                return Ok(y);
            }
            if r > 0.0 {
                hi = hi.min(y);
            } else {
                lo = lo.max(y);
            }
            let mut next = y - r / self.d1(y);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - y).abs() <= 1e-16 * (1.0 + y.abs()) {
                return Ok(next);
            }
            y = next;
        }
        let r = self.eval(y) - target;
        if r.abs() <= 1e3 * tol {
            Ok(y)
        } else {
            Err(Error::NewtonDivergence { target })
        }
    }

    fn from_samples(shift: f64, samples: &[f64], cfg: &Settings) -> Result<Self> {
        let proj = grid::project(samples, cfg.degree_cap);
        let residual = proj.residual;
        let p = proj.within(cfg.eps_proj)?;
        let f = CircleDiffeo::new(shift, p)?;
        Ok(CircleDiffeo { residual, ..f })
    }
}

/// `g ∘ f`, projected to at most `degree_cap` modes.
pub fn compose(g: &CircleDiffeo, f: &CircleDiffeo, cfg: &Settings) -> Result<CircleDiffeo> {
    let grid = QuadratureGrid::new(cfg.grid_size());
    let samples: Vec<f64> = grid
        .nodes()
        .map(|x| f.p.eval(x) + g.p.eval(f.eval(x)))
        .collect();
    CircleDiffeo::from_samples(g.shift + f.shift, &samples, cfg)
}

/// Inverse map via a pointwise Newton solve on the projection grid.
pub fn invert(f: &CircleDiffeo, cfg: &Settings) -> Result<CircleDiffeo> {
    let grid = QuadratureGrid::new(cfg.grid_size());
    let samples = grid
        .nodes()
        .map(|x| Ok(f.preimage(x, cfg.newton_max_iter)? - x + f.shift))
        .collect::<Result<Vec<f64>>>()?;
    CircleDiffeo::from_samples(-f.shift, &samples, cfg)
}

/// Time-`t` map of the vector field `X(x) d/dx`, integrated per node with fixed-step RK4.
pub fn flow(field: &TrigPoly, t: f64, cfg: &Settings) -> Result<CircleDiffeo> {
    if t == 0.0 || field.is_zero() {
        return Ok(CircleDiffeo::identity());
    }
    let steps = ((t.abs() * cfg.flow_steps_per_unit as f64).ceil() as usize).max(16);
    let h = t / steps as f64;
    let grid = QuadratureGrid::new(cfg.grid_size());
    let samples: Vec<f64> = grid
        .nodes()
        .map(|x0| {
            let mut x = x0;
            for _ in 0..steps {
                let k1 = field.eval(x);
                let k2 = field.eval(x + 0.5 * h * k1);
                let k3 = field.eval(x + 0.5 * h * k2);
                let k4 = field.eval(x + h * k3);
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            x - x0
        })
        .collect();
    CircleDiffeo::from_samples(0.0, &samples, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn wobble() -> CircleDiffeo {
        CircleDiffeo::new(0.0, TrigPoly::sin_mode(1).scale(0.3)).unwrap()
    }

    #[test]
    fn rejects_folding_maps() {
        let err = CircleDiffeo::new(0.0, TrigPoly::sin_mode(1).scale(1.5)).unwrap_err();
        assert!(matches!(err, Error::NotOrientationPreserving { .. }));
    }

    #[test]
    fn equivariance_with_period() {
        let f = wobble();
        assert_abs_diff_eq!(f.eval(1.0 + 2.0 * PI), f.eval(1.0) + 2.0 * PI, epsilon = 1e-13);
    }

    #[test]
    fn compose_with_identity_and_rotations() {
        let cfg = Settings::default();
        let f = wobble();
        let g = compose(&CircleDiffeo::identity(), &f, &cfg).unwrap();
        assert!(g.distance(&f, 64) < 1e-14);
        let r = compose(&CircleDiffeo::rotation(0.4), &CircleDiffeo::rotation(0.5), &cfg).unwrap();
        assert_abs_diff_eq!(r.shift(), 0.9, epsilon = 1e-15);
        assert!(r.periodic_part().max_norm() < 1e-15);
    }

    #[test]
    fn inverse_round_trip() {
        let cfg = Settings::default();
        let f = wobble();
        let inv = invert(&f, &cfg).unwrap();
        assert_abs_diff_eq!(inv.eval(0.0), 0.0, epsilon = 1e-12);
        let id = compose(&f, &inv, &cfg).unwrap();
        assert!(id.distance(&CircleDiffeo::identity(), 128) < cfg.eps_proj);
        let rot = invert(&CircleDiffeo::rotation(0.7), &cfg).unwrap();
        assert_abs_diff_eq!(rot.shift(), -0.7, epsilon = 1e-14);
        assert!(invert(&CircleDiffeo::identity(), &cfg)
            .unwrap()
            .distance(&CircleDiffeo::identity(), 64)
            < 1e-15);
    }

    #[test]
    fn flows_of_simple_fields() {
        let cfg = Settings::default();
        assert!(flow(&TrigPoly::zero(), 1.0, &cfg)
            .unwrap()
            .distance(&CircleDiffeo::identity(), 64)
            < 1e-15);
        let rot = flow(&TrigPoly::constant(1.0), 0.8, &cfg).unwrap();
        assert_abs_diff_eq!(rot.eval(0.2), 1.0, epsilon = 1e-13);
        let s = flow(&TrigPoly::sin_mode(1), 0.9, &cfg).unwrap();
        assert_abs_diff_eq!(s.eval(PI), PI, epsilon = 1e-12);
    }
}
