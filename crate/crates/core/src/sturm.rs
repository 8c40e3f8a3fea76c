//! Sturm-Liouville operators `a d^2/dx^2 + u(x)` acting from `F_{-1/2}` to `F_{3/2}`.

use nalgebra::{Matrix2, Matrix4x3, Vector4};
use serde::{Deserialize, Serialize};

use crate::density::{self, Density};
use crate::diffeo::CircleDiffeo;
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::grid;
use crate::settings::Settings;
use crate::trig::TrigPoly;
use crate::virasoro::{self, CocycleKind, VirasoroCovector};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SturmLiouville {
    pub a: f64,
    pub u: TrigPoly,
}

impl SturmLiouville {
    pub fn new(a: f64, u: TrigPoly) -> Self {
        SturmLiouville { a, u }
    }

    /// `(u, c) -> -2c d^2/dx^2 + u`.
    pub fn from_covector(mu: &VirasoroCovector) -> Self {
        SturmLiouville::new(-2.0 * mu.c, mu.u.clone())
    }

    pub fn to_covector(&self) -> VirasoroCovector {
        VirasoroCovector::new(self.u.clone(), -0.5 * self.a)
    }

    pub fn operator(&self) -> DiffOp {
        DiffOp::new(vec![
            self.u.clone(),
            TrigPoly::zero(),
            TrigPoly::constant(self.a),
        ])
    }

    pub fn apply(&self, psi: &TrigPoly) -> TrigPoly {
        &psi.nth_derivative(2).scale(self.a) + &self.u.product(psi)
    }
}

/// Transport `g_{3/2} ∘ L ∘ g_{-1/2}^{-1}`.
///
/// The operator conjugation is carried out on test densities and checked
/// against the pointwise closed form; the closed form is returned.
pub fn sl_diffeo_act(g: &CircleDiffeo, l: &SturmLiouville, cfg: &Settings) -> Result<SturmLiouville> {
    let conj = |phi: &TrigPoly| -> Result<TrigPoly> {
        let pulled = density::pullback(g, &Density::new(-0.5, phi.clone()), cfg)?;
        let image = Density::new(1.5, l.apply(&pulled.value));
        Ok(density::diffeo_act(g, &image, cfg)?.value)
    };
    let potential = conj(&TrigPoly::constant(1.0))?;
    let (c, s) = (TrigPoly::cos_mode(1), TrigPoly::sin_mode(1));
    let rest = |phi: &TrigPoly| -> Result<TrigPoly> {
        Ok(&(&conj(phi)? - &phi.nth_derivative(2).scale(l.a)) - &potential.product(phi))
    };
    let (rc, rs) = (rest(&c)?, rest(&s)?);
    let first_order = &rs.product(&c) - &rc.product(&s);
    let residual = first_order.max_norm();
    if residual > 100.0 * cfg.eps_proj {
        return Err(Error::NotSturmLiouville { residual });
    }

    let closed = grid::try_project_fn(cfg.grid_size(), cfg.degree_cap, |y| {
        let x = g.preimage(y, cfg.newton_max_iter)?;
        let d1 = g.d1(x);
        let s = virasoro::schwarzian_at(g, x, CocycleKind::Standard);
        Ok((l.u.eval(x) - 0.5 * l.a * s) / (d1 * d1))
    })?
    .within(cfg.eps_proj)?;
    let mismatch = closed.distance(&potential);
    if mismatch > 10.0 * cfg.eps_proj {
        return Err(Error::ActionMismatch {
            residual: mismatch,
            tolerance: 10.0 * cfg.eps_proj,
        });
    }
    Ok(SturmLiouville::new(l.a, closed))
}

/// `L_X^{3/2} ∘ L - L ∘ L_X^{-1/2}`, which must be a multiplication operator.
pub fn sl_vect_act(x: &TrigPoly, l: &SturmLiouville, tol: f64) -> Result<TrigPoly> {
    let op = l.operator();
    let comm = DiffOp::lie(x, 1.5).compose(&op).sub(&op.compose(&DiffOp::lie(x, -0.5)));
    for k in 1..=comm.order() {
        let residual = comm.coeff(k).max_norm();
        if residual > tol {
            return Err(Error::NotTangent { order: k, residual });
        }
    }
    Ok(comm.coeff(0))
}

/// Fundamental matrices of `a psi'' + u psi = 0` on an equispaced grid over one period.
#[derive(Debug, Clone)]
pub struct FundamentalPath {
    /// `nodes[j]` maps initial data `(psi, psi')(0)` to `(psi, psi')(2 pi j / steps)`.
    pub nodes: Vec<Matrix2<f64>>,
    pub wronskian_drift: f64,
}

impl FundamentalPath {
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn monodromy(&self) -> Matrix2<f64> {
        self.nodes[self.steps()]
    }

    /// Clockwise rotation of the solution vector `T(x) v` accumulated over the period.
    pub fn rotation(&self, v: [f64; 2]) -> f64 {
        let v = nalgebra::Vector2::new(v[0], v[1]);
        let mut total = 0.0;
        let mut prev = self.nodes[0] * v;
        for t in &self.nodes[1..] {
            let cur = t * v;
            total += (prev.x * cur.y - prev.y * cur.x).atan2(prev.dot(&cur));
            prev = cur;
        }
        -total
    }
}

fn rk4_propagator(a: f64, u: &TrigPoly, x: f64, h: f64) -> Matrix2<f64> {
    let gen = |x: f64| Matrix2::new(0.0, 1.0, -u.eval(x) / a, 0.0);
    let (a0, am, a1) = (gen(x), gen(x + 0.5 * h), gen(x + h));
    let id = Matrix2::identity();
    let k1 = a0;
    let k2 = am * (id + k1 * (0.5 * h));
    let k3 = am * (id + k2 * (0.5 * h));
    let k4 = a1 * (id + k3 * h);
    id + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// RK4 integration of the first-order system; the step count is rounded up to a
/// power of two and doubled while any single step turns some vector by a quarter turn.
pub fn fundamental_path(l: &SturmLiouville, steps: usize, cfg: &Settings) -> Result<FundamentalPath> {
    if l.a == 0.0 {
        return Err(Error::DegenerateOperator);
    }
    let mut steps = steps.max(4).next_power_of_two();
    'refine: loop {
        let h = 2.0 * std::f64::consts::PI / steps as f64;
        let mut nodes = Vec::with_capacity(steps + 1);
        let mut t = Matrix2::identity();
        nodes.push(t);
        let mut drift: f64 = 0.0;
        let n = steps;
        for j in 0..n {
            let s = rk4_propagator(l.a, &l.u, j as f64 * h, h);
            if (s - Matrix2::identity()).norm() >= 0.5 && n < (1 << 22) {
                steps = 2 * n;
                continue 'refine;
            }
            t = s * t;
            // det T is formed from products of size |T|^2, so measure against that.
            let size = (0.5 * t.norm_squared()).max(1.0);
            drift = drift.max((t.determinant() - 1.0).abs() / size);
            nodes.push(t);
        }
        if drift > cfg.wronskian_tol {
            return Err(Error::StepCountTooSmall {
                drift,
                tolerance: cfg.wronskian_tol,
            });
        }
        return Ok(FundamentalPath {
            nodes,
            wronskian_drift: drift,
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonodromyClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromyInvariant {
    pub trace: f64,
    pub lift_index: i64,
    pub class: MonodromyClass,
}

const PARABOLIC_TOL: f64 = 1e-8;

pub fn classify(trace: f64) -> MonodromyClass {
    let gap = trace.abs() - 2.0;
    if gap.abs() <= PARABOLIC_TOL {
        MonodromyClass::Parabolic
    } else if gap < 0.0 {
        MonodromyClass::Elliptic
    } else {
        MonodromyClass::Hyperbolic
    }
}

fn real_eigenvector(m: &Matrix2<f64>) -> [f64; 2] {
    let tr = m.trace();
    let disc = (tr * tr - 4.0 * m.determinant()).max(0.0).sqrt();
    let lam = 0.5 * (tr + tr.signum() * disc);
    let v1 = [m[(0, 1)], lam - m[(0, 0)]];
    let v2 = [lam - m[(1, 1)], m[(1, 0)]];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    let scale = m.norm().max(1.0);
    if n1.max(n2) <= 1e-9 * scale {
        [0.0, 1.0]
    } else if n1 >= n2 {
        v1
    } else {
        v2
    }
}

/// Trace, class, and the number of half-turns of the lifted monodromy.
///
/// For elliptic classes every solution turns by the same number of half-turns
/// (rounded down), so the solution vanishing at zero is used. Otherwise a real
/// eigen-solution turns by an exact multiple of a half-turn and that multiple is used.
pub fn monodromy_invariant(path: &FundamentalPath) -> MonodromyInvariant {
    let m = path.monodromy();
    let trace = m.trace();
    let class = classify(trace);
    let half_turns = |r: f64| r / std::f64::consts::PI;
    let lift_index = match class {
        MonodromyClass::Elliptic => half_turns(path.rotation([0.0, 1.0])).floor() as i64,
        _ => half_turns(path.rotation(real_eigenvector(&m))).round() as i64,
    };
    MonodromyInvariant {
        trace,
        lift_index,
        class,
    }
}

pub fn monodromy(l: &SturmLiouville, steps: usize, cfg: &Settings) -> Result<(MonodromyInvariant, f64)> {
    let path = fundamental_path(l, steps, cfg)?;
    Ok((monodromy_invariant(&path), path.wronskian_drift))
}

/// Solutions `psi_1, psi_2` (W = 1) and their variations under `u -> u + s u_dot`,
/// sampled on `steps` equispaced nodes plus the endpoint.
struct Variation {
    psi: Vec<[f64; 2]>,
    dpsi: Vec<[f64; 2]>,
    m: Matrix2<f64>,
    dm: Matrix2<f64>,
}

fn integrate_variation(l: &SturmLiouville, u_dot: &TrigPoly, steps: usize) -> Variation {
    type State = [[f64; 4]; 2];
    let a = l.a;
    let rhs = |x: f64, s: &State| -> State {
        let (u, du) = (l.u.eval(x), u_dot.eval(x));
        let mut out = [[0.0; 4]; 2];
        for (o, c) in out.iter_mut().zip(s) {
            *o = [c[1], -u * c[0] / a, c[3], -(u * c[2] + du * c[0]) / a];
        }
        out
    };
    let axpy = |s: &State, k: &State, h: f64| -> State {
        let mut out = *s;
        for (o, kc) in out.iter_mut().zip(k) {
            for (oi, ki) in o.iter_mut().zip(kc) {
                *oi += h * ki;
            }
        }
        out
    };
    let h = 2.0 * std::f64::consts::PI / steps as f64;
    let mut s: State = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]];
    let mut psi = Vec::with_capacity(steps + 1);
    let mut dpsi = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        psi.push([s[0][0], s[1][0]]);
        dpsi.push([s[0][2], s[1][2]]);
        if j == steps {
            break;
        }
        let x = j as f64 * h;
        let k1 = rhs(x, &s);
        let k2 = rhs(x + 0.5 * h, &axpy(&s, &k1, 0.5 * h));
        let k3 = rhs(x + 0.5 * h, &axpy(&s, &k2, 0.5 * h));
        let k4 = rhs(x + h, &axpy(&s, &k3, h));
        for c in 0..2 {
            for i in 0..4 {
                s[c][i] += h / 6.0 * (k1[c][i] + 2.0 * k2[c][i] + 2.0 * k3[c][i] + k4[c][i]);
            }
        }
    }
    // Columns of the monodromy are the basis solutions' data at the period.
    let m = Matrix2::new(s[0][0], s[1][0], s[0][1], s[1][1]);
    let dm = Matrix2::new(s[0][2], s[1][2], s[0][3], s[1][3]);
    Variation { psi, dpsi, m, dm }
}

/// Vector field `X` moving `L` along the potential variation `u_dot`,
/// i.e. `X u' + 2 X' u + (a/2) X''' = u_dot`.
///
/// The basis variation is corrected by a traceless constant mixing so that the
/// monodromy matrix stays fixed; then `X = psi_1 dpsi_2 - psi_2 dpsi_1`.
/// The closure jump and projection residual are measured relative to `max(1, |M|^2/2)`.
pub fn homotopy_field(
    l: &SturmLiouville,
    u_dot: &TrigPoly,
    steps: usize,
    cfg: &Settings,
) -> Result<TrigPoly> {
    if l.a == 0.0 {
        return Err(Error::DegenerateOperator);
    }
    if u_dot.is_zero() {
        return Ok(TrigPoly::zero());
    }
    let steps = steps.max(4).next_power_of_two();
    let var = integrate_variation(l, u_dot, steps);

    // Solve dM + M B - B M = 0 for B = [[b1, b2], [b3, -b1]].
    let (m, dm) = (var.m, var.dm);
    let basis = [
        Matrix2::new(1.0, 0.0, 0.0, -1.0),
        Matrix2::new(0.0, 1.0, 0.0, 0.0),
        Matrix2::new(0.0, 0.0, 1.0, 0.0),
    ];
    let mut sys = Matrix4x3::zeros();
    for (k, e) in basis.iter().enumerate() {
        let c = m * e - e * m;
        sys.set_column(k, &Vector4::new(c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)]));
    }
    let rhs = -Vector4::new(dm[(0, 0)], dm[(0, 1)], dm[(1, 0)], dm[(1, 1)]);
    let b = sys
        .svd(true, true)
        .solve(&rhs, 1e-10 * m.norm())
        .map_err(|e| Error::Config(e.to_string()))?;
    let bm = basis[0] * b[0] + basis[1] * b[1] + basis[2] * b[2];

    let field: Vec<f64> = var
        .psi
        .iter()
        .zip(&var.dpsi)
        .map(|(p, d)| {
            let d1 = d[0] + p[0] * bm[(0, 0)] + p[1] * bm[(1, 0)];
            let d2 = d[1] + p[0] * bm[(0, 1)] + p[1] * bm[(1, 1)];
            p[0] * d2 - p[1] * d1
        })
        .collect();
    let size = (0.5 * m.norm_squared()).max(1.0);
    let jump = (field[steps] - field[0]).abs() / size;
    if jump > cfg.periodicity_tol {
        return Err(Error::NotPeriodic {
            residual: jump,
            tolerance: cfg.periodicity_tol,
        });
    }
    let proj = grid::project(&field[..steps], cfg.degree_cap);
    let residual = proj.residual / size;
    if residual.is_nan() || residual > cfg.periodicity_tol {
        return Err(Error::ProjectionOverflow {
            residual,
            tolerance: cfg.periodicity_tol,
        });
    }
    Ok(proj.poly)
}

/// The fields `psi_1^2, psi_1 psi_2, psi_2^2` built from a normalized solution basis.
///
/// These close up only when the monodromy is `±1`.
pub fn projective_sl2_triple(
    l: &SturmLiouville,
    steps: usize,
    cfg: &Settings,
) -> Result<[TrigPoly; 3]> {
    let path = fundamental_path(l, steps, cfg)?;
    let m = path.monodromy();
    let id = Matrix2::identity();
    let residual = (m - id).amax().min((m + id).amax());
    if residual > cfg.periodicity_tol {
        return Err(Error::NotPeriodic {
            residual,
            tolerance: cfg.periodicity_tol,
        });
    }
    let n = path.steps();
    let sample = |f: fn(f64, f64) -> f64| -> Vec<f64> {
        path.nodes[..n].iter().map(|t| f(t[(0, 0)], t[(0, 1)])).collect()
    };
    let proj = |s: Vec<f64>| grid::project(&s, cfg.degree_cap).within(cfg.periodicity_tol);
    Ok([
        proj(sample(|p, _| p * p))?,
        proj(sample(|p, q| p * q))?,
        proj(sample(|_, q| q * q))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn steps() -> usize {
        4096
    }

    #[test]
    fn covector_round_trip() {
        let mu = VirasoroCovector::new(TrigPoly::sin_mode(1), 1.0);
        let l = SturmLiouville::from_covector(&mu);
        assert_eq!(l.a, -2.0);
        let back = l.to_covector();
        assert_eq!(back.c, 1.0);
        assert!(back.u.approx_eq(&mu.u, 0.0));
    }

    #[test]
    fn free_equation_path() {
        let cfg = Settings::default();
        let l = SturmLiouville::new(-2.0, TrigPoly::zero());
        let path = fundamental_path(&l, 64, &cfg).unwrap();
        let t = path.nodes[32];
        assert_abs_diff_eq!(t[(0, 1)], PI, epsilon = 1e-13);
        assert_abs_diff_eq!(t[(1, 0)], 0.0, epsilon = 1e-15);
        let inv = monodromy_invariant(&path);
        assert_eq!(inv.class, MonodromyClass::Parabolic);
        assert_eq!(inv.lift_index, 0);
        assert_abs_diff_eq!(inv.trace, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn harmonic_oscillator() {
        let cfg = Settings::default();
        let l = SturmLiouville::new(-2.0, TrigPoly::constant(-2.0));
        let path = fundamental_path(&l, steps(), &cfg).unwrap();
        assert!((path.monodromy() - Matrix2::identity()).amax() < 1e-8);
        let inv = monodromy_invariant(&path);
        assert_eq!(inv.class, MonodromyClass::Parabolic);
        assert_eq!(inv.lift_index, 2);
    }

    #[test]
    fn exponential_growth() {
        let cfg = Settings::default();
        let l = SturmLiouville::new(-2.0, TrigPoly::constant(2.0));
        let inv = monodromy(&l, steps(), &cfg).unwrap().0;
        let exact = (2.0 * PI).exp() + (-2.0 * PI).exp();
        assert_abs_diff_eq!(inv.trace, exact, epsilon = 1e-6);
        assert_eq!(inv.class, MonodromyClass::Hyperbolic);
        assert_eq!(inv.lift_index, 0);
    }

    #[test]
    fn degenerate_operator_is_rejected() {
        let l = SturmLiouville::new(0.0, TrigPoly::constant(1.0));
        assert_eq!(
            fundamental_path(&l, 64, &Settings::default()).unwrap_err(),
            Error::DegenerateOperator
        );
    }

    #[test]
    fn vect_action_examples() {
        let l = SturmLiouville::new(-2.0, TrigPoly::zero());
        let r = sl_vect_act(&TrigPoly::sin_mode(1), &l, 1e-10).unwrap();
        assert!(r.approx_eq(&TrigPoly::cos_mode(1), 1e-14));
        let u = TrigPoly::new(0.1, &[0.5], &[0.0, 1.0]);
        let l = SturmLiouville::new(0.7, u.clone());
        let t = sl_vect_act(&TrigPoly::constant(1.0), &l, 1e-10).unwrap();
        assert!(t.approx_eq(&u.derivative(), 1e-14));
    }

    #[test]
    fn rotation_transport_shifts_potential() {
        let cfg = Settings::default();
        let l = SturmLiouville::new(-2.0, TrigPoly::sin_mode(1));
        let r = sl_diffeo_act(&CircleDiffeo::rotation(0.5), &l, &cfg).unwrap();
        let expected = TrigPoly::new(0.0, &[-(0.5f64).sin()], &[(0.5f64).cos()]);
        assert!(r.u.approx_eq(&expected, 1e-12));
        assert_eq!(r.a, -2.0);
    }

    #[test]
    fn transport_of_zero_potential_is_a_schwarzian() {
        let cfg = Settings::default();
        let g = CircleDiffeo::new(0.1, TrigPoly::cos_mode(1).scale(0.2)).unwrap();
        let l = SturmLiouville::new(-2.0, TrigPoly::zero());
        let r = sl_diffeo_act(&g, &l, &cfg).unwrap();
        let ginv = crate::diffeo::invert(&g, &cfg).unwrap();
        let s = virasoro::schwarzian(&ginv, CocycleKind::Standard, &cfg).unwrap();
        assert!(r.u.distance(&s.value.scale(-1.0)) < 10.0 * cfg.eps_proj);
    }

    #[test]
    fn homotopy_field_for_zero_variation() {
        let l = SturmLiouville::new(-2.0, TrigPoly::constant(0.3));
        let x = homotopy_field(&l, &TrigPoly::zero(), 1024, &Settings::default()).unwrap();
        assert!(x.is_zero());
    }

    #[test]
    fn homotopy_field_solves_the_tangency_equation() {
        let cfg = Settings::default();
        let l = SturmLiouville::new(-2.0, TrigPoly::new(0.2, &[0.3], &[0.0, 0.1]));
        let y = TrigPoly::new(0.1, &[0.2, 0.0], &[0.4]);
        let u_dot = sl_vect_act(&y, &l, 1e-10).unwrap();
        let x = homotopy_field(&l, &u_dot, steps(), &cfg).unwrap();
        let back = sl_vect_act(&x, &l, 1e-8).unwrap();
        assert!(back.distance(&u_dot) < 1e-6, "{}", back.distance(&u_dot));
    }

    #[test]
    fn half_angle_triple() {
        let cfg = Settings::default();
        let l = SturmLiouville::new(-2.0, TrigPoly::constant(-0.5));
        let [p, q, r] = projective_sl2_triple(&l, steps(), &cfg).unwrap();
        assert!(p.approx_eq(&TrigPoly::new(0.5, &[0.5], &[]), 1e-9));
        assert!(q.approx_eq(&TrigPoly::sin_mode(1), 1e-9));
        assert!(r.approx_eq(&TrigPoly::new(2.0, &[-2.0], &[]), 1e-9));
    }
}
