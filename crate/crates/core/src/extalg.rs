//! Central extension of first-order operators `X d/dx + a`, matrix Sturm-Liouville
//! operators, the modules `F_λ ⊕ F_{λ+1}`, and the superalgebra built on them.

use serde::{Deserialize, Serialize};

use crate::density::{self, Density};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::trig::TrigPoly;
use crate::virasoro::{self, CocycleKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GElement {
    pub x: TrigPoly,
    pub a: TrigPoly,
    #[serde(default)]
    pub center: [f64; 3],
}

impl GElement {
    pub fn new(x: TrigPoly, a: TrigPoly, center: [f64; 3]) -> Self {
        GElement { x, a, center }
    }

    pub fn operator(x: TrigPoly, a: TrigPoly) -> Self {
        GElement::new(x, a, [0.0; 3])
    }

    pub fn zero() -> Self {
        GElement::operator(TrigPoly::zero(), TrigPoly::zero())
    }

    fn combine(&self, o: &GElement, s: f64) -> GElement {
        let mut center = self.center;
        for (c, d) in center.iter_mut().zip(o.center) {
            *c += s * d;
        }
        GElement::new(&self.x + &o.x.scale(s), &self.a + &o.a.scale(s), center)
    }

    pub fn add(&self, o: &GElement) -> GElement {
        self.combine(o, 1.0)
    }

    pub fn sub(&self, o: &GElement) -> GElement {
        self.combine(o, -1.0)
    }

    pub fn scale(&self, s: f64) -> GElement {
        GElement::new(self.x.scale(s), self.a.scale(s), self.center.map(|c| s * c))
    }

    pub fn norm(&self) -> f64 {
        self.center
            .iter()
            .fold(self.x.max_norm().max(self.a.max_norm()), |m, c| m.max(c.abs()))
    }
}

/// The three cocycles `(ω, ∫ (X'' b - Y'' a), 2 ∫ a b')`.
pub fn g_cocycles(p: &GElement, q: &GElement) -> [f64; 3] {
    [
        virasoro::gf_cocycle(&p.x, &q.x, CocycleKind::Standard),
        (&p.x.nth_derivative(2).product(&q.a) - &q.x.nth_derivative(2).product(&p.a))
            .integrate_period(),
        2.0 * p.a.product(&q.a.derivative()).integrate_period(),
    ]
}

pub fn g_bracket(p: &GElement, q: &GElement) -> GElement {
    GElement::new(
        virasoro::vect_bracket(&p.x, &q.x),
        &p.x.product(&q.a.derivative()) - &q.x.product(&p.a.derivative()),
        g_cocycles(p, q),
    )
}

pub fn g_jacobi_residual(a: &GElement, b: &GElement, c: &GElement) -> f64 {
    g_bracket(a, &g_bracket(b, c))
        .add(&g_bracket(b, &g_bracket(c, a)))
        .add(&g_bracket(c, &g_bracket(a, b)))
        .norm()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityPair {
    pub lambda: f64,
    pub phi: TrigPoly,
    pub psi: TrigPoly,
}

impl DensityPair {
    pub fn new(lambda: f64, phi: TrigPoly, psi: TrigPoly) -> Self {
        DensityPair { lambda, phi, psi }
    }

    pub fn distance(&self, o: &DensityPair) -> f64 {
        self.phi.distance(&o.phi).max(self.psi.distance(&o.psi))
    }
}

/// `(L_X φ, L_X ψ + λ a' φ)` on `F_λ ⊕ F_{λ+1}`.
pub fn t_action(g: &GElement, p: &DensityPair) -> DensityPair {
    let lam = p.lambda;
    let phi = density::lie_derivative(&g.x, &Density::new(lam, p.phi.clone())).value;
    let moved = density::lie_derivative(&g.x, &Density::new(lam + 1.0, p.psi.clone())).value;
    let psi = &moved + &g.a.derivative().product(&p.phi).scale(lam);
    DensityPair::new(lam, phi, psi)
}

/// Defect of `T_A T_B - T_B T_A = T_[A,B]` on `p`.
pub fn t_representation_residual(a: &GElement, b: &GElement, p: &DensityPair) -> f64 {
    let ab = t_action(a, &t_action(b, p));
    let ba = t_action(b, &t_action(a, p));
    let lhs = DensityPair::new(p.lambda, &ab.phi - &ba.phi, &ab.psi - &ba.psi);
    lhs.distance(&t_action(&g_bracket(a, b), p))
}

/// `[[-2 c1 d^2 + u, 2 c2 d + v], [-2 c2 d + v, 4 c3]]` from `F_{-1/2} ⊕ F_{1/2}` to `F_{3/2} ⊕ F_{1/2}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixSL {
    pub u: TrigPoly,
    pub v: TrigPoly,
    pub c: [f64; 3],
}

type OpMatrix = [[DiffOp; 2]; 2];

fn op_compose(p: &OpMatrix, q: &OpMatrix) -> OpMatrix {
    let entry = |i: usize, j: usize| p[i][0].compose(&q[0][j]).add(&p[i][1].compose(&q[1][j]));
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

impl MatrixSL {
    pub fn new(u: TrigPoly, v: TrigPoly, c: [f64; 3]) -> Self {
        MatrixSL { u, v, c }
    }

    pub fn operator(&self) -> OpMatrix {
        let k = |s: f64| TrigPoly::constant(s);
        [
            [
                DiffOp::new(vec![self.u.clone(), TrigPoly::zero(), k(-2.0 * self.c[0])]),
                DiffOp::new(vec![self.v.clone(), k(2.0 * self.c[1])]),
            ],
            [
                DiffOp::new(vec![self.v.clone(), k(-2.0 * self.c[1])]),
                DiffOp::multiplication(k(4.0 * self.c[2])),
            ],
        ]
    }

    pub fn apply(&self, p: &(TrigPoly, TrigPoly)) -> (TrigPoly, TrigPoly) {
        let op = self.operator();
        (
            &op[0][0].apply(&p.0) + &op[0][1].apply(&p.1),
            &op[1][0].apply(&p.0) + &op[1][1].apply(&p.1),
        )
    }

    /// `∫ u Y + ∫ v b + c · β`.
    pub fn pair(&self, g: &GElement) -> f64 {
        self.u.product(&g.x).integrate_period()
            + self.v.product(&g.a).integrate_period()
            + self.c.iter().zip(g.center).map(|(c, b)| c * b).sum::<f64>()
    }
}

/// `⟨L p, q⟩ - ⟨p, L q⟩` with the componentwise integral pairing.
pub fn self_adjoint_residual(l: &MatrixSL, p: &(TrigPoly, TrigPoly), q: &(TrigPoly, TrigPoly)) -> f64 {
    let pair = |s: &(TrigPoly, TrigPoly), t: &(TrigPoly, TrigPoly)| {
        s.0.product(&t.0).integrate_period() + s.1.product(&t.1).integrate_period()
    };
    (pair(&l.apply(p), q) - pair(p, &l.apply(q))).abs()
}

/// Closed form of the coadjoint action on `(u, v)`.
pub fn matrix_coad_closed(g: &GElement, l: &MatrixSL) -> (TrigPoly, TrigPoly) {
    let (x, a, u, v, c) = (&g.x, &g.a, &l.u, &l.v, l.c);
    let (x1, a1) = (x.derivative(), a.derivative());
    let mut du = &x.product(&u.derivative()) + &x1.product(u).scale(2.0);
    du += &x1.nth_derivative(2).scale(-c[0]);
    du += &v.product(&a1);
    du += &a1.derivative().scale(c[1]);
    let mut dv = &x.product(&v.derivative()) + &x1.product(v);
    dv += &x1.derivative().scale(-c[1]);
    dv += &a1.scale(2.0 * c[2]);
    (du, dv)
}

/// `T^{(1/2)} ∘ L - L ∘ T^{(-1/2)}` as a matrix of differential operators.
pub fn matrix_coad_operator(g: &GElement, l: &MatrixSL) -> [[DiffOp; 2]; 2] {
    let a1 = g.a.derivative();
    let t_in: OpMatrix = [
        [DiffOp::lie(&g.x, -0.5), DiffOp::zero()],
        [DiffOp::multiplication(a1.scale(-0.5)), DiffOp::lie(&g.x, 0.5)],
    ];
    // F_{1/2} ⊕ F_{3/2} listed in the order of the operator's rows.
    let t_out: OpMatrix = [
        [DiffOp::lie(&g.x, 1.5), DiffOp::multiplication(a1.scale(0.5))],
        [DiffOp::zero(), DiffOp::lie(&g.x, 0.5)],
    ];
    let op = l.operator();
    let lhs = op_compose(&t_out, &op);
    let rhs = op_compose(&op, &t_in);
    [
        [lhs[0][0].sub(&rhs[0][0]), lhs[0][1].sub(&rhs[0][1])],
        [lhs[1][0].sub(&rhs[1][0]), lhs[1][1].sub(&rhs[1][1])],
    ]
}

/// Coadjoint action on matrix operators, computed by operator commutation and by
/// the closed form; the two must agree to `tol`.
pub fn matrix_coad(g: &GElement, l: &MatrixSL, tol: f64) -> Result<(TrigPoly, TrigPoly)> {
    let d = matrix_coad_operator(g, l);
    for entry in d.iter().flatten() {
        for k in 1..=entry.order() {
            let residual = entry.coeff(k).max_norm();
            if residual > tol {
                return Err(Error::NotTangent { order: k, residual });
            }
        }
    }
    let corner = d[1][1].coeff(0).max_norm();
    if corner > tol {
        return Err(Error::NotTangent {
            order: 0,
            residual: corner,
        });
    }
    let (du, dv) = matrix_coad_closed(g, l);
    let residual = [
        d[0][0].coeff(0).distance(&du),
        d[0][1].coeff(0).distance(&dv),
        d[1][0].coeff(0).distance(&dv),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::ActionMismatch {
            residual,
            tolerance: tol,
        });
    }
    Ok((du, dv))
}

/// Element of the superalgebra whose odd part is `F_{-1/2} ⊕ F_{1/2}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SElement {
    pub even: GElement,
    pub phi: TrigPoly,
    pub alpha: TrigPoly,
}

impl SElement {
    pub fn new(even: GElement, phi: TrigPoly, alpha: TrigPoly) -> Self {
        SElement { even, phi, alpha }
    }

    pub fn even_part(&self) -> SElement {
        SElement::new(self.even.clone(), TrigPoly::zero(), TrigPoly::zero())
    }

    pub fn odd_part(&self) -> SElement {
        SElement::new(GElement::zero(), self.phi.clone(), self.alpha.clone())
    }

    fn combine(&self, o: &SElement, s: f64) -> SElement {
        SElement::new(
            self.even.add(&o.even.scale(s)),
            &self.phi + &o.phi.scale(s),
            &self.alpha + &o.alpha.scale(s),
        )
    }

    pub fn add(&self, o: &SElement) -> SElement {
        self.combine(o, 1.0)
    }

    pub fn scale(&self, s: f64) -> SElement {
        SElement::new(self.even.scale(s), self.phi.scale(s), self.alpha.scale(s))
    }

    pub fn norm(&self) -> f64 {
        self.even
            .norm()
            .max(self.phi.max_norm())
            .max(self.alpha.max_norm())
    }
}

/// Odd-odd central terms `(2 ∫ φ' ψ', -2 ∫ (φ' β + α ψ'), 4 ∫ α β)`.
pub fn s_odd_cocycles(p: &SElement, q: &SElement) -> [f64; 3] {
    let (dphi, dpsi) = (p.phi.derivative(), q.phi.derivative());
    [
        2.0 * dphi.product(&dpsi).integrate_period(),
        -2.0 * (&dphi.product(&q.alpha) + &p.alpha.product(&dpsi)).integrate_period(),
        4.0 * p.alpha.product(&q.alpha).integrate_period(),
    ]
}

pub fn s_bracket(p: &SElement, q: &SElement) -> SElement {
    let even = g_bracket(&p.even, &q.even);
    let act = |g: &GElement, o: &SElement| t_action(g, &DensityPair::new(-0.5, o.phi.clone(), o.alpha.clone()));
    let pq = act(&p.even, q);
    let qp = act(&q.even, p);
    let odd_even = GElement::new(
        p.phi.product(&q.phi),
        &p.phi.product(&q.alpha) + &p.alpha.product(&q.phi),
        s_odd_cocycles(p, q),
    );
    SElement::new(even.add(&odd_even), &pq.phi - &qp.phi, &pq.psi - &qp.psi)
}

pub fn s_jacobi_residual(a: &SElement, b: &SElement, c: &SElement) -> f64 {
    let parts = |e: &SElement| [(e.even_part(), 0u8), (e.odd_part(), 1u8)];
    let sign = |p: u8, q: u8| if p & q == 1 { -1.0 } else { 1.0 };
    let mut total = SElement::new(GElement::zero(), TrigPoly::zero(), TrigPoly::zero());
    for (pa, ea) in parts(a) {
        for (pb, eb) in parts(b) {
            for (pc, ec) in parts(c) {
                total = total
                    .add(&s_bracket(&pa, &s_bracket(&pb, &pc)).scale(sign(ea, ec)))
                    .add(&s_bracket(&pb, &s_bracket(&pc, &pa)).scale(sign(eb, ea)))
                    .add(&s_bracket(&pc, &s_bracket(&pa, &pb)).scale(sign(ec, eb)));
            }
        }
    }
    total.norm()
}

/// Coadjoint action of an odd element `(φ, α)` on `(u, v, c)`: the matrix operator applied to `(φ, α)`.
pub fn s_coad_odd(phi: &TrigPoly, alpha: &TrigPoly, l: &MatrixSL) -> (TrigPoly, TrigPoly) {
    l.apply(&(phi.clone(), alpha.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn g(x: TrigPoly, a: TrigPoly) -> GElement {
        GElement::operator(x, a)
    }

    #[test]
    fn bracket_anchors() {
        let r = g_bracket(&g(TrigPoly::zero(), TrigPoly::cos_mode(1)), &g(TrigPoly::zero(), TrigPoly::sin_mode(1)));
        assert!(r.x.is_zero() && r.a.is_zero());
        assert_eq!(r.center[0], 0.0);
        assert_eq!(r.center[1], 0.0);
        assert_abs_diff_eq!(r.center[2], 2.0 * PI, epsilon = 1e-14);
        let s = g_bracket(&g(TrigPoly::sin_mode(1), TrigPoly::zero()), &g(TrigPoly::zero(), TrigPoly::sin_mode(1)));
        assert_abs_diff_eq!(s.center[1], -PI, epsilon = 1e-14);
        assert!(s.a.approx_eq(&TrigPoly::sin_mode(2).scale(0.5), 1e-15));
        let c = g_bracket(&GElement::new(TrigPoly::zero(), TrigPoly::zero(), [1.0, 2.0, 3.0]), &s);
        assert_eq!(c.norm(), 0.0);
    }

    #[test]
    fn t_action_examples() {
        let p = DensityPair::new(-0.5, TrigPoly::constant(1.0), TrigPoly::zero());
        let r = t_action(&g(TrigPoly::zero(), TrigPoly::sin_mode(1)), &p);
        assert!(r.phi.is_zero());
        assert!(r.psi.approx_eq(&TrigPoly::cos_mode(1).scale(-0.5), 1e-15));
        let q = DensityPair::new(0.0, TrigPoly::cos_mode(2), TrigPoly::sin_mode(1));
        let z = t_action(&g(TrigPoly::zero(), TrigPoly::sin_mode(3)), &q);
        assert!(z.phi.is_zero() && z.psi.is_zero());
    }

    #[test]
    fn matrix_coad_examples() {
        let l = MatrixSL::new(TrigPoly::zero(), TrigPoly::zero(), [0.0, 1.0, 1.0]);
        let (du, dv) = matrix_coad(&g(TrigPoly::zero(), TrigPoly::sin_mode(1)), &l, 1e-10).unwrap();
        assert!(du.approx_eq(&TrigPoly::sin_mode(1).scale(-1.0), 1e-15));
        assert!(dv.approx_eq(&TrigPoly::cos_mode(1).scale(2.0), 1e-15));
        let (du, dv) = matrix_coad(&g(TrigPoly::zero(), TrigPoly::constant(3.0)), &l, 1e-10).unwrap();
        assert!(du.is_zero() && dv.is_zero());
    }

    #[test]
    fn general_matrix_coad_is_consistent() {
        let l = MatrixSL::new(
            TrigPoly::new(0.2, &[0.5], &[0.0, 0.3]),
            TrigPoly::new(-0.1, &[0.0, 0.4], &[0.7]),
            [0.6, -0.3, 1.1],
        );
        let a = g(TrigPoly::new(0.3, &[0.1], &[0.6, 0.2]), TrigPoly::new(0.5, &[0.2, 0.3], &[0.1]));
        let b = g(TrigPoly::new(-0.2, &[0.4, 0.1], &[0.3]), TrigPoly::new(0.0, &[0.6], &[0.0, 0.2]));
        let (du, dv) = matrix_coad(&a, &l, 1e-10).unwrap();
        let tangent = MatrixSL::new(du, dv, [0.0; 3]);
        assert!((tangent.pair(&b) + l.pair(&g_bracket(&a, &b))).abs() < 1e-12);
    }

    #[test]
    fn odd_odd_central_anchor() {
        let p = SElement::new(GElement::zero(), TrigPoly::zero(), TrigPoly::cos_mode(1));
        let r = s_bracket(&p, &p);
        assert_abs_diff_eq!(r.even.center[2], 4.0 * PI, epsilon = 1e-14);
    }
}
