use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{def, CheckDef, EXACT};
use crate::agd::laurent::{moyal_term, residual_terms, star, star_series, HbarSeries, LaurentPoly2};
use crate::agd::third::{
    agd_field, compensated_second_lie_commutator, project_to_sturm, second_lie_commutator,
    third_diffeo_act, Functional, ThirdOrderOp,
};
use crate::agd::transvectant::{lift_constant, transvectant, MonomialDensity};
use crate::density::{lie_derivative, Density};
use crate::error::{Error, Result};
use crate::extalg::{
    g_bracket, g_jacobi_residual, matrix_coad_closed, matrix_coad_operator, s_bracket, s_coad_odd,
    s_jacobi_residual, self_adjoint_residual, t_representation_residual, DensityPair, GElement,
    MatrixSL, SElement,
};
use crate::sturm::sl_diffeo_act;
use crate::superalg::{
    duality_residual, osp_cocycle_variant, super_bracket, super_coad, super_jacobi_residual,
    OspVariant, Sector, SuperCovector, SuperElement,
};
use crate::trig::TrigPoly;
use crate::verify::random::{diffeo, half_trig, trig, uniform};
use crate::verify::{Ctx, Measured};

pub fn catalogue() -> Vec<CheckDef> {
    vec![
        def("superalg", "super_antisymmetry", "[A,B] = -(-1)^{|A||B|} [B,A]", 1e-13, super_antisymmetry),
        def("superalg", "super_jacobi_ramond", "graded Jacobi, periodic odd part", 1e-10, super_jacobi_ramond),
        def("superalg", "super_jacobi_ns", "graded Jacobi, anti-periodic odd part", 1e-10, super_jacobi_ns),
        def("superalg", "super_duality", "<ad*_A μ, B> = -(-1)^{|A||B|} <μ, [A,B]>", 1e-10, super_duality),
        def("superalg", "super_odd_coadjoint", "ad*_{(0,ξ)} (u, c, 0) = (-2c d² + u) ξ", 1e-12, super_odd_coadjoint),
        def("superalg", "osp_equivariant_cocycle", "cocycle vanishing on {1, sin, cos} ⊕ {cos(x/2), sin(x/2)}", 1e-12, osp_equivariant_cocycle),
        def("extalg", "g_cocycle_jacobi", "cyclic sums of the three cocycles on X d/dx + a vanish", 1e-10, g_cocycle_jacobi),
        def("extalg", "g_cocycle_anchor", "ω''((0,cos),(0,sin)) = 2π", 1e-12, g_cocycle_anchor),
        def("extalg", "t_representation", "[T_A, T_B] = T_[A,B] on F_λ ⊕ F_{λ+1}", 1e-10, t_representation),
        def("extalg", "matrix_dual_pairing", "<ad*_A ℒ, B> + <ℒ, [A,B]> = 0", 1e-10, matrix_dual_pairing),
        def("extalg", "matrix_coad_routes", "T^{1/2} ℒ - ℒ T^{-1/2} equals the closed form", 1e-10, matrix_coad_routes),
        def("extalg", "matrix_self_adjoint", "<ℒ p, q> = <p, ℒ q>", 1e-10, matrix_self_adjoint),
        def("extalg", "s_jacobi", "graded Jacobi on the odd extension by F_{-1/2} ⊕ F_{1/2}", 1e-10, s_jacobi),
        def("extalg", "s_odd_duality", "<ad*_{(φ,α)} ℒ, (ψ,β)> = <ℒ, [(φ,α),(ψ,β)]>", 1e-10, s_odd_duality),
        def("agd", "star_associativity", "(F ⋆ G) ⋆ H = F ⋆ (G ⋆ H) up to ħ^4", EXACT, star_associativity),
        def("agd", "poisson_jacobi", "{F,{G,H}} + {G,{H,F}} + {H,{F,G}} = 0", EXACT, poisson_jacobi),
        def("agd", "transvectant_equivariance", "L_Z J_m(φ,ψ) = J_m(L_Z φ,ψ) + J_m(φ,L_Z ψ), Z in {1, sin, cos}", 1e-9, transvectant_equivariance),
        def("agd", "lift_constant_stability", "{lift φ, lift ψ}_m = κ_m lift J_m(φ,ψ)", 0.5, lift_constant_stability),
        def("agd", "agd_tangency", "[L²_Z, A] has order ≤ 1", 1e-9, agd_tangency),
        def("agd", "agd_compensated_tangency", "[L²_Z + 8 Z (u - 1), A] has order ≤ 1", 1e-9, agd_compensated_tangency),
        def("agd", "sturm_projection_equivariance", "π(g·A) = g·π(A), π(A) = 4 d² + u", 1e-8, sturm_projection_equivariance),
    ]
}

fn sector_odd(ctx: &mut Ctx, sector: Sector) -> TrigPoly {
    match sector {
        Sector::Ramond => trig(&mut ctx.rng, 4, 1.0),
        Sector::NeveuSchwarz => half_trig(&mut ctx.rng, 4, 1.0),
    }
}

fn super_element(ctx: &mut Ctx, sector: Sector) -> Result<SuperElement> {
    let x = trig(&mut ctx.rng, 4, 1.0);
    let alpha = uniform(&mut ctx.rng, -1.0, 1.0);
    let xi = sector_odd(ctx, sector);
    SuperElement::new(x, alpha, xi, sector)
}

fn super_covector(ctx: &mut Ctx, sector: Sector) -> Result<SuperCovector> {
    let u = trig(&mut ctx.rng, 4, 1.0);
    let c = uniform(&mut ctx.rng, -2.0, 2.0);
    let phi = sector_odd(ctx, sector);
    SuperCovector::new(u, c, phi, sector)
}

const SECTORS: [Sector; 2] = [Sector::Ramond, Sector::NeveuSchwarz];

fn super_antisymmetry(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for sector in SECTORS {
        for _ in 0..50 {
            let (a, b) = (super_element(ctx, sector)?, super_element(ctx, sector)?);
            for (pa, ea) in [(a.even_part(), 0), (a.odd_part(), 1)] {
                for (pb, eb) in [(b.even_part(), 0), (b.odd_part(), 1)] {
                    let sign = if ea * eb == 1 { -1.0 } else { 1.0 };
                    let sum = super_bracket(&pa, &pb)?.add(&super_bracket(&pb, &pa)?.scale(sign));
                    worst = worst.max(sum.norm());
                }
            }
        }
    }
    Ok(Measured::new(worst))
}

fn super_jacobi(ctx: &mut Ctx, sector: Sector) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = super_element(ctx, sector)?;
        let b = super_element(ctx, sector)?;
        let c = super_element(ctx, sector)?;
        worst = worst.max(super_jacobi_residual(&a, &b, &c)?);
    }
    Ok(Measured::new(worst))
}

fn super_jacobi_ramond(ctx: &mut Ctx) -> Result<Measured> {
    super_jacobi(ctx, Sector::Ramond)
}

fn super_jacobi_ns(ctx: &mut Ctx) -> Result<Measured> {
    super_jacobi(ctx, Sector::NeveuSchwarz)
}

fn super_duality(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for sector in SECTORS {
        for _ in 0..50 {
            let (a, b) = (super_element(ctx, sector)?, super_element(ctx, sector)?);
            let mu = super_covector(ctx, sector)?;
            let coad = super_coad(&a, &mu)?;
            worst = worst.max(duality_residual(&a, &mu, &b, &coad)?);
        }
    }
    Ok(Measured::new(worst))
}

fn super_odd_coadjoint(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for sector in SECTORS {
        for _ in 0..20 {
            let xi = sector_odd(ctx, sector);
            let u = trig(&mut ctx.rng, 4, 1.0);
            let c = uniform(&mut ctx.rng, -2.0, 2.0);
            let a = SuperElement::odd(xi.clone(), sector)?;
            let mu = SuperCovector::new(u.clone(), c, TrigPoly::zero_of(sector.parity()), sector)?;
            let coad = super_coad(&a, &mu)?;
            let expected = &xi.nth_derivative(2).scale(-2.0 * c) + &u.product(&xi);
            worst = worst.max(coad.phi.distance(&expected)).max(coad.u.max_norm());
        }
    }
    Ok(Measured::new(worst))
}

fn osp_equivariant_cocycle(ctx: &mut Ctx) -> Result<Measured> {
    let ns = Sector::NeveuSchwarz;
    let mut gens = Vec::new();
    for x in [TrigPoly::constant(1.0), TrigPoly::sin_mode(1), TrigPoly::cos_mode(1)] {
        gens.push(SuperElement::even(x, 0.0, ns));
    }
    for xi in [TrigPoly::half_cos_mode(0), TrigPoly::half_sin_mode(0)] {
        gens.push(SuperElement::odd(xi, ns)?);
    }
    let mut per_variant = [0.0f64; 3];
    for _ in 0..50 {
        let y = super_element(ctx, ns)?;
        for g in &gens {
            for (slot, v) in OspVariant::ALL.iter().enumerate() {
                let r = osp_cocycle_variant(g, &y, *v)?.abs().max(osp_cocycle_variant(&y, g, *v)?.abs());
                per_variant[slot] = per_variant[slot].max(r);
            }
        }
    }
    let note = OspVariant::ALL
        .iter()
        .zip(per_variant)
        .map(|(v, r)| format!("{}={r:.3e}", v.name()))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Measured::with_note(per_variant[2], note))
}

fn g_element(ctx: &mut Ctx) -> GElement {
    let x = trig(&mut ctx.rng, 4, 1.0);
    let a = trig(&mut ctx.rng, 4, 1.0);
    let center = [0.0; 3].map(|_: f64| ctx.rng.gen_range(-1.0..1.0));
    GElement::new(x, a, center)
}

fn matrix_op(ctx: &mut Ctx) -> MatrixSL {
    let u = trig(&mut ctx.rng, 4, 1.0);
    let v = trig(&mut ctx.rng, 4, 1.0);
    let c = [0.0; 3].map(|_: f64| ctx.rng.gen_range(-2.0..2.0));
    MatrixSL::new(u, v, c)
}

fn g_cocycle_jacobi(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, c) = (g_element(ctx), g_element(ctx), g_element(ctx));
        worst = worst.max(g_jacobi_residual(&a, &b, &c));
        worst = worst.max(g_bracket(&a, &b).add(&g_bracket(&b, &a)).norm());
    }
    Ok(Measured::new(worst))
}

fn g_cocycle_anchor(_: &mut Ctx) -> Result<Measured> {
    let p = GElement::operator(TrigPoly::zero(), TrigPoly::cos_mode(1));
    let q = GElement::operator(TrigPoly::zero(), TrigPoly::sin_mode(1));
    let w = g_bracket(&p, &q).center[2];
    Ok(Measured::with_note((w - 2.0 * std::f64::consts::PI).abs(), format!("value = {w}")))
}

const PAIR_WEIGHTS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

fn t_representation(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = (g_element(ctx), g_element(ctx));
        let lambda = *PAIR_WEIGHTS.choose(&mut ctx.rng).expect("non-empty");
        let p = DensityPair::new(lambda, trig(&mut ctx.rng, 4, 1.0), trig(&mut ctx.rng, 4, 1.0));
        worst = worst.max(t_representation_residual(&a, &b, &p));
    }
    Ok(Measured::new(worst))
}

fn matrix_dual_pairing(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, l) = (g_element(ctx), g_element(ctx), matrix_op(ctx));
        let (du, dv) = matrix_coad_closed(&a, &l);
        let tangent = MatrixSL::new(du, dv, [0.0; 3]);
        worst = worst.max((tangent.pair(&b) + l.pair(&g_bracket(&a, &b))).abs());
    }
    Ok(Measured::new(worst))
}

fn matrix_coad_routes(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (a, l) = (g_element(ctx), matrix_op(ctx));
        let d = matrix_coad_operator(&a, &l);
        let (du, dv) = matrix_coad_closed(&a, &l);
        for entry in d.iter().flatten() {
            worst = worst.max(entry.tail_norm(1));
        }
        worst = worst
            .max(d[1][1].coeff(0).max_norm())
            .max(d[0][0].coeff(0).distance(&du))
            .max(d[0][1].coeff(0).distance(&dv))
            .max(d[1][0].coeff(0).distance(&dv));
    }
    Ok(Measured::new(worst))
}

fn matrix_self_adjoint(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let l = matrix_op(ctx);
        let p = (trig(&mut ctx.rng, 4, 1.0), trig(&mut ctx.rng, 4, 1.0));
        let q = (trig(&mut ctx.rng, 4, 1.0), trig(&mut ctx.rng, 4, 1.0));
        worst = worst.max(self_adjoint_residual(&l, &p, &q));
    }
    Ok(Measured::new(worst))
}

fn s_element(ctx: &mut Ctx) -> SElement {
    let even = g_element(ctx);
    SElement::new(even, trig(&mut ctx.rng, 4, 1.0), trig(&mut ctx.rng, 4, 1.0))
}

fn s_jacobi(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, c) = (s_element(ctx), s_element(ctx), s_element(ctx));
        worst = worst.max(s_jacobi_residual(&a, &b, &c));
    }
    Ok(Measured::new(worst))
}

fn s_odd_duality(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let l = matrix_op(ctx);
        let (p, q) = (s_element(ctx).odd_part(), s_element(ctx).odd_part());
        let (f, g) = s_coad_odd(&p.phi, &p.alpha, &l);
        let lhs = f.product(&q.phi).integrate_period() + g.product(&q.alpha).integrate_period();
        let rhs = l.pair(&s_bracket(&p, &q).even);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(Measured::new(worst))
}

fn small_rational(ctx: &mut Ctx) -> BigRational {
    let n: i64 = ctx.rng.gen_range(-5..=5);
    let d: i64 = ctx.rng.gen_range(1..=4);
    BigRational::new(n.into(), d.into())
}

fn laurent(ctx: &mut Ctx) -> LaurentPoly2 {
    let terms = ctx.rng.gen_range(1..=3);
    let mut out = LaurentPoly2::zero();
    for _ in 0..terms {
        let (i, j) = (ctx.rng.gen_range(-2..=3), ctx.rng.gen_range(-2..=3));
        let c = small_rational(ctx);
        out = out.add(&LaurentPoly2::monomial(i, j, c));
    }
    out
}

fn star_associativity(ctx: &mut Ctx) -> Result<Measured> {
    let k = 4;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (f, g, h) = (laurent(ctx), laurent(ctx), laurent(ctx));
        let lhs = star_series(&star(&f, &g, k), &HbarSeries::constant(h.clone(), k));
        let rhs = star_series(&HbarSeries::constant(f, k), &star(&g, &h, k));
        for (x, y) in lhs.coeffs.iter().zip(&rhs.coeffs) {
            worst = worst.max(residual_terms(&x.sub(y)));
        }
    }
    Ok(Measured::new(worst))
}

fn poisson_jacobi(ctx: &mut Ctx) -> Result<Measured> {
    let pb = |a: &LaurentPoly2, b: &LaurentPoly2| moyal_term(a, b, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (f, g, h) = (laurent(ctx), laurent(ctx), laurent(ctx));
        let sum = pb(&f, &pb(&g, &h)).add(&pb(&g, &pb(&h, &f))).add(&pb(&h, &pb(&f, &g)));
        worst = worst.max(residual_terms(&sum));
    }
    Ok(Measured::new(worst))
}

const TRANSVECTANT_WEIGHTS: [f64; 9] = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];

fn transvectant_equivariance(ctx: &mut Ctx) -> Result<Measured> {
    let sl2 = [TrigPoly::constant(1.0), TrigPoly::sin_mode(1), TrigPoly::cos_mode(1)];
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let la = *TRANSVECTANT_WEIGHTS.choose(&mut ctx.rng).expect("non-empty");
        let mu = *TRANSVECTANT_WEIGHTS.choose(&mut ctx.rng).expect("non-empty");
        let phi = Density::new(la, trig(&mut ctx.rng, 4, 1.0));
        let psi = Density::new(mu, trig(&mut ctx.rng, 4, 1.0));
        for m in 0..=4 {
            for z in &sl2 {
                let lhs = lie_derivative(z, &transvectant(&phi, &psi, m));
                let a = transvectant(&lie_derivative(z, &phi), &psi, m);
                let b = transvectant(&phi, &lie_derivative(z, &psi), m);
                worst = worst.max(lhs.value.distance(&(&a.value + &b.value)));
            }
        }
    }
    Ok(Measured::new(worst))
}

fn lift_constant_stability(ctx: &mut Ctx) -> Result<Measured> {
    let mut distinct_extra = 0usize;
    let mut summary = Vec::new();
    for m in 0..=4 {
        let mut seen: Vec<BigRational> = Vec::new();
        let mut informative = 0;
        for _ in 0..20 {
            let phi = MonomialDensity::new(
                ctx.rng.gen_range(-3..=4),
                *TRANSVECTANT_WEIGHTS.choose(&mut ctx.rng).expect("non-empty"),
            );
            let psi = MonomialDensity::new(
                ctx.rng.gen_range(-3..=4),
                *TRANSVECTANT_WEIGHTS.choose(&mut ctx.rng).expect("non-empty"),
            );
            match lift_constant(&phi, &psi, m) {
                Ok(Some(c)) => {
                    informative += 1;
                    if !seen.contains(&c) {
                        seen.push(c);
                    }
                }
                Ok(None) => {}
                Err(Error::ActionMismatch { .. }) => distinct_extra += 1,
                Err(e) => return Err(e),
            }
        }
        distinct_extra += seen.len().saturating_sub(1);
        let shown = seen.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("|");
        summary.push(format!("m={m}: {shown} ({informative} informative)"));
    }
    Ok(Measured::with_note(distinct_extra as f64, summary.join("; ")))
}

fn third_op(ctx: &mut Ctx) -> ThirdOrderOp {
    let u = &TrigPoly::constant(1.0) + &trig(&mut ctx.rng, 4, 1.0);
    ThirdOrderOp::new(u, trig(&mut ctx.rng, 4, 1.0))
}

fn agd_tangency(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..50 {
        let (z, a) = (trig(&mut ctx.rng, 4, 1.0), third_op(ctx));
        worst = worst.max(second_lie_commutator(&z, &a).tail_norm(2));
        if agd_field(&Functional::Z(z), &a, 1e-9).is_err() {
            failures += 1;
        }
    }
    Ok(Measured::with_note(
        worst,
        format!("{failures}/50 not tangent; second-order part is 24 (Z (u - 1))'"),
    ))
}

fn agd_compensated_tangency(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (z, a) = (trig(&mut ctx.rng, 4, 1.0), third_op(ctx));
        worst = worst.max(compensated_second_lie_commutator(&z, &a).tail_norm(2));
    }
    Ok(Measured::new(worst))
}

fn sturm_projection_equivariance(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let g = diffeo(&mut ctx.rng, 3, 0.15)?;
        let a = third_op(ctx);
        let lhs = project_to_sturm(&third_diffeo_act(&g, &a, &cfg)?);
        let rhs = sl_diffeo_act(&g, &project_to_sturm(&a), &cfg)?;
        worst = worst.max(lhs.u.distance(&rhs.u));
    }
    Ok(Measured::new(worst))
}
