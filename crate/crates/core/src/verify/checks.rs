use std::f64::consts::PI;

use rand::seq::SliceRandom;

use super::random::{diffeo, trig, uniform};
use super::{Ctx, Measured};
use crate::density::{self, Density};
use crate::diffeo::{self, CircleDiffeo};
use crate::error::Result;
use crate::sturm::{self, SturmLiouville};
use crate::trig::TrigPoly;
use crate::virasoro::{self, CocycleKind, VirasoroCovector, VirasoroElement};

#[path = "checks_algebra.rs"]
mod algebra;

/// A named, seeded property check.
#[derive(Clone, Copy)]
pub struct CheckDef {
    pub suite: &'static str,
    pub name: &'static str,
    pub formula: &'static str,
    pub tolerance: f64,
    pub run: fn(&mut Ctx) -> Result<Measured>,
}

/// Tolerance for identities that must hold exactly.
pub(super) const EXACT: f64 = f64::MIN_POSITIVE;

const KINDS: [CocycleKind; 2] = [CocycleKind::Standard, CocycleKind::Modified];

pub(super) fn def(
    suite: &'static str,
    name: &'static str,
    formula: &'static str,
    tolerance: f64,
    run: fn(&mut Ctx) -> Result<Measured>,
) -> CheckDef {
    CheckDef {
        suite,
        name,
        formula,
        tolerance,
        run,
    }
}

pub fn catalogue() -> Vec<CheckDef> {
    let mut out = vec![
        def("core_fn", "trig_product_pointwise", "(f g)(x) = f(x) g(x)", 1e-12, trig_product_pointwise),
        def("core_fn", "diffeo_inverse", "f ∘ f^{-1} = id", 1e-8, diffeo_inverse),
        def("core_fn", "flow_group_law", "φ_s ∘ φ_t = φ_{s+t}", 1e-8, flow_group_law),
        def("density", "density_action_law", "(g ∘ f)·a = g·(f·a)", 1e-8, density_action_law),
        def("density", "density_flow_derivative", "d/dt φ_t·a = -L_X a", 1e-5, density_flow_derivative),
        def("density", "density_pairing_invariance", "<L_X a, b> + <a, L_X b> = 0, <g·a, g·b> = <a, b>", 1e-8, density_pairing_invariance),
        def("virasoro", "gf_cocycle_identity", "ω([X,Y],Z) + ω([Y,Z],X) + ω([Z,X],Y) = 0", 1e-10, gf_cocycle_identity),
        def("virasoro", "gf_anchor", "ω(sin, cos) = -π", 1e-12, gf_anchor),
        def("virasoro", "modified_sl2_vanishing", "ω̄(X, Y) = 0 for X in {1, sin, cos}", 1e-12, modified_sl2_vanishing),
        def("virasoro", "bott_cocycle_identity", "B(f∘g, h) + B(f, g) = B(f, g∘h) + B(g, h)", 1e-7, bott_cocycle_identity),
        def("virasoro", "schwarzian_rotation", "S(x + θ) = 0", EXACT, schwarzian_rotation),
        def("virasoro", "schwarzian_cocycle", "S(f∘g) = S(f)∘g·g'^2 + S(g)", 1e-8, schwarzian_cocycle),
        def("virasoro", "schwarzian_anchor", "S(x + 0.1 sin x)(0) = -1/11", 1e-12, schwarzian_anchor),
        def("virasoro", "coad_duality", "<ad*_X μ, Y> + <μ, [X,Y]> = 0", 1e-10, coad_duality),
        def("virasoro", "coadjoint_operator_isomorphism", "ad*_X (u, c) = L_X^{3/2} L - L L_X^{-1/2} for L = -2c d² + u", 1e-12, coadjoint_operator_isomorphism),
        def("virasoro", "group_coad_flow_derivative", "d/dt Ad*_{φ_t} μ = ad*_X μ", 1e-5, group_coad_flow_derivative),
        def("sturm", "monodromy_trace_anchor", "tr M(ψ'' = ψ) = e^{2π} + e^{-2π}", 1e-6, monodromy_trace_anchor),
        def("sturm", "monodromy_lift_anchor", "lift index of ψ'' = -ψ is 2", 0.5, monodromy_lift_anchor),
        def("sturm", "monodromy_trace_invariance", "tr M(Ad*_f L) = tr M(L), d/ds tr M(L + s ad*_X L) = 0", 1e-6, monodromy_trace_invariance),
        def("sturm", "monodromy_lift_invariance", "lift index of Ad*_f L = lift index of L", 0.5, monodromy_lift_invariance),
        def("sturm", "homotopy_field_tangency", "X u' + 2 X' u + (a/2) X''' = u̇ for X = ψ1 ψ̇2 - ψ2 ψ̇1, relative to max(1, |M|²/2)", 1e-9, homotopy_field_tangency),
        def("sturm", "solution_products_stabilize", "ψiψj span the stabilizer of L", 1e-8, solution_products_stabilize),
    ];
    out.extend(algebra::catalogue());
    out
}

fn kind_of(ctx: &mut Ctx) -> CocycleKind {
    *KINDS.choose(&mut ctx.rng).expect("non-empty")
}

fn trig_product_pointwise(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (f, g) = (trig(&mut ctx.rng, 6, 1.0), trig(&mut ctx.rng, 6, 1.0));
        let fg = f.product(&g);
        for j in 0..64 {
            let x = 2.0 * PI * j as f64 / 64.0 + 0.01;
            worst = worst.max((fg.eval(x) - f.eval(x) * g.eval(x)).abs());
        }
    }
    Ok(Measured::new(worst))
}

fn diffeo_inverse(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let f = diffeo(&mut ctx.rng, 3, 0.5)?;
        let id = diffeo::compose(&f, &diffeo::invert(&f, &cfg)?, &cfg)?;
        worst = worst.max(id.distance(&CircleDiffeo::identity(), cfg.grid_size()));
    }
    Ok(Measured::new(worst))
}

fn flow_group_law(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let x = trig(&mut ctx.rng, 3, 0.5);
        let (s, t) = (uniform(&mut ctx.rng, -0.5, 0.5), uniform(&mut ctx.rng, -0.5, 0.5));
        let lhs = diffeo::compose(&diffeo::flow(&x, s, &cfg)?, &diffeo::flow(&x, t, &cfg)?, &cfg)?;
        let rhs = diffeo::flow(&x, s + t, &cfg)?;
        worst = worst.max(lhs.distance(&rhs, cfg.grid_size()));
    }
    Ok(Measured::new(worst))
}

const WEIGHTS: [f64; 7] = [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0];

fn random_weight(ctx: &mut Ctx) -> f64 {
    *WEIGHTS.choose(&mut ctx.rng).expect("non-empty")
}

fn density_action_law(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (f, g) = (diffeo(&mut ctx.rng, 3, 0.4)?, diffeo(&mut ctx.rng, 3, 0.4)?);
        let a = Density::new(random_weight(ctx), trig(&mut ctx.rng, 4, 1.0));
        let lhs = density::diffeo_act(&diffeo::compose(&g, &f, &cfg)?, &a, &cfg)?;
        let rhs = density::diffeo_act(&g, &density::diffeo_act(&f, &a, &cfg)?, &cfg)?;
        worst = worst.max(lhs.value.distance(&rhs.value));
    }
    Ok(Measured::new(worst))
}

fn density_flow_derivative(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let x = trig(&mut ctx.rng, 3, 0.5);
        let a = Density::new(random_weight(ctx), trig(&mut ctx.rng, 4, 1.0));
        let fwd = density::diffeo_act(&diffeo::flow(&x, h, &cfg)?, &a, &cfg)?;
        let back = density::diffeo_act(&diffeo::flow(&x, -h, &cfg)?, &a, &cfg)?;
        let fd = (&fwd.value - &back.value).scale(0.5 / h);
        let lie = density::lie_derivative(&x, &a).value;
        worst = worst.max((&fd + &lie).max_norm());
    }
    Ok(Measured::new(worst))
}

fn density_pairing_invariance(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let lam = random_weight(ctx);
        let a = Density::new(lam, trig(&mut ctx.rng, 4, 1.0));
        let b = Density::new(1.0 - lam, trig(&mut ctx.rng, 4, 1.0));
        let x = trig(&mut ctx.rng, 4, 1.0);
        let inf = density::pairing(&density::lie_derivative(&x, &a), &b)?
            + density::pairing(&a, &density::lie_derivative(&x, &b))?;
        let g = diffeo(&mut ctx.rng, 3, 0.4)?;
        let moved = density::pairing(&density::diffeo_act(&g, &a, &cfg)?, &density::diffeo_act(&g, &b, &cfg)?)?;
        worst = worst.max(inf.abs()).max((moved - density::pairing(&a, &b)?).abs());
    }
    Ok(Measured::new(worst))
}

fn gf_cocycle_identity(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let kind = kind_of(ctx);
        let (x, y, z) = (trig(&mut ctx.rng, 5, 1.0), trig(&mut ctx.rng, 5, 1.0), trig(&mut ctx.rng, 5, 1.0));
        let w = |a: &TrigPoly, b: &TrigPoly| virasoro::gf_cocycle(a, b, kind);
        let br = virasoro::vect_bracket;
        let cyclic = w(&br(&x, &y), &z) + w(&br(&y, &z), &x) + w(&br(&z, &x), &y);
        let antisym = w(&x, &y) + w(&y, &x);
        worst = worst.max(cyclic.abs()).max(antisym.abs());
    }
    Ok(Measured::new(worst))
}

fn gf_anchor(_: &mut Ctx) -> Result<Measured> {
    let w = virasoro::gf_cocycle(&TrigPoly::sin_mode(1), &TrigPoly::cos_mode(1), CocycleKind::Standard);
    Ok(Measured::with_note((w + PI).abs(), format!("ω(sin, cos) = {w}")))
}

fn modified_sl2_vanishing(ctx: &mut Ctx) -> Result<Measured> {
    let sl2 = [TrigPoly::constant(1.0), TrigPoly::sin_mode(1), TrigPoly::cos_mode(1)];
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let y = trig(&mut ctx.rng, 6, 1.0);
        for s in &sl2 {
            worst = worst
                .max(virasoro::gf_cocycle(s, &y, CocycleKind::Modified).abs())
                .max(virasoro::gf_cocycle(&y, s, CocycleKind::Modified).abs());
        }
    }
    Ok(Measured::new(worst))
}

fn bott_cocycle_identity(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let f = diffeo(&mut ctx.rng, 3, 0.5)?;
        let g = diffeo(&mut ctx.rng, 3, 0.5)?;
        let h = diffeo(&mut ctx.rng, 3, 0.5)?;
        let b = |p: &CircleDiffeo, q: &CircleDiffeo| virasoro::bott_cocycle(p, q, &cfg);
        let fg = diffeo::compose(&f, &g, &cfg)?;
        let gh = diffeo::compose(&g, &h, &cfg)?;
        worst = worst.max((b(&fg, &h) + b(&f, &g) - b(&f, &gh) - b(&g, &h)).abs());
    }
    Ok(Measured::new(worst))
}

fn schwarzian_rotation(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let r = CircleDiffeo::rotation(uniform(&mut ctx.rng, -PI, PI));
        for kind in KINDS {
            worst = worst.max(virasoro::schwarzian(&r, kind, &cfg)?.value.max_norm());
        }
    }
    Ok(Measured::new(worst))
}

fn schwarzian_cocycle(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let kind = kind_of(ctx);
        let (f, g) = (diffeo(&mut ctx.rng, 3, 0.5)?, diffeo(&mut ctx.rng, 3, 0.5)?);
        let lhs = virasoro::schwarzian(&diffeo::compose(&f, &g, &cfg)?, kind, &cfg)?;
        let sf = virasoro::schwarzian(&f, kind, &cfg)?;
        let rhs = &density::pullback(&g, &sf, &cfg)?.value + &virasoro::schwarzian(&g, kind, &cfg)?.value;
        worst = worst.max(lhs.value.distance(&rhs));
    }
    Ok(Measured::new(worst))
}

fn schwarzian_anchor(_: &mut Ctx) -> Result<Measured> {
    let f = CircleDiffeo::new(0.0, TrigPoly::sin_mode(1).scale(0.1))?;
    let s = virasoro::schwarzian_at(&f, 0.0, CocycleKind::Standard);
    Ok(Measured::new((s + 1.0 / 11.0).abs()))
}

fn random_covector(ctx: &mut Ctx) -> VirasoroCovector {
    let u = trig(&mut ctx.rng, 5, 1.0);
    let c = uniform(&mut ctx.rng, -2.0, 2.0);
    VirasoroCovector::new(u, c)
}

fn coad_duality(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let kind = kind_of(ctx);
        let mu = random_covector(ctx);
        let x = VirasoroElement::field(trig(&mut ctx.rng, 5, 1.0));
        let y = VirasoroElement::new(trig(&mut ctx.rng, 5, 1.0), uniform(&mut ctx.rng, -1.0, 1.0));
        let lhs = ctx.formulas.coad(&x, &mu, kind).pair(&y);
        let rhs = mu.pair(&virasoro::vir_bracket(&x, &y, kind));
        worst = worst.max((lhs + rhs).abs());
    }
    Ok(Measured::new(worst))
}

fn coadjoint_operator_isomorphism(ctx: &mut Ctx) -> Result<Measured> {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mu = random_covector(ctx);
        let x = VirasoroElement::field(trig(&mut ctx.rng, 5, 1.0));
        let from_coad = ctx.formulas.coad(&x, &mu, CocycleKind::Standard).u;
        let from_operator = sturm::sl_vect_act(&x.x, &SturmLiouville::from_covector(&mu), 1e-10)?;
        worst = worst.max(from_coad.distance(&from_operator));
    }
    Ok(Measured::new(worst))
}

fn group_coad_flow_derivative(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let kind = kind_of(ctx);
        let mu = random_covector(ctx);
        let x = trig(&mut ctx.rng, 3, 0.5);
        let fwd = ctx.formulas.group_coad(&diffeo::flow(&x, h, &cfg)?, &mu, kind, &cfg)?;
        let back = ctx.formulas.group_coad(&diffeo::flow(&x, -h, &cfg)?, &mu, kind, &cfg)?;
        let fd = (&fwd.u - &back.u).scale(0.5 / h);
        let inf = ctx.formulas.coad(&VirasoroElement::field(x), &mu, kind).u;
        worst = worst.max(fd.distance(&inf));
    }
    Ok(Measured::new(worst))
}

fn monodromy_trace_anchor(ctx: &mut Ctx) -> Result<Measured> {
    let l = SturmLiouville::new(1.0, TrigPoly::constant(-1.0));
    let (inv, _) = sturm::monodromy(&l, ctx.rk4_steps, &ctx.settings)?;
    let exact = (2.0 * PI).exp() + (-2.0 * PI).exp();
    Ok(Measured::with_note((inv.trace - exact).abs(), format!("trace = {}", inv.trace)))
}

fn monodromy_lift_anchor(ctx: &mut Ctx) -> Result<Measured> {
    let l = SturmLiouville::new(1.0, TrigPoly::constant(1.0));
    let (inv, _) = sturm::monodromy(&l, ctx.rk4_steps, &ctx.settings)?;
    Ok(Measured::with_note(
        (inv.lift_index - 2).abs() as f64,
        format!("trace = {}, lift_index = {}", inv.trace, inv.lift_index),
    ))
}

/// Operators `-2c d² + u` with `c` in `[0.25, 1]` and a mix of monodromy classes.
fn random_operator(ctx: &mut Ctx) -> SturmLiouville {
    let c = uniform(&mut ctx.rng, 0.25, 1.0);
    let mut u = trig(&mut ctx.rng, 4, 0.5);
    u += &TrigPoly::constant(uniform(&mut ctx.rng, -1.0, 3.0));
    SturmLiouville::from_covector(&VirasoroCovector::new(u, c))
}

fn monodromy_transports(ctx: &mut Ctx) -> Result<(f64, i64)> {
    let cfg = ctx.settings.clone();
    let steps = ctx.rk4_steps;
    let (mut trace_err, mut lift_err): (f64, i64) = (0.0, 0);
    for _ in 0..20 {
        let l = random_operator(ctx);
        let mu = l.to_covector();
        let (base, _) = sturm::monodromy(&l, steps, &cfg)?;
        let scale = base.trace.abs().max(1.0);
        for _ in 0..10 {
            let f = diffeo(&mut ctx.rng, 3, 0.5)?;
            let moved = ctx.formulas.group_coad(&f, &mu, CocycleKind::Standard, &cfg)?;
            let (inv, _) = sturm::monodromy(&SturmLiouville::from_covector(&moved), steps, &cfg)?;
            trace_err = trace_err.max((inv.trace - base.trace).abs() / scale);
            lift_err = lift_err.max((inv.lift_index - base.lift_index).abs());
        }
        let x = VirasoroElement::field(trig(&mut ctx.rng, 3, 0.5));
        let du = ctx.formulas.coad(&x, &mu, CocycleKind::Standard).u;
        let h = 1e-4;
        let shifted = |s: f64| SturmLiouville::new(l.a, &l.u + &du.scale(s));
        let (plus, _) = sturm::monodromy(&shifted(h), steps, &cfg)?;
        let (minus, _) = sturm::monodromy(&shifted(-h), steps, &cfg)?;
        trace_err = trace_err.max(((plus.trace - minus.trace) / (2.0 * h)).abs() / scale);
    }
    Ok((trace_err, lift_err))
}

fn monodromy_trace_invariance(ctx: &mut Ctx) -> Result<Measured> {
    let (trace_err, _) = monodromy_transports(ctx)?;
    Ok(Measured::with_note(trace_err, "relative to max(1, |trace|)"))
}

fn monodromy_lift_invariance(ctx: &mut Ctx) -> Result<Measured> {
    let (_, lift_err) = monodromy_transports(ctx)?;
    Ok(Measured::new(lift_err as f64))
}

fn homotopy_field_tangency(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let (mut worst, mut worst_abs): (f64, f64) = (0.0, 0.0);
    for _ in 0..5 {
        let l = random_operator(ctx);
        let y = trig(&mut ctx.rng, 3, 0.5);
        let u_dot = sturm::sl_vect_act(&y, &l, 1e-10)?;
        let x = sturm::homotopy_field(&l, &u_dot, 4 * ctx.rk4_steps, &cfg)?;
        let moved = sturm::sl_vect_act(&x, &l, 1e-10)?;
        // X is a cancelling product of solutions, so roundoff grows like |M|^2.
        let m = sturm::fundamental_path(&l, ctx.rk4_steps, &cfg)?.monodromy();
        let size = (0.5 * m.norm_squared()).max(1.0);
        worst = worst.max(moved.distance(&u_dot) / size);
        worst_abs = worst_abs.max(moved.distance(&u_dot));
    }
    Ok(Measured::with_note(worst, format!("absolute residual {worst_abs:.2e}")))
}

fn solution_products_stabilize(ctx: &mut Ctx) -> Result<Measured> {
    let cfg = ctx.settings.clone();
    let mut worst: f64 = 0.0;
    for (a, u) in [(4.0, 1.0), (1.0, 1.0), (1.0, 4.0), (-2.0, -4.5)] {
        let l = SturmLiouville::new(a, TrigPoly::constant(u));
        for x in &sturm::projective_sl2_triple(&l, ctx.rk4_steps, &cfg)? {
            worst = worst.max(sturm::sl_vect_act(x, &l, 1e-8)?.max_norm());
        }
    }
    Ok(Measured::new(worst))
}
