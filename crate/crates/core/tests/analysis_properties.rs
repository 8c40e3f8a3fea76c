mod common;

use std::f64::consts::PI;

use proptest::prelude::*;

use coadjoint::density::{self, Density};
use coadjoint::diffeo::{self, CircleDiffeo};
use coadjoint::sturm::{self, SturmLiouville};
use coadjoint::virasoro::{self, CocycleKind, VirasoroCovector, VirasoroElement};
use coadjoint::{Settings, TrigPoly};

use common::{diffeo, half_trig, trig};

fn kind() -> impl Strategy<Value = CocycleKind> {
    prop_oneof![Just(CocycleKind::Standard), Just(CocycleKind::Modified)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_agrees_with_pointwise_values(a in trig(5), b in half_trig(4), x in -PI..PI) {
        let p = a.product(&b);
        prop_assert!(!p.is_periodic());
        prop_assert!((p.eval(x) - a.eval(x) * b.eval(x)).abs() < 1e-12);
        prop_assert!(p.distance(&b.product(&a)) < 1e-15);
    }

    #[test]
    fn derivative_obeys_leibniz_and_integrates_to_zero(a in trig(4), b in trig(4)) {
        let lhs = a.product(&b).derivative();
        let rhs = &a.derivative().product(&b) + &a.product(&b.derivative());
        prop_assert!(lhs.distance(&rhs) < 1e-13);
        prop_assert!(a.derivative().integrate_period().abs() < 1e-13);
    }

    #[test]
    fn trig_json_round_trip(a in trig(6), b in half_trig(3)) {
        for p in [a, b] {
            let text = serde_json::to_string(&p).unwrap();
            let back: TrigPoly = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, p);
        }
    }

    #[test]
    fn inverse_undoes_the_map(f in diffeo(), x in -PI..PI) {
        let cfg = Settings::default();
        let inv = diffeo::invert(&f, &cfg).unwrap();
        prop_assert!((inv.eval(f.eval(x)) - x).abs() < 1e-10);
        let id = diffeo::compose(&f, &inv, &cfg).unwrap();
        prop_assert!(id.distance(&CircleDiffeo::identity(), 64) < 1e-9);
    }

    #[test]
    fn density_action_is_a_left_action(f in diffeo(), g in diffeo(), v in trig(4), lam in -2i32..=3) {
        let cfg = Settings::default();
        let a = Density::new(lam as f64 / 2.0, v);
        let lhs = density::diffeo_act(&diffeo::compose(&g, &f, &cfg).unwrap(), &a, &cfg).unwrap();
        let rhs = density::diffeo_act(&g, &density::diffeo_act(&f, &a, &cfg).unwrap(), &cfg).unwrap();
        prop_assert!(lhs.value.distance(&rhs.value) < 1e-8);
    }

    #[test]
    fn lie_derivative_of_dual_pair_is_exact(x in trig(4), a in trig(4), b in trig(4), lam in -2i32..=3) {
        let lam = lam as f64 / 2.0;
        let (a, b) = (Density::new(lam, a), Density::new(1.0 - lam, b));
        let s = density::pairing(&density::lie_derivative(&x, &a), &b).unwrap()
            + density::pairing(&a, &density::lie_derivative(&x, &b)).unwrap();
        prop_assert!(s.abs() < 1e-12);
    }

    #[test]
    fn gf_cocycle_is_antisymmetric_and_closed(x in trig(5), y in trig(5), z in trig(5), k in kind()) {
        let w = |a: &TrigPoly, b: &TrigPoly| virasoro::gf_cocycle(a, b, k);
        prop_assert!((w(&x, &y) + w(&y, &x)).abs() < 1e-12);
        let br = virasoro::vect_bracket;
        let cyc = w(&br(&x, &y), &z) + w(&br(&y, &z), &x) + w(&br(&z, &x), &y);
        prop_assert!(cyc.abs() < 1e-10);
    }

    #[test]
    fn modified_cocycle_kills_sl2(y in trig(6), a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
        let x = TrigPoly::new(a, &[b], &[c]);
        prop_assert!(virasoro::gf_cocycle(&x, &y, CocycleKind::Modified).abs() < 1e-12);
    }

    #[test]
    fn coadjoint_action_is_dual_to_bracket(
        u in trig(5), c in -2.0f64..2.0, x in trig(5), y in trig(5), beta in -1.0f64..1.0, k in kind(),
    ) {
        let mu = VirasoroCovector::new(u, c);
        let a = VirasoroElement::field(x);
        let b = VirasoroElement::new(y, beta);
        let lhs = virasoro::coad(&a, &mu, k).pair(&b);
        let rhs = mu.pair(&virasoro::vir_bracket(&a, &b, k));
        prop_assert!((lhs + rhs).abs() < 1e-10);
    }

    #[test]
    fn coadjoint_action_is_operator_commutator(u in trig(5), c in -2.0f64..2.0, x in trig(5)) {
        let mu = VirasoroCovector::new(u, c);
        let from_coad = virasoro::coad(&VirasoroElement::field(x.clone()), &mu, CocycleKind::Standard).u;
        let from_op = sturm::sl_vect_act(&x, &SturmLiouville::from_covector(&mu), 1e-10).unwrap();
        prop_assert!(from_coad.distance(&from_op) < 1e-12);
    }

    #[test]
    fn schwarzian_is_a_group_cocycle(f in diffeo(), g in diffeo(), k in kind()) {
        let cfg = Settings::default();
        let lhs = virasoro::schwarzian(&diffeo::compose(&f, &g, &cfg).unwrap(), k, &cfg).unwrap();
        let sf = virasoro::schwarzian(&f, k, &cfg).unwrap();
        let rhs = &density::pullback(&g, &sf, &cfg).unwrap().value
            + &virasoro::schwarzian(&g, k, &cfg).unwrap().value;
        prop_assert!(lhs.value.distance(&rhs) < 10.0 * cfg.eps_proj);
    }

    #[test]
    fn rotations_have_zero_schwarzian(t in -PI..PI, x in -PI..PI) {
        let r = CircleDiffeo::rotation(t);
        prop_assert_eq!(virasoro::schwarzian_at(&r, x, CocycleKind::Standard), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn monodromy_is_invariant_under_transport(u in trig(3), shift in 0.0f64..2.0, f in diffeo()) {
        let cfg = Settings::default();
        let mu = VirasoroCovector::new(&u.scale(0.5) + &TrigPoly::constant(shift), 0.5);
        let l = SturmLiouville::from_covector(&mu);
        let (base, _) = sturm::monodromy(&l, 4096, &cfg).unwrap();
        let moved = virasoro::group_coad(&f, &mu, CocycleKind::Standard, &cfg).unwrap();
        let (inv, _) = sturm::monodromy(&SturmLiouville::from_covector(&moved), 4096, &cfg).unwrap();
        prop_assert!((inv.trace - base.trace).abs() < 1e-6 * base.trace.abs().max(1.0));
        prop_assert_eq!(inv.lift_index, base.lift_index);
    }
}

#[test]
fn schwarzian_pointwise_anchor() {
    let f = CircleDiffeo::new(0.0, TrigPoly::sin_mode(1).scale(0.1)).unwrap();
    let s = virasoro::schwarzian_at(&f, 0.0, CocycleKind::Standard);
    assert!((s + 1.0 / 11.0).abs() < 1e-12);
}

#[test]
fn gf_cocycle_anchor() {
    let w = virasoro::gf_cocycle(&TrigPoly::sin_mode(1), &TrigPoly::cos_mode(1), CocycleKind::Standard);
    assert!((w + PI).abs() < 1e-12);
}

#[test]
fn closed_form_monodromies() {
    let cfg = Settings::default();
    let free = sturm::fundamental_path(&SturmLiouville::new(-2.0, TrigPoly::zero()), 1024, &cfg).unwrap();
    let end = free.monodromy();
    assert!((end[(0, 1)] - 2.0 * PI).abs() < 1e-12 && (end[(0, 0)] - 1.0).abs() < 1e-12);

    let (osc, drift) = sturm::monodromy(&SturmLiouville::new(-2.0, TrigPoly::constant(-2.0)), 4096, &cfg).unwrap();
    assert!((osc.trace - 2.0).abs() < 1e-6 && drift < 1e-8);
    assert_eq!(osc.lift_index, 2);

    let (hyp, _) = sturm::monodromy(&SturmLiouville::new(-2.0, TrigPoly::constant(2.0)), 4096, &cfg).unwrap();
    let exact = (2.0 * PI).exp() + (-2.0 * PI).exp();
    assert!((hyp.trace - exact).abs() < 1e-6);
    assert_eq!(hyp.class, sturm::MonodromyClass::Hyperbolic);
}

#[test]
fn too_few_steps_are_reported() {
    let cfg = Settings::default();
    let l = SturmLiouville::new(-0.02, TrigPoly::constant(-1.0).product(&TrigPoly::new(1.0, &[0.5], &[])));
    let err = sturm::fundamental_path(&l, 8, &cfg);
    assert!(matches!(err, Err(coadjoint::Error::StepCountTooSmall { .. })), "{err:?}");
}
