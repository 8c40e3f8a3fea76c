#![allow(dead_code)]

use proptest::prelude::*;

use coadjoint::diffeo::CircleDiffeo;
use coadjoint::TrigPoly;

pub fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

/// Degree-`d` periodic polynomial with `1/(1+k^2)` decay.
pub fn trig(d: usize) -> impl Strategy<Value = TrigPoly> {
    (coeffs(1), coeffs(d), coeffs(d)).prop_map(|(a, c, s)| {
        let damp = |v: Vec<f64>| -> Vec<f64> {
            v.iter().enumerate().map(|(k, x)| x / (2.0 + (k * k + 2 * k) as f64)).collect()
        };
        TrigPoly::new(a[0], &damp(c), &damp(s))
    })
}

/// Anti-periodic polynomial in the modes `1/2, 3/2, …`.
pub fn half_trig(d: usize) -> impl Strategy<Value = TrigPoly> {
    (coeffs(d), coeffs(d)).prop_map(|(c, s)| {
        let damp = |v: Vec<f64>| -> Vec<f64> {
            v.iter().enumerate().map(|(k, x)| x / (1.0 + (k as f64 + 0.5).powi(2))).collect()
        };
        TrigPoly::half(&damp(c), &damp(s))
    })
}

/// `x + shift + p(x)` with `|p'| ≤ 0.3`.
pub fn diffeo() -> impl Strategy<Value = CircleDiffeo> {
    diffeo_with_slope(0.3)
}

pub fn diffeo_with_slope(max: f64) -> impl Strategy<Value = CircleDiffeo> {
    (trig(3), -3.0f64..3.0).prop_map(move |(p, shift)| {
        let slope = p.derivative().l1_norm().max(1e-12);
        CircleDiffeo::new(shift, p.scale(max / slope)).expect("orientation preserving")
    })
}
