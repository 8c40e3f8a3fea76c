//! Random inputs for the property suites.

use rand::Rng;

use crate::diffeo::CircleDiffeo;
use crate::error::Result;
use crate::trig::TrigPoly;

/// Periodic polynomial with coefficients uniform in `[-scale, scale] / (1 + k^2)`.
pub fn trig<R: Rng>(rng: &mut R, degree: usize, scale: f64) -> TrigPoly {
    let mut draw = |k: usize| scale * rng.gen_range(-1.0..1.0) / (1.0 + (k * k) as f64);
    let a0 = draw(0);
    let cos: Vec<f64> = (1..=degree).map(&mut draw).collect();
    let sin: Vec<f64> = (1..=degree).map(&mut draw).collect();
    TrigPoly::new(a0, &cos, &sin)
}

/// Anti-periodic polynomial in the modes `k + 1/2`, with the same scaling.
pub fn half_trig<R: Rng>(rng: &mut R, degree: usize, scale: f64) -> TrigPoly {
    let mut draw = |k: usize| {
        let f = k as f64 + 0.5;
        scale * rng.gen_range(-1.0..1.0) / (1.0 + f * f)
    };
    let cos: Vec<f64> = (0..degree).map(&mut draw).collect();
    let sin: Vec<f64> = (0..degree).map(&mut draw).collect();
    TrigPoly::half(&cos, &sin)
}

/// `x + shift + p(x)` with a small random `p` and `f' ≥ 1 - 0.3`.
pub fn diffeo<R: Rng>(rng: &mut R, degree: usize, amplitude: f64) -> Result<CircleDiffeo> {
    let mut p = trig(rng, degree, 1.0);
    let slope = p.derivative().l1_norm().max(1e-12);
    p = p.scale(amplitude.min(0.3) / slope);
    let shift = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    CircleDiffeo::new(shift, p)
}

pub fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}
