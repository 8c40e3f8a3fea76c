//! Equispaced quadrature and FFT projection back onto trigonometric polynomials.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::trig::TrigPoly;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Nodes `x_j = 2 pi j / M` with equal weights `2 pi / M`.
///
/// The trapezoid rule on this grid integrates every periodic trigonometric
/// polynomial of degree below `M` exactly, up to roundoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    m: usize,
}

impl QuadratureGrid {
    pub fn new(m: usize) -> Self {
        assert!(m.is_power_of_two(), "grid size must be a power of two");
        QuadratureGrid { m }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn weight(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.m as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.m).map(|j| self.node(j))
    }

    pub fn integrate(&self, samples: &[f64]) -> f64 {
        debug_assert_eq!(samples.len(), self.m);
        self.weight() * samples.iter().sum::<f64>()
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weight() * self.nodes().map(f).sum::<f64>()
    }
}

/// Result of projecting grid samples onto a band-limited polynomial.
#[derive(Debug, Clone)]
pub struct Projection {
    pub poly: TrigPoly,
    /// Max-norm misfit between the samples and the retained modes.
    pub residual: f64,
}

impl Projection {
    /// Returns the polynomial, or `ProjectionOverflow` when the residual exceeds `tolerance`.
    pub fn within(self, tolerance: f64) -> Result<TrigPoly> {
        if self.residual.is_finite() && self.residual <= tolerance {
            Ok(self.poly)
        } else {
            Err(Error::ProjectionOverflow {
                residual: self.residual,
                tolerance,
            })
        }
    }
}

/// Projects periodic samples on `QuadratureGrid::new(samples.len())` to a
/// polynomial with modes `0..=degree_cap`.
pub fn project(samples: &[f64], degree_cap: usize) -> Projection {
    let m = samples.len();
    assert!(m.is_power_of_two() && m >= 4, "sample count must be a power of two");
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(m));
    fft.process(&mut buf);

    let keep = degree_cap.min(m / 2 - 1);
    let scale = 2.0 / m as f64;
    let mut cos = Vec::with_capacity(keep + 1);
    let mut sin = Vec::with_capacity(keep + 1);
    cos.push(buf[0].re / m as f64);
    sin.push(0.0);
    for z in &buf[1..=keep] {
        cos.push(scale * z.re);
        sin.push(-scale * z.im);
    }

    // Reconstruct with the kept modes only and measure the misfit.
    let mut spec = vec![Complex::new(0.0, 0.0); m];
    spec[0] = buf[0];
    for k in 1..=keep {
        spec[k] = buf[k];
        spec[m - k] = buf[m - k];
    }
    let ifft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m));
    ifft.process(&mut spec);
    let residual = samples
        .iter()
        .zip(&spec)
        .map(|(s, r)| (s - r.re / m as f64).abs())
        .fold(0.0, f64::max);

    let poly = TrigPoly::from_slots(crate::trig::Parity::Periodic, cos, sin).trimmed(1e-16);
    Projection { poly, residual }
}

/// Samples `f` on `m` nodes and projects.
pub fn project_fn(m: usize, degree_cap: usize, f: impl Fn(f64) -> f64) -> Projection {
    let grid = QuadratureGrid::new(m);
    let samples: Vec<f64> = grid.nodes().map(f).collect();
    project(&samples, degree_cap)
}

/// Fallible variant of [`project_fn`]; the first error aborts the projection.
pub fn try_project_fn(
    m: usize,
    degree_cap: usize,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<Projection> {
    let grid = QuadratureGrid::new(m);
    let samples = grid.nodes().map(f).collect::<Result<Vec<f64>>>()?;
    Ok(project(&samples, degree_cap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trapezoid_is_exact_on_band_limited_input() {
        let g = QuadratureGrid::new(64);
        let p = TrigPoly::new(0.25, &[1.0, 0.0, -3.0], &[0.0, 2.0]);
        let c = &p * &p;
        assert_abs_diff_eq!(
            g.integrate(&c.sample(64)),
            c.integrate_period(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn projection_recovers_coefficients() {
        let p = TrigPoly::new(-0.5, &[0.1, 0.0, 2.0], &[1.0, 0.3, 0.0, 0.7]);
        let proj = project(&p.sample(64), 16);
        assert!(proj.residual < 1e-13);
        assert!(proj.poly.approx_eq(&p, 1e-13));
    }

    #[test]
    fn truncation_reports_residual() {
        let p = TrigPoly::cos_mode(10);
        let proj = project(&p.sample(64), 4);
        assert_abs_diff_eq!(proj.residual, 1.0, epsilon = 1e-12);
        assert!(proj.within(1e-9).is_err());
    }
}
