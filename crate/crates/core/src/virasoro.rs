//! The Virasoro algebra and group: cocycles, brackets, coadjoint actions, Schwarzians.

use serde::{Deserialize, Serialize};

use crate::density::{self, Density};
use crate::diffeo::CircleDiffeo;
use crate::error::Result;
use crate::grid::{self, QuadratureGrid};
use crate::settings::Settings;
use crate::sturm::SturmLiouville;
use crate::trig::TrigPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CocycleKind {
    #[default]
    Standard,
    /// The sl2-equivariant normalization.
    Modified,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VirasoroElement {
    pub x: TrigPoly,
    pub alpha: f64,
}

impl VirasoroElement {
    pub fn new(x: TrigPoly, alpha: f64) -> Self {
        VirasoroElement { x, alpha }
    }

    pub fn field(x: TrigPoly) -> Self {
        VirasoroElement { x, alpha: 0.0 }
    }
}

/// A regular dual element `(u (dx)^2, c)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VirasoroCovector {
    pub u: TrigPoly,
    pub c: f64,
}

impl VirasoroCovector {
    pub fn new(u: TrigPoly, c: f64) -> Self {
        VirasoroCovector { u, c }
    }

    pub fn density(&self) -> Density {
        Density::new(2.0, self.u.clone())
    }

    /// `∫ u X dx + c alpha`.
    pub fn pair(&self, a: &VirasoroElement) -> f64 {
        self.u.product(&a.x).integrate_period() + self.c * a.alpha
    }
}

/// Lie bracket of vector fields, `X Y' - X' Y`.
pub fn vect_bracket(x: &TrigPoly, y: &TrigPoly) -> TrigPoly {
    &x.product(&y.derivative()) - &x.derivative().product(y)
}

/// Standard: `1/2 ∫ (X'Y'' - X''Y') dx`. Modified: `∫ (X''' + X') Y dx`.
pub fn gf_cocycle(x: &TrigPoly, y: &TrigPoly, kind: CocycleKind) -> f64 {
    match kind {
        CocycleKind::Standard => {
            let (x1, y1) = (x.derivative(), y.derivative());
            let integrand = &x1.product(&y1.derivative()) - &x1.derivative().product(&y1);
            0.5 * integrand.integrate_period()
        }
        CocycleKind::Modified => {
            let x1 = x.derivative();
            let k = &x1.nth_derivative(2) + &x1;
            k.product(y).integrate_period()
        }
    }
}

pub fn vir_bracket(a: &VirasoroElement, b: &VirasoroElement, kind: CocycleKind) -> VirasoroElement {
    VirasoroElement::new(vect_bracket(&a.x, &b.x), gf_cocycle(&a.x, &b.x, kind))
}

/// Infinitesimal coadjoint action; the central component of the result is always zero.
pub fn coad(a: &VirasoroElement, mu: &VirasoroCovector, kind: CocycleKind) -> VirasoroCovector {
    let transport = density::lie_derivative(&a.x, &mu.density()).value;
    let x3 = a.x.nth_derivative(3);
    let central = match kind {
        CocycleKind::Standard => x3,
        CocycleKind::Modified => &x3 + &a.x.derivative(),
    };
    VirasoroCovector::new(&transport - &central.scale(mu.c), 0.0)
}

/// The group 2-cocycle `∫ log((f∘g)') d log(g')`, by trapezoid quadrature on `bott_nodes` points.
pub fn bott_cocycle(f: &CircleDiffeo, g: &CircleDiffeo, cfg: &Settings) -> f64 {
    QuadratureGrid::new(cfg.bott_nodes.next_power_of_two()).integrate_fn(|x| {
        let g1 = g.d1(x);
        (f.d1(g.eval(x)) * g1).ln() * g.d2(x) / g1
    })
}

/// Pointwise Schwarzian `f'''/f' - 3/2 (f''/f')^2`, plus `1/2 (f'^2 - 1)` for the modified kind.
pub fn schwarzian_at(f: &CircleDiffeo, x: f64, kind: CocycleKind) -> f64 {
    let (d1, d2, d3) = (f.d1(x), f.d2(x), f.d3(x));
    let s = d3 / d1 - 1.5 * (d2 / d1).powi(2);
    match kind {
        CocycleKind::Standard => s,
        CocycleKind::Modified => s + 0.5 * (d1 * d1 - 1.0),
    }
}

/// Schwarzian as a weight-2 density, sampled and projected.
pub fn schwarzian(f: &CircleDiffeo, kind: CocycleKind, cfg: &Settings) -> Result<Density> {
    let proj = grid::project_fn(cfg.grid_size(), cfg.degree_cap, |x| schwarzian_at(f, x, kind));
    Ok(Density::new(2.0, proj.within(cfg.eps_proj)?))
}

/// Group coadjoint action `(u(f) f'^2 - c S(f), c)`.
pub fn group_coad(
    f: &CircleDiffeo,
    mu: &VirasoroCovector,
    kind: CocycleKind,
    cfg: &Settings,
) -> Result<VirasoroCovector> {
    let moved = density::pullback(f, &mu.density(), cfg)?;
    let s = schwarzian(f, kind, cfg)?;
    Ok(VirasoroCovector::new(
        &moved.value - &s.value.scale(mu.c),
        mu.c,
    ))
}

/// The operator `-2c d^2/dx^2 + u + c/2`.
pub fn energy_shift(mu: &VirasoroCovector) -> SturmLiouville {
    SturmLiouville::new(
        -2.0 * mu.c,
        &mu.u + &TrigPoly::constant(0.5 * mu.c),
    )
}
