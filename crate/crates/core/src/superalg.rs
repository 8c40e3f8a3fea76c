//! Ramond and Neveu-Schwarz superalgebras `Vect(S^1) ⊕ R ⊕ F_{-1/2}`.

use serde::{Deserialize, Serialize};

use crate::density::{self, Density};
use crate::error::{Error, Result};
use crate::trig::{Parity, TrigPoly};
use crate::virasoro::{self, CocycleKind, VirasoroCovector, VirasoroElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// Periodic odd part.
    Ramond,
    /// Anti-periodic odd part.
    #[serde(alias = "ns")]
    NeveuSchwarz,
}

impl Sector {
    pub fn parity(self) -> Parity {
        match self {
            Sector::Ramond => Parity::Periodic,
            Sector::NeveuSchwarz => Parity::AntiPeriodic,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperElement {
    pub x: TrigPoly,
    pub alpha: f64,
    pub xi: TrigPoly,
    pub sector: Sector,
}

impl SuperElement {
    pub fn new(x: TrigPoly, alpha: f64, xi: TrigPoly, sector: Sector) -> Result<Self> {
        if !x.is_periodic() || (!xi.is_zero() && xi.parity() != sector.parity()) {
            return Err(Error::ParityMismatch);
        }
        let xi = if xi.is_zero() {
            TrigPoly::zero_of(sector.parity())
        } else {
            xi
        };
        Ok(SuperElement {
            x,
            alpha,
            xi,
            sector,
        })
    }

    pub fn even(x: TrigPoly, alpha: f64, sector: Sector) -> Self {
        SuperElement {
            x,
            alpha,
            xi: TrigPoly::zero_of(sector.parity()),
            sector,
        }
    }

    pub fn odd(xi: TrigPoly, sector: Sector) -> Result<Self> {
        SuperElement::new(TrigPoly::zero(), 0.0, xi, sector)
    }

    pub fn even_part(&self) -> SuperElement {
        SuperElement::even(self.x.clone(), self.alpha, self.sector)
    }

    pub fn odd_part(&self) -> SuperElement {
        SuperElement {
            x: TrigPoly::zero(),
            alpha: 0.0,
            xi: self.xi.clone(),
            sector: self.sector,
        }
    }

    fn combine(&self, other: &SuperElement, s: f64) -> SuperElement {
        SuperElement {
            x: &self.x + &other.x.scale(s),
            alpha: self.alpha + s * other.alpha,
            xi: self
                .xi
                .checked_add(&other.xi.scale(s))
                .expect("same sector"),
            sector: self.sector,
        }
    }

    pub fn add(&self, other: &SuperElement) -> SuperElement {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &SuperElement) -> SuperElement {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, s: f64) -> SuperElement {
        SuperElement {
            x: self.x.scale(s),
            alpha: s * self.alpha,
            xi: self.xi.scale(s),
            sector: self.sector,
        }
    }

    /// Largest coefficient or central magnitude.
    pub fn norm(&self) -> f64 {
        self.x.max_norm().max(self.xi.max_norm()).max(self.alpha.abs())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuperCovector {
    pub u: TrigPoly,
    pub c: f64,
    pub phi: TrigPoly,
    pub sector: Sector,
}

impl SuperCovector {
    pub fn new(u: TrigPoly, c: f64, phi: TrigPoly, sector: Sector) -> Result<Self> {
        if !u.is_periodic() || (!phi.is_zero() && phi.parity() != sector.parity()) {
            return Err(Error::ParityMismatch);
        }
        let phi = if phi.is_zero() {
            TrigPoly::zero_of(sector.parity())
        } else {
            phi
        };
        Ok(SuperCovector { u, c, phi, sector })
    }

    /// `∫ u Y dx + c beta + ∫ phi eta dx`.
    pub fn pair(&self, b: &SuperElement) -> Result<f64> {
        check_sector(self.sector, b.sector)?;
        Ok(self.u.product(&b.x).integrate_period()
            + self.c * b.alpha
            + self.phi.product(&b.xi).integrate_period())
    }
}

fn check_sector(a: Sector, b: Sector) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::SectorMismatch)
    }
}

fn lie_half(x: &TrigPoly, xi: &TrigPoly) -> TrigPoly {
    density::lie_derivative(x, &Density::new(-0.5, xi.clone())).value
}

/// Central cocycle `ω(X, Y) + 2 ∫ ξ' η' dx` with `ω` the Gelfand-Fuchs cocycle.
pub fn super_cocycle(a: &SuperElement, b: &SuperElement) -> f64 {
    virasoro::gf_cocycle(&a.x, &b.x, CocycleKind::Standard)
        + 2.0 * a.xi.derivative().product(&b.xi.derivative()).integrate_period()
}

/// `∫ (X'' Y' + 2 ξ' η') dx`, whose even part has the opposite sign of `ω`.
///
/// Kept for comparison; it does not satisfy the graded Jacobi identity with [`super_bracket`].
pub fn printed_super_cocycle(a: &SuperElement, b: &SuperElement) -> f64 {
    let even = a.x.nth_derivative(2).product(&b.x.derivative()).integrate_period();
    even + 2.0 * a.xi.derivative().product(&b.xi.derivative()).integrate_period()
}

pub fn super_bracket(a: &SuperElement, b: &SuperElement) -> Result<SuperElement> {
    super_bracket_with(a, b, super_cocycle)
}

pub fn super_bracket_with(
    a: &SuperElement,
    b: &SuperElement,
    cocycle: fn(&SuperElement, &SuperElement) -> f64,
) -> Result<SuperElement> {
    check_sector(a.sector, b.sector)?;
    let x = &virasoro::vect_bracket(&a.x, &b.x) + &a.xi.product(&b.xi);
    let xi = &lie_half(&a.x, &b.xi) - &lie_half(&b.x, &a.xi);
    Ok(SuperElement {
        x,
        alpha: cocycle(a, b),
        xi,
        sector: a.sector,
    })
}

/// Candidate sl2-equivariant cocycles on the Neveu-Schwarz algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OspVariant {
    /// `∫ ((X''' + X') Y + 2 (ξ'' + 4 ξ) η) dx`.
    Printed,
    /// `∫ ((X''' + X') Y + 2 (ξ'' + ξ/4) η) dx`.
    QuarterShift,
    /// `∫ ((X''' + X') Y - 2 (ξ'' + ξ/4) η) dx`, cohomologous to [`super_cocycle`].
    Cohomologous,
}

impl OspVariant {
    pub const ALL: [OspVariant; 3] = [
        OspVariant::Printed,
        OspVariant::QuarterShift,
        OspVariant::Cohomologous,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OspVariant::Printed => "printed",
            OspVariant::QuarterShift => "quarter_shift",
            OspVariant::Cohomologous => "cohomologous",
        }
    }
}

/// The printed equivariant cocycle, evaluated verbatim.
pub fn osp_cocycle(a: &SuperElement, b: &SuperElement) -> Result<f64> {
    osp_cocycle_variant(a, b, OspVariant::Printed)
}

pub fn osp_cocycle_variant(a: &SuperElement, b: &SuperElement, v: OspVariant) -> Result<f64> {
    check_sector(a.sector, b.sector)?;
    if a.sector != Sector::NeveuSchwarz {
        return Err(Error::SectorMismatch);
    }
    let even = virasoro::gf_cocycle(&a.x, &b.x, CocycleKind::Modified);
    let xi2 = a.xi.nth_derivative(2);
    let (sign, shift) = match v {
        OspVariant::Printed => (1.0, 4.0),
        OspVariant::QuarterShift => (1.0, 0.25),
        OspVariant::Cohomologous => (-1.0, 0.25),
    };
    let odd = (&xi2 + &a.xi.scale(shift)).product(&b.xi).integrate_period();
    Ok(even + 2.0 * sign * odd)
}

/// Graded Jacobi sum over homogeneous components, as a max-norm.
pub fn super_jacobi_residual(a: &SuperElement, b: &SuperElement, c: &SuperElement) -> Result<f64> {
    super_jacobi_residual_with(a, b, c, super_cocycle)
}

pub fn super_jacobi_residual_with(
    a: &SuperElement,
    b: &SuperElement,
    c: &SuperElement,
    cocycle: fn(&SuperElement, &SuperElement) -> f64,
) -> Result<f64> {
    check_sector(a.sector, b.sector)?;
    check_sector(a.sector, c.sector)?;
    let parts = |e: &SuperElement| [(e.even_part(), 0u8), (e.odd_part(), 1u8)];
    let br = |p: &SuperElement, q: &SuperElement| super_bracket_with(p, q, cocycle);
    let mut total = SuperElement::even(TrigPoly::zero(), 0.0, a.sector);
    for (pa, ea) in parts(a) {
        for (pb, eb) in parts(b) {
            for (pc, ec) in parts(c) {
                let sign = |p: u8, q: u8| if p & q == 1 { -1.0 } else { 1.0 };
                let t1 = br(&pa, &br(&pb, &pc)?)?.scale(sign(ea, ec));
                let t2 = br(&pb, &br(&pc, &pa)?)?.scale(sign(eb, ea));
                let t3 = br(&pc, &br(&pa, &pb)?)?.scale(sign(ec, eb));
                total = total.add(&t1).add(&t2).add(&t3);
            }
        }
    }
    Ok(total.norm())
}

/// Coefficients of the coadjoint formula, in the order
/// `[X u', X' u, c X''', ξ φ', ξ' φ]` for the quadratic part and
/// `[X φ', X' φ, u ξ, c ξ'']` for the 3/2 part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperCoadCoeffs {
    pub quadratic: [f64; 5],
    pub odd: [f64; 4],
}

impl Default for SuperCoadCoeffs {
    fn default() -> Self {
        SuperCoadCoeffs {
            quadratic: [1.0, 2.0, -1.0, 0.5, 1.5],
            odd: [1.0, 1.5, 1.0, -2.0],
        }
    }
}

pub fn super_coad(a: &SuperElement, mu: &SuperCovector) -> Result<SuperCovector> {
    super_coad_with(a, mu, &SuperCoadCoeffs::default())
}

pub fn super_coad_with(
    a: &SuperElement,
    mu: &SuperCovector,
    k: &SuperCoadCoeffs,
) -> Result<SuperCovector> {
    check_sector(a.sector, mu.sector)?;
    let (x, xi, u, phi) = (&a.x, &a.xi, &mu.u, &mu.phi);
    let (x1, xi1) = (x.derivative(), xi.derivative());
    let q = k.quadratic;
    let quad = [
        x.product(&u.derivative()),
        x1.product(u),
        x1.nth_derivative(2).scale(mu.c),
        xi.product(&phi.derivative()),
        xi1.product(phi),
    ];
    let mut new_u = TrigPoly::zero();
    for (coef, term) in q.iter().zip(&quad) {
        new_u += &term.scale(*coef);
    }
    let o = k.odd;
    let odd = [
        x.product(&phi.derivative()),
        x1.product(phi),
        u.product(xi),
        xi1.derivative().scale(mu.c),
    ];
    let mut new_phi = TrigPoly::zero_of(a.sector.parity());
    for (coef, term) in o.iter().zip(&odd) {
        new_phi = new_phi.checked_add(&term.scale(*coef))?;
    }
    SuperCovector::new(new_u, 0.0, new_phi, a.sector)
}

/// Graded duality defect `<ad*_A μ, B> + sum (-1)^{|A||B|} <μ, [A, B]>` over homogeneous parts.
pub fn duality_residual(
    a: &SuperElement,
    mu: &SuperCovector,
    b: &SuperElement,
    coad: &SuperCovector,
) -> Result<f64> {
    let full = mu.pair(&super_bracket(a, b)?)?;
    let odd_odd = mu.pair(&super_bracket(&a.odd_part(), &b.odd_part())?)?;
    Ok((coad.pair(b)? + full - 2.0 * odd_odd).abs())
}

/// Even restriction as a Virasoro covector.
pub fn even_covector(mu: &SuperCovector) -> VirasoroCovector {
    VirasoroCovector::new(mu.u.clone(), mu.c)
}

pub fn even_element(a: &SuperElement) -> VirasoroElement {
    VirasoroElement::new(a.x.clone(), a.alpha)
}
