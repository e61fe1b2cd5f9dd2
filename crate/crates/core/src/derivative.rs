//! First derivative of `J_ν` as a pairing and as a gradient field, and the
//! diagonal second-order form along `(u, v)`.

use serde::Serialize;

use crate::error::Result;
use crate::field::{DiscreteField, FieldPair, ProblemParams};
use crate::functionals::{
    self, coupling_trilinear, critical_bilinear, critical_power, gagliardo_bilinear, gagliardo_gradient,
    hardy_bilinear, EnergyBreakdown,
};
use crate::nehari;

/// The seven integrals of `⟨J'_ν(u,v) | (u0,v0)⟩` before the coefficients are applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingTerms {
    /// `Σ (u(x)-u(y))(u0(x)-u0(y)) K`
    pub gag1: f64,
    pub gag2: f64,
    /// `∫ u u0 / |x|^{2s1}`
    pub hardy1: f64,
    pub hardy2: f64,
    /// `∫ |u|^{2*-2} u u0`
    pub crit1: f64,
    pub crit2: f64,
    /// `∫ h u u0 v`
    pub coupling_u: f64,
    /// `∫ h u² v0`
    pub coupling_v: f64,
}

impl PairingTerms {
    /// Terms of `⟨J'(u,v) | (u,v)⟩`, read off a breakdown of the same pair.
    pub fn diagonal(b: &EnergyBreakdown) -> Self {
        Self {
            gag1: b.semi1,
            gag2: b.semi2,
            hardy1: b.hardy1,
            hardy2: b.hardy2,
            crit1: b.crit1,
            crit2: b.crit2,
            coupling_u: b.coupling,
            coupling_v: b.coupling,
        }
    }

    pub fn combine(&self, params: &ProblemParams) -> f64 {
        let nu = params.nu;
        // grouped per component so that ν = 0 reduces exactly to two single-equation values
        ((self.gag1 - params.first.lambda * self.hardy1) - self.crit1)
            + ((self.gag2 - params.second.lambda * self.hardy2) - self.crit2)
            - 2.0 * nu * self.coupling_u
            - nu * self.coupling_v
    }
}

pub fn pairing_terms(pair: &FieldPair, dir: &FieldPair, params: &ProblemParams) -> Result<PairingTerms> {
    params.check_grid(pair.grid())?;
    let quad = &params.quadrature;
    let (p1, p2) = (&params.first, &params.second);
    let FieldPair { u, v } = pair;
    let FieldPair { u: u0, v: v0 } = dir;
    Ok(PairingTerms {
        gag1: gagliardo_bilinear(u, u0, p1.s, quad)?,
        gag2: gagliardo_bilinear(v, v0, p2.s, quad)?,
        hardy1: hardy_bilinear(u, u0, p1.s)?,
        hardy2: hardy_bilinear(v, v0, p2.s)?,
        crit1: critical_bilinear(u, u0, p1.critical_exponent())?,
        crit2: critical_bilinear(v, v0, p2.critical_exponent())?,
        coupling_u: coupling_trilinear(u, u0, v, &params.weight)?,
        coupling_v: coupling_trilinear(u, u, v0, &params.weight)?,
    })
}

/// `⟨J'_ν(u,v) | (u0,v0)⟩`.
pub fn pairing(pair: &FieldPair, dir: &FieldPair, params: &ProblemParams) -> Result<f64> {
    Ok(pairing_terms(pair, dir, params)?.combine(params))
}

/// Fields `(g_u, g_v)` with `⟨(g_u,g_v), dir⟩_{ℓ²·cellvol} = pairing(pair, dir)` for every `dir`.
pub fn gradient_fields(pair: &FieldPair, params: &ProblemParams) -> Result<FieldPair> {
    params.check_grid(pair.grid())?;
    let grid = *pair.grid();
    let (p1, p2) = (&params.first, &params.second);
    let (uv, vv) = (pair.u.values(), pair.v.values());
    let w1 = functionals::hardy_weights(&grid, p1.s)?;
    let w2 = functionals::hardy_weights(&grid, p2.s)?;
    let h = functionals::weight_values(&grid, &params.weight);
    let (e1, e2) = (p1.critical_exponent(), p2.critical_exponent());
    let nu = params.nu;

    let gu = gagliardo_gradient(&pair.u, p1.s)
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let (a, b) = (uv[i], vv[i]);
            g - p1.lambda * a * w1[i] - critical_power(a, e1) - 2.0 * nu * h[i] * a * b
        })
        .collect();
    let gv = gagliardo_gradient(&pair.v, p2.s)
        .into_iter()
        .enumerate()
        .map(|(i, g)| {
            let (a, b) = (uv[i], vv[i]);
            g - p2.lambda * b * w2[i] - critical_power(b, e2) - nu * h[i] * a * a
        })
        .collect();
    FieldPair::new(
        DiscreteField::from_values(grid, gu)?,
        DiscreteField::from_values(grid, gv)?,
    )
}

/// Both forms of `J''_ν(u,v)[u,v]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondForm {
    /// `2‖(u,v)‖² − 2*₁ crit1 − 2*₂ crit2 − 9ν ∫ h u² v`
    pub general: f64,
    /// `−‖(u,v)‖² + (3 − 2*₁) crit1 + (3 − 2*₂) crit2`, valid on the manifold.
    pub reduced: f64,
    pub on_manifold: bool,
}

impl SecondForm {
    pub fn from_breakdown(b: &EnergyBreakdown, params: &ProblemParams) -> Self {
        let (e1, e2) = (params.first.critical_exponent(), params.second.critical_exponent());
        let norm = b.norm_sq(params);
        let general = 2.0 * norm - e1 * b.crit1 - e2 * b.crit2 - 9.0 * params.nu * b.coupling;
        let reduced = -norm + (3.0 - e1) * b.crit1 + (3.0 - e2) * b.crit2;
        let on_manifold = nehari::phi_from_breakdown(b, params).abs() <= nehari::membership_tolerance(b, params);
        Self {
            general,
            reduced,
            on_manifold,
        }
    }

    /// Reduced form on the manifold, general form elsewhere.
    pub fn value(&self) -> f64 {
        if self.on_manifold {
            self.reduced
        } else {
            self.general
        }
    }
}

/// `J''_ν(u,v)[u,v]²`.
pub fn second_form_diag(pair: &FieldPair, params: &ProblemParams) -> Result<f64> {
    let b = functionals::breakdown(pair, params)?;
    Ok(SecondForm::from_breakdown(&b, params).value())
}
