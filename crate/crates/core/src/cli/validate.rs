//! Property suite run by `validate`. Every check uses fixed seeds derived
//! from `validate.seed`.

use serde::Serialize;
use serde_json::{json, Value};

use super::config::RunConfig;
use crate::derivative::{gradient_fields, pairing, SecondForm};
use crate::error::Result;
use crate::field::{random_smooth_field, DiscreteField, FieldPair};
use crate::functionals::{self, energy, gagliardo_sq, hardy_integral};
use crate::nehari::{self, manifold_radius_check, NehariProjection, RestrictedForms};

const HARDY_FIELDS: u64 = 20;
const HARDY_SLACK: f64 = 1.02;
const FD_SAMPLES: u64 = 10;
const FD_STEP: f64 = 1e-5;
const FD_RTOL: f64 = 1e-6;
const BASIS_SAMPLES: u64 = 20;
const REPRESENTATION_RTOL: f64 = 1e-12;
const SUITE: u64 = 20;
const IDENTITY_RTOL: f64 = 1e-10;
const RAY_SCALES: [f64; 2] = [0.2, 5.0];
const MIN_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: Value,
}

fn random_pair(cfg: &RunConfig, seed: u64) -> Result<FieldPair> {
    FieldPair::new(
        random_smooth_field(&cfg.grid, seed, 0.5)?,
        random_smooth_field(&cfg.grid, seed ^ 0x5eed_0000, 0.5)?,
    )
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

/// Runs every check; `Err` only for failures that prevent a check from running at all.
pub fn run_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let params = &cfg.problem;
    let base = cfg.validate.seed.wrapping_mul(1000);
    let mut checks = Vec::new();

    // Λ · ∫u²/|x|^{2s} ≤ 1.02 · [u]²
    let mut worst = 0.0f64;
    for comp in [&params.first, &params.second] {
        let cap = comp.hardy_constant() * cfg.validate.hardy_scale;
        for k in 0..HARDY_FIELDS {
            let u = random_smooth_field(&cfg.grid, base + k, 0.5)?;
            let ratio = cap * hardy_integral(&u, comp.s)? / gagliardo_sq(&u, comp.s);
            worst = worst.max(ratio);
        }
    }
    checks.push(Check {
        name: "hardy_inequality",
        pass: worst <= HARDY_SLACK,
        detail: json!({ "max_ratio": worst, "bound": HARDY_SLACK, "fields_per_component": HARDY_FIELDS }),
    });

    let mut worst = 0.0f64;
    for k in 0..FD_SAMPLES {
        let pair = random_pair(cfg, base + 100 + k)?;
        let dir = random_pair(cfg, base + 200 + k)?;
        let plus = energy(&FieldPair::axpy(FD_STEP, &dir, &pair)?, params)?;
        let minus = energy(&FieldPair::axpy(-FD_STEP, &dir, &pair)?, params)?;
        let fd = (plus - minus) / (2.0 * FD_STEP);
        worst = worst.max(rel(fd, pairing(&pair, &dir, params)?));
    }
    checks.push(Check {
        name: "gradient_finite_difference",
        pass: worst <= FD_RTOL,
        detail: json!({ "max_rel_error": worst, "tolerance": FD_RTOL, "step": FD_STEP }),
    });

    let pair = random_pair(cfg, base + 300)?;
    let grad = gradient_fields(&pair, params)?;
    let n = cfg.grid.len() as u64;
    let mut worst = 0.0f64;
    for k in 0..BASIS_SAMPLES {
        let node = ((k * 7919 + base) % n) as usize;
        let e = DiscreteField::basis(cfg.grid, node);
        let z = DiscreteField::zeros(cfg.grid);
        let dir = if k % 2 == 0 {
            FieldPair::new(e, z)?
        } else {
            FieldPair::new(z, e)?
        };
        worst = worst.max(rel(grad.inner(&dir)?, pairing(&pair, &dir, params)?));
    }
    checks.push(Check {
        name: "gradient_representation",
        pass: worst <= REPRESENTATION_RTOL,
        detail: json!({ "max_rel_error": worst, "tolerance": REPRESENTATION_RTOL, "directions": BASIS_SAMPLES }),
    });

    let pairs: Vec<FieldPair> = (0..SUITE).map(|k| random_pair(cfg, base + 400 + k)).collect::<Result<_>>()?;
    let projections: Vec<NehariProjection> = pairs
        .iter()
        .map(|p| nehari::project(p, params))
        .collect::<Result<_>>()?;

    let mut residual_ok = true;
    let mut tau_err = 0.0f64;
    let mut ray_err = 0.0f64;
    let mut max_roots = 0;
    for (pair, proj) in pairs.iter().zip(&projections) {
        residual_ok &= proj.residual <= proj.tolerance(params);
        max_roots = max_roots.max(proj.root_count);
        tau_err = tau_err.max((nehari::project(&proj.pair, params)?.tau - 1.0).abs());
        for c in RAY_SCALES {
            let other = nehari::project(&pair.scale(c), params)?;
            let diff = FieldPair::axpy(-1.0, &other.pair, &proj.pair)?;
            ray_err = ray_err.max(diff.l2_norm() / proj.pair.l2_norm());
        }
    }
    checks.push(Check {
        name: "nehari_projection",
        pass: residual_ok && tau_err <= 1e-12 && ray_err <= 1e-10,
        detail: json!({
            "residual_within_tolerance": residual_ok,
            "max_tau_error_on_projected": tau_err,
            "max_ray_rel_difference": ray_err,
            "max_root_count": max_roots,
        }),
    });

    let mut spread = 0.0f64;
    let mut max_second = f64::NEG_INFINITY;
    let mut min_level = f64::INFINITY;
    let mut max_gap = 0.0f64;
    for proj in &projections {
        let forms = RestrictedForms::from_breakdown(&proj.breakdown, params)?;
        spread = spread.max(forms.max_rel_spread());
        let second = SecondForm::from_breakdown(&proj.breakdown, params);
        max_second = max_second.max(second.value());
        max_gap = max_gap.max(rel(second.general, second.reduced));
        min_level = min_level.min(forms.form_c);
    }
    checks.push(Check {
        name: "restricted_energy_identities",
        pass: spread <= IDENTITY_RTOL && max_gap <= IDENTITY_RTOL && max_second < 0.0 && min_level > 0.0,
        detail: json!({
            "max_rel_spread": spread,
            "max_second_form": max_second,
            "max_second_form_gap": max_gap,
            "min_level": min_level,
            "pairs": SUITE,
        }),
    });

    let mut ray_ok = true;
    let mut max_far = f64::NEG_INFINITY;
    for proj in &projections {
        let b = &proj.breakdown;
        let top = b.energy(params);
        ray_ok &= top >= b.energy_along_ray(0.5, params) && top >= b.energy_along_ray(2.0, params);
        max_far = max_far.max(b.energy_along_ray(8.0, params));
    }
    checks.push(Check {
        name: "tau_ray_shape",
        pass: ray_ok && max_far < 0.0,
        detail: json!({ "peak_at_projection": ray_ok, "max_energy_at_8_tau": max_far }),
    });

    let radius = manifold_radius_check(&projections, params)?;
    checks.push(Check {
        name: "manifold_radius",
        pass: radius >= MIN_RADIUS,
        detail: json!({ "min_norm": radius, "bound": MIN_RADIUS }),
    });

    let mut identical = true;
    for pair in pairs.iter().take(5) {
        let b = functionals::breakdown(pair, params)?;
        identical &= pairing(pair, pair, params)?.to_bits() == nehari::phi_from_breakdown(&b, params).to_bits();
    }
    checks.push(Check {
        name: "pairing_phi_identity",
        pass: identical,
        detail: json!({ "bit_identical": identical }),
    });

    Ok(checks)
}
