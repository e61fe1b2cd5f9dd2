//! The Nehari manifold `Φ_ν(u, v) = 0`, projection along rays and the
//! identities satisfied by `J_ν` on it.

use serde::Serialize;

use crate::derivative::PairingTerms;
use crate::error::{Error, Result};
use crate::field::{FieldPair, ProblemParams};
use crate::functionals::{self, EnergyBreakdown};

/// Relative tolerance for manifold membership.
pub const MEMBERSHIP_RTOL: f64 = 1e-10;
/// Geometric search range for the projection factor.
pub const TAU_RANGE: (f64, f64) = (1e-8, 1e8);
/// Number of log-spaced samples used to count roots.
pub const ROOT_SCAN_POINTS: usize = 64;
/// Minimum suite size for [`manifold_radius_check`].
pub const MIN_RADIUS_SUITE: usize = 10;

const BISECTION_RTOL: f64 = 1e-13;
const NEWTON_STEPS: usize = 3;

/// `Φ_ν` recombined from shared integrals; bit-identical to `pairing(pair, pair)`.
pub fn phi_from_breakdown(b: &EnergyBreakdown, params: &ProblemParams) -> f64 {
    PairingTerms::diagonal(b).combine(params)
}

/// `1e-10 · max(1, ‖(u,v)‖²)`.
pub fn membership_tolerance(b: &EnergyBreakdown, params: &ProblemParams) -> f64 {
    MEMBERSHIP_RTOL * b.norm_sq(params).max(1.0)
}

/// `Φ_ν(u,v) = ‖(u,v)‖² − ∫|u|^{2*₁} − ∫|v|^{2*₂} − 3ν ∫ h u² v`.
pub fn phi(pair: &FieldPair, params: &ProblemParams) -> Result<f64> {
    if !pair.is_nonzero() {
        return Err(Error::ZeroField("the Nehari manifold excludes (0, 0)"));
    }
    Ok(phi_from_breakdown(&functionals::breakdown(pair, params)?, params))
}

/// The scalar equation whose positive root puts `(τu, τv)` on the manifold.
#[derive(Debug, Clone, Copy)]
pub struct TauEquation {
    norm: f64,
    crit1: f64,
    crit2: f64,
    cubic: f64,
    e1: f64,
    e2: f64,
}

impl TauEquation {
    pub fn new(b: &EnergyBreakdown, params: &ProblemParams) -> Self {
        Self {
            norm: b.norm_sq(params),
            crit1: b.crit1,
            crit2: b.crit2,
            cubic: 3.0 * params.nu * b.coupling,
            e1: params.first.critical_exponent() - 2.0,
            e2: params.second.critical_exponent() - 2.0,
        }
    }

    /// `τ^{2*₁−2} crit1 + τ^{2*₂−2} crit2 + 3ντ C − ‖(u,v)‖²`.
    pub fn eval(&self, tau: f64) -> f64 {
        tau.powf(self.e1) * self.crit1 + tau.powf(self.e2) * self.crit2 + self.cubic * tau - self.norm
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        self.e1 * tau.powf(self.e1 - 1.0) * self.crit1 + self.e2 * tau.powf(self.e2 - 1.0) * self.crit2 + self.cubic
    }
}

/// Value of the projection equation at `tau`.
pub fn tau_equation(pair: &FieldPair, params: &ProblemParams, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    Ok(TauEquation::new(&functionals::breakdown(pair, params)?, params).eval(tau))
}

/// Result of [`project`].
#[derive(Debug, Clone)]
pub struct NehariProjection {
    pub tau: f64,
    /// `|Φ_ν(τu, τv)|` from a fresh evaluation of the projected pair.
    pub residual: f64,
    /// Sign changes of the projection equation over [`TAU_RANGE`].
    pub root_count: usize,
    /// Set when `root_count > 1`; `tau` is then the smallest root.
    pub multiple_roots: bool,
    pub pair: FieldPair,
    pub breakdown: EnergyBreakdown,
}

impl NehariProjection {
    pub fn tolerance(&self, params: &ProblemParams) -> f64 {
        membership_tolerance(&self.breakdown, params)
    }

    /// `J_ν` at the projected pair.
    pub fn level(&self, params: &ProblemParams) -> f64 {
        self.breakdown.energy(params)
    }
}

/// Scale `pair` onto the manifold along its ray.
pub fn project(pair: &FieldPair, params: &ProblemParams) -> Result<NehariProjection> {
    if !pair.is_nonzero() {
        return Err(Error::ZeroField("cannot project (0, 0)"));
    }
    let b = functionals::breakdown(pair, params)?;
    project_with(pair, &b, params)
}

/// [`project`] reusing an existing breakdown of `pair`.
pub fn project_with(pair: &FieldPair, b: &EnergyBreakdown, params: &ProblemParams) -> Result<NehariProjection> {
    if b.crit1 + b.crit2 <= 0.0 {
        return Err(Error::ProjectionFailed("both critical integrals vanish".into()));
    }
    let eq = TauEquation::new(b, params);
    let (root_count, first_change) = scan_roots(&eq);

    let (mut lo, mut hi) = if root_count > 1 {
        first_change.expect("a sign change exists")
    } else {
        expand_bracket(&eq)?
    };
    let tau = if lo == hi {
        lo
    } else {
        let mut f_lo = eq.eval(lo);
        for _ in 0..400 {
            if hi - lo <= BISECTION_RTOL * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = eq.eval(mid);
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (f_mid < 0.0) == (f_lo < 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        newton_polish(&eq, 0.5 * (lo + hi), lo, hi)
    };

    let projected = pair.scale(tau);
    let pb = functionals::breakdown(&projected, params)?;
    let residual = phi_from_breakdown(&pb, params).abs();
    let tol = membership_tolerance(&pb, params);
    if !(residual <= tol) {
        return Err(Error::ProjectionFailed(format!(
            "residual {residual:e} exceeds {tol:e} at tau = {tau}"
        )));
    }
    Ok(NehariProjection {
        tau,
        residual,
        root_count: root_count.max(1),
        multiple_roots: root_count > 1,
        pair: projected,
        breakdown: pb,
    })
}

/// Doubling/halving from τ = 1 until the sign changes.
fn expand_bracket(eq: &TauEquation) -> Result<(f64, f64)> {
    let f1 = eq.eval(1.0);
    if f1 == 0.0 {
        return Ok((1.0, 1.0));
    }
    let (min, max) = TAU_RANGE;
    if f1 < 0.0 {
        let mut lo = 1.0;
        while lo < max {
            let hi = (2.0 * lo).min(max);
            if eq.eval(hi) >= 0.0 {
                return Ok((lo, hi));
            }
            lo = hi;
        }
    } else {
        let mut hi = 1.0;
        while hi > min {
            let lo = (0.5 * hi).max(min);
            if eq.eval(lo) <= 0.0 {
                return Ok((lo, hi));
            }
            hi = lo;
        }
    }
    Err(Error::ProjectionFailed(format!(
        "no sign change of the projection equation on [{min:e}, {max:e}]"
    )))
}

/// Counts sign changes on a log-spaced scan; returns the first bracketing interval.
fn scan_roots(eq: &TauEquation) -> (usize, Option<(f64, f64)>) {
    let (min, max) = TAU_RANGE;
    let ratio = (max / min).ln() / (ROOT_SCAN_POINTS - 1) as f64;
    let taus: Vec<f64> = (0..ROOT_SCAN_POINTS)
        .map(|k| if k + 1 == ROOT_SCAN_POINTS { max } else { min * (ratio * k as f64).exp() })
        .collect();
    let vals: Vec<f64> = taus.iter().map(|&t| eq.eval(t)).collect();
    let mut count = 0;
    let mut first = None;
    for k in 1..taus.len() {
        if (vals[k - 1] < 0.0) != (vals[k] < 0.0) {
            count += 1;
            first.get_or_insert((taus[k - 1], taus[k]));
        }
    }
    (count, first)
}

/// Newton steps that are kept only when they stay in the bracket and reduce `|f|`.
fn newton_polish(eq: &TauEquation, mut tau: f64, lo: f64, hi: f64) -> f64 {
    let mut f = eq.eval(tau);
    for _ in 0..NEWTON_STEPS {
        let d = eq.derivative(tau);
        if f == 0.0 || d == 0.0 || !d.is_finite() {
            break;
        }
        let next = tau - f / d;
        if !(next >= lo && next <= hi) {
            break;
        }
        let f_next = eq.eval(next);
        if f_next.abs() >= f.abs() {
            break;
        }
        tau = next;
        f = f_next;
    }
    tau
}

/// Three expressions of `J_ν` that coincide on the manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestrictedForms {
    /// `(s₁/N) crit1 + (s₂/N) crit2 + (ν/2) C`
    pub form_a: f64,
    /// `⅙‖(u,v)‖² + (6s₁−N)/(6N) crit1 + (6s₂−N)/(6N) crit2`
    pub form_b: f64,
    /// `J_ν(u, v)`
    pub form_c: f64,
}

impl RestrictedForms {
    pub fn from_breakdown(b: &EnergyBreakdown, params: &ProblemParams) -> Result<Self> {
        let phi = phi_from_breakdown(b, params);
        let tol = membership_tolerance(b, params);
        if !(phi.abs() <= tol) {
            return Err(Error::OffManifold { phi, tol });
        }
        let n = params.dim() as f64;
        let (s1, s2) = (params.first.s, params.second.s);
        Ok(Self {
            form_a: s1 / n * b.crit1 + s2 / n * b.crit2 + 0.5 * params.nu * b.coupling,
            form_b: b.norm_sq(params) / 6.0
                + (6.0 * s1 - n) / (6.0 * n) * b.crit1
                + (6.0 * s2 - n) / (6.0 * n) * b.crit2,
            form_c: b.energy(params),
        })
    }

    /// Largest pairwise relative disagreement.
    pub fn max_rel_spread(&self) -> f64 {
        let v = [self.form_a, self.form_b, self.form_c];
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        (hi - lo) / scale
    }
}

/// The three restricted forms; the pair must already be on the manifold.
pub fn restricted_energy_forms(pair: &FieldPair, params: &ProblemParams) -> Result<RestrictedForms> {
    RestrictedForms::from_breakdown(&functionals::breakdown(pair, params)?, params)
}

/// Smallest `‖(u,v)‖` over a suite of projections.
pub fn manifold_radius_check(suite: &[NehariProjection], params: &ProblemParams) -> Result<f64> {
    if suite.len() < MIN_RADIUS_SUITE {
        return Err(Error::Empty("manifold radius check needs at least 10 projected pairs"));
    }
    let r = suite
        .iter()
        .map(|p| p.breakdown.norm_sq(params).max(0.0).sqrt())
        .fold(f64::INFINITY, f64::min);
    if !(r > 0.0) {
        return Err(Error::Domain(format!("manifold radius {r} is not positive")));
    }
    Ok(r)
}
