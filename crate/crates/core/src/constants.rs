//! Closed-form constants: Gamma function, critical Sobolev exponents, sharp
//! fractional Hardy constants and the Sobolev extremal profile.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(pi x)` with exact argument reduction, so reflection stays accurate
/// far from the origin.
fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n; // exact, |r| <= 1/2
    let v = (PI * r).sin();
    if (n as i64) % 2 == 0 {
        v
    } else {
        -v
    }
}

/// Gamma function on the real line.
///
/// Lanczos series for `x >= 1/2`, reflection `Γ(x)Γ(1-x) = π / sin(πx)` below.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite argument {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Domain(format!("gamma has a pole at {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        PI / (sin_pi(x) * gamma_unchecked(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        // t^(x+1/2) e^-t split in two halves to delay overflow
        let half = t.powf(0.5 * (x + 0.5));
        (2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc
    }
}

fn check_order(dim: usize, s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("fractional order s = {s} must lie in (0, 1)")));
    }
    if dim == 0 || (dim as f64) <= 2.0 * s {
        return Err(Error::Domain(format!("dimension N = {dim} must exceed 2s = {}", 2.0 * s)));
    }
    Ok(())
}

/// Critical Sobolev exponent `2N / (N - 2s)`.
pub fn critical_exponent(dim: usize, s: f64) -> Result<f64> {
    check_order(dim, s)?;
    let n = dim as f64;
    Ok(2.0 * n / (n - 2.0 * s))
}

/// The constant `Λ_{N,s} = 2 π^{N/2} Γ²((N+2s)/4) Γ((N+2s)/2) / (Γ²((N−2s)/4) |Γ(−s)|)`
/// bounding `Λ ∫ u²/|x|^{2s} ≤ [u]²_s`.
pub fn hardy_constant(dim: usize, s: f64) -> Result<f64> {
    check_order(dim, s)?;
    let n = dim as f64;
    let g_plus_q = gamma((n + 2.0 * s) / 4.0)?;
    let g_plus_h = gamma((n + 2.0 * s) / 2.0)?;
    let g_minus_q = gamma((n - 2.0 * s) / 4.0)?;
    let g_neg_s = gamma(-s)?.abs();
    Ok(2.0 * PI.powf(n / 2.0) * g_plus_q * g_plus_q * g_plus_h / (g_minus_q * g_minus_q * g_neg_s))
}

/// Sobolev extremal profile `(1 + |x|²)^{-(N-2s)/2}`, normalised to 1 at the origin.
pub fn sobolev_extremal(dim: usize, s: f64, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), dim);
    let r2: f64 = x.iter().map(|c| c * c).sum();
    (1.0 + r2).powf(-(dim as f64 - 2.0 * s) / 2.0)
}

/// Sobolev extremal dilated by `mu` and centred at `center`:
/// `(1 + |x - c|²/μ²)^{-(N-2s)/2}`.
pub fn sobolev_bump(dim: usize, s: f64, mu: f64, center: &[f64], x: &[f64]) -> f64 {
    let r2: f64 = x
        .iter()
        .zip(center)
        .map(|(a, c)| {
            let d = (a - c) / mu;
            d * d
        })
        .sum();
    (1.0 + r2).powf(-(dim as f64 - 2.0 * s) / 2.0)
}

/// Dimension, order and Hardy weight of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalParams {
    pub dim: usize,
    pub s: f64,
    pub lambda: f64,
}

impl FractionalParams {
    /// Validates `0 < s < 1`, `N > 2s` and `0 <= λ < Λ_{N,s}`.
    pub fn new(dim: usize, s: f64, lambda: f64) -> Result<Self> {
        let p = Self { dim, s, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.dim, self.s)?;
        let cap = hardy_constant(self.dim, self.s)?;
        if !(self.lambda >= 0.0 && self.lambda < cap) {
            return Err(Error::InvalidParam {
                field: "lambda",
                reason: format!("{} outside [0, Λ_{{N,s}} = {cap})", self.lambda),
            });
        }
        Ok(())
    }

    pub fn critical_exponent(&self) -> f64 {
        let n = self.dim as f64;
        2.0 * n / (n - 2.0 * self.s)
    }

    pub fn hardy_constant(&self) -> f64 {
        hardy_constant(self.dim, self.s).expect("validated parameters")
    }

    /// Same order and dimension with a different Hardy weight.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.dim, self.s, lambda)
    }
}
