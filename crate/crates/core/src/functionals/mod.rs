//! Midpoint quadrature of the integrals entering the energy: Gagliardo
//! seminorms, Hardy terms, critical `L^p` powers and the coupling integral.
//!
//! The Gagliardo double sum runs over ordered node pairs `x ≠ y` of the box,
//! skipping diagonal cells, and adds the exterior contribution of the zero
//! extension, `2 Σ u(x)² K_out(x) cellvol`. Hardy terms use the cell
//! average of `|x|^{-2s}` as the node weight (see [`hardy`]).

pub mod hardy;
pub mod kernel;
pub mod reduce;

use serde::{Deserialize, Serialize};

use crate::constants::FractionalParams;
use crate::error::{Error, Result};
use crate::field::{CouplingWeight, DiscreteField, FieldPair, GridSpec, ProblemParams};
use kernel::KernelTable;
use reduce::{pairwise_sum, reduce_rows};

/// Reduction layout for the double sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrature {
    pub block_rows: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { block_rows: 1 }
    }
}

impl Quadrature {
    pub fn validate(&self) -> Result<()> {
        if self.block_rows == 0 {
            return Err(Error::InvalidParam {
                field: "quadrature.block_rows",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// `|u|^{p-2} u`, extended by 0 at `u = 0`.
#[inline]
pub fn critical_power(u: f64, p: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u.abs().powf(p - 2.0) * u
    }
}

/// Bilinear Gagliardo form
/// `Σ_{x≠y} (u(x)-u(y))(w(x)-w(y)) |x-y|^{-N-2s} cellvol² + 2 Σ u w K_out cellvol`.
pub fn gagliardo_bilinear(u: &DiscreteField, w: &DiscreteField, s: f64, quad: &Quadrature) -> Result<f64> {
    if u.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let table = KernelTable::cached(u.grid(), s);
    let (uv, wv) = (u.values(), w.values());
    Ok(reduce_rows(uv.len(), quad.block_rows, |i, buf| {
        let (ui, wi) = (uv[i], wv[i]);
        table.for_each_in_row(i, |j, k| {
            if j != i {
                buf.push((ui - uv[j]) * (wi - wv[j]) * k);
            }
        });
        buf.push(ui * wi * table.exterior[i]);
    }))
}

/// Squared Gagliardo seminorm `[u]²_s`.
pub fn gagliardo_sq(u: &DiscreteField, s: f64) -> f64 {
    gagliardo_sq_with(u, s, &Quadrature::default())
}

pub fn gagliardo_sq_with(u: &DiscreteField, s: f64, quad: &Quadrature) -> f64 {
    gagliardo_bilinear(u, u, s, quad).expect("same grid")
}

/// Riesz representative of `w ↦ gagliardo_bilinear(u, w)` in the `ℓ²·cellvol` metric.
pub fn gagliardo_gradient(u: &DiscreteField, s: f64) -> Vec<f64> {
    let table = KernelTable::cached(u.grid(), s);
    let uv = u.values();
    let cell = u.grid().cell_volume();
    reduce::map_rows(uv.len(), |i, buf| {
        let ui = uv[i];
        table.for_each_in_row(i, |j, k| {
            if j != i {
                buf.push((ui - uv[j]) * k);
            }
        });
        (2.0 * pairwise_sum(buf) + ui * table.exterior[i]) / cell
    })
}

pub(crate) fn hardy_weights(grid: &GridSpec, s: f64) -> Result<std::sync::Arc<Vec<f64>>> {
    if grid.has_origin_node() {
        return Err(Error::NodeAtOrigin);
    }
    Ok(hardy::cell_averages(grid, s))
}

/// `Σ u w ⟨|x|^{-2s}⟩_cell cellvol`, the weight averaged over each cell.
pub fn hardy_bilinear(u: &DiscreteField, w: &DiscreteField, s: f64) -> Result<f64> {
    if u.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let weights = hardy_weights(u.grid(), s)?;
    let terms: Vec<f64> = u
        .values()
        .iter()
        .zip(w.values())
        .zip(weights.iter())
        .map(|((a, b), k)| a * b * k)
        .collect();
    Ok(pairwise_sum(&terms) * u.grid().cell_volume())
}

/// Hardy integral `∫ u² / |x|^{2s}`; the origin must not be a node.
pub fn hardy_integral(u: &DiscreteField, s: f64) -> Result<f64> {
    hardy_bilinear(u, u, s)
}

/// `‖u‖²_{λ,s} = [u]²_s − λ ∫ u²/|x|^{2s}`.
pub fn hardy_norm_sq(u: &DiscreteField, params: &FractionalParams) -> Result<f64> {
    let semi = gagliardo_sq(u, params.s);
    if params.lambda == 0.0 {
        return Ok(semi);
    }
    Ok(semi - params.lambda * hardy_integral(u, params.s)?)
}

/// `Σ |u|^p cellvol` (the p-th power, not the norm).
pub fn lp_norm_pow(u: &DiscreteField, p: f64) -> f64 {
    let terms: Vec<f64> = if p >= 2.0 {
        u.values().iter().map(|&x| critical_power(x, p) * x).collect()
    } else {
        u.values().iter().map(|&x| x.abs().powf(p)).collect()
    };
    pairwise_sum(&terms) * u.grid().cell_volume()
}

/// `Σ |u|^{p-2} u w cellvol`.
pub fn critical_bilinear(u: &DiscreteField, w: &DiscreteField, p: f64) -> Result<f64> {
    if u.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let terms: Vec<f64> = u
        .values()
        .iter()
        .zip(w.values())
        .map(|(&a, &b)| critical_power(a, p) * b)
        .collect();
    Ok(pairwise_sum(&terms) * u.grid().cell_volume())
}

pub(crate) fn weight_values(grid: &GridSpec, weight: &CouplingWeight) -> Vec<f64> {
    grid.nodes().map(|p| weight.eval(&p[..grid.dim])).collect()
}

/// `Σ h a b c cellvol`, evaluated as `((h·a)·b)·c` per node.
pub fn coupling_trilinear(
    a: &DiscreteField,
    b: &DiscreteField,
    c: &DiscreteField,
    weight: &CouplingWeight,
) -> Result<f64> {
    if a.grid() != b.grid() || a.grid() != c.grid() {
        return Err(Error::GridMismatch);
    }
    let h = weight_values(a.grid(), weight);
    let terms: Vec<f64> = h
        .iter()
        .zip(a.values())
        .zip(b.values())
        .zip(c.values())
        .map(|(((h, x), y), z)| h * x * y * z)
        .collect();
    Ok(pairwise_sum(&terms) * a.grid().cell_volume())
}

/// `∫ h u² v` (without the factor ν).
pub fn coupling_integral(pair: &FieldPair, weight: &CouplingWeight) -> f64 {
    coupling_trilinear(&pair.u, &pair.u, &pair.v, weight).expect("pair shares one grid")
}

/// Every scalar integral of the energy, evaluated once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub semi1: f64,
    pub semi2: f64,
    pub hardy1: f64,
    pub hardy2: f64,
    pub crit1: f64,
    pub crit2: f64,
    pub coupling: f64,
}

/// Evaluate all integrals for `pair`.
pub fn breakdown(pair: &FieldPair, params: &ProblemParams) -> Result<EnergyBreakdown> {
    params.check_grid(pair.grid())?;
    let quad = &params.quadrature;
    let (p1, p2) = (&params.first, &params.second);
    Ok(EnergyBreakdown {
        semi1: gagliardo_sq_with(&pair.u, p1.s, quad),
        semi2: gagliardo_sq_with(&pair.v, p2.s, quad),
        hardy1: hardy_integral(&pair.u, p1.s)?,
        hardy2: hardy_integral(&pair.v, p2.s)?,
        crit1: lp_norm_pow(&pair.u, p1.critical_exponent()),
        crit2: lp_norm_pow(&pair.v, p2.critical_exponent()),
        coupling: coupling_integral(pair, &params.weight),
    })
}

impl EnergyBreakdown {
    /// `‖u‖²_{λ1,s1}`
    pub fn norm1(&self, params: &ProblemParams) -> f64 {
        self.semi1 - params.first.lambda * self.hardy1
    }

    /// `‖v‖²_{λ2,s2}`
    pub fn norm2(&self, params: &ProblemParams) -> f64 {
        self.semi2 - params.second.lambda * self.hardy2
    }

    /// Product norm `‖(u,v)‖²`.
    pub fn norm_sq(&self, params: &ProblemParams) -> f64 {
        self.norm1(params) + self.norm2(params)
    }

    /// `J_{λ1}(u)`
    pub fn single_energy1(&self, params: &ProblemParams) -> f64 {
        let p = &params.first;
        0.5 * self.semi1 - 0.5 * p.lambda * self.hardy1 - self.crit1 / p.critical_exponent()
    }

    /// `J_{λ2}(v)`
    pub fn single_energy2(&self, params: &ProblemParams) -> f64 {
        let p = &params.second;
        0.5 * self.semi2 - 0.5 * p.lambda * self.hardy2 - self.crit2 / p.critical_exponent()
    }

    /// `J_ν(u,v) = J_{λ1}(u) + J_{λ2}(v) − ν ∫ h u² v`.
    pub fn energy(&self, params: &ProblemParams) -> f64 {
        self.single_energy1(params) + self.single_energy2(params) - params.nu * self.coupling
    }

    /// Integrals of `(τu, τv)`.
    pub fn scaled(&self, tau: f64, params: &ProblemParams) -> Self {
        let t2 = tau * tau;
        Self {
            semi1: t2 * self.semi1,
            semi2: t2 * self.semi2,
            hardy1: t2 * self.hardy1,
            hardy2: t2 * self.hardy2,
            crit1: tau.powf(params.first.critical_exponent()) * self.crit1,
            crit2: tau.powf(params.second.critical_exponent()) * self.crit2,
            coupling: t2 * tau * self.coupling,
        }
    }

    /// `J_ν(τu, τv)` from the τ-expansion.
    pub fn energy_along_ray(&self, tau: f64, params: &ProblemParams) -> f64 {
        self.scaled(tau, params).energy(params)
    }
}

/// `J_ν(u, v)`.
pub fn energy(pair: &FieldPair, params: &ProblemParams) -> Result<f64> {
    Ok(breakdown(pair, params)?.energy(params))
}

/// `J_λ(u) = ½[u]² − ½λ∫u²/|x|^{2s} − (1/2*)∫|u|^{2*}`.
pub fn single_energy(u: &DiscreteField, params: &FractionalParams) -> Result<f64> {
    let semi = gagliardo_sq(u, params.s);
    let hardy = hardy_integral(u, params.s)?;
    let crit = lp_norm_pow(u, params.critical_exponent());
    Ok(0.5 * semi - 0.5 * params.lambda * hardy - crit / params.critical_exponent())
}

/// `‖u‖²_{λ,s} / ‖u‖²_{2*}`.
pub fn rayleigh_quotient(u: &DiscreteField, params: &FractionalParams) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField("the Rayleigh quotient is undefined at 0"));
    }
    let p = params.critical_exponent();
    let norm = hardy_norm_sq(u, params)?;
    let crit = lp_norm_pow(u, p);
    Ok(norm / crit.powf(2.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_smooth_field;
    use proptest::prelude::*;

    fn gaussian(m: usize, l: f64) -> DiscreteField {
        let g = GridSpec::new(1, l, m, true).unwrap();
        DiscreteField::sample(g, |x| (-x[0] * x[0]).exp()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_field_integrals_vanish() {
        let z = DiscreteField::zeros(GridSpec::new(1, 4.0, 64, true).unwrap());
        assert_eq!(gagliardo_sq(&z, 0.3), 0.0);
        assert_eq!(hardy_integral(&z, 0.3).unwrap(), 0.0);
        assert_eq!(lp_norm_pow(&z, 5.0), 0.0);
        let p = FractionalParams::new(1, 0.3, 0.0).unwrap();
        assert_eq!(hardy_norm_sq(&z, &p).unwrap(), 0.0);
        assert!(matches!(rayleigh_quotient(&z, &p), Err(Error::ZeroField(_))));
    }

    #[test]
    fn hardy_needs_offset_grid() {
        let g = GridSpec::new(1, 4.0, 64, false).unwrap();
        let u = DiscreteField::sample(g, |x| (-x[0] * x[0]).exp()).unwrap();
        assert!(matches!(hardy_integral(&u, 0.3), Err(Error::NodeAtOrigin)));
    }

    #[test]
    fn plateau_power_counts_cells() {
        let g = GridSpec::new(1, 4.0, 64, true).unwrap();
        let u = DiscreteField::sample(g, |x| if x[0].abs() < 1.0 { 1.0 } else { 0.0 }).unwrap();
        assert_eq!(lp_norm_pow(&u, 3.5), 16.0 * g.cell_volume());
    }

    #[test]
    fn lambda_zero_collapses_to_seminorm() {
        let u = gaussian(256, 8.0);
        let p = FractionalParams::new(1, 0.3, 0.0).unwrap();
        assert_eq!(hardy_norm_sq(&u, &p).unwrap(), gagliardo_sq(&u, 0.3));
    }

    #[test]
    fn half_hardy_constant_keeps_half_the_seminorm() {
        let u = gaussian(512, 10.0);
        let cap = crate::constants::hardy_constant(1, 0.25).unwrap();
        let p = FractionalParams::new(1, 0.25, cap / 2.0).unwrap();
        assert!(hardy_norm_sq(&u, &p).unwrap() >= 0.5 * gagliardo_sq(&u, 0.25) * (1.0 - 1e-12));
    }

    #[test]
    fn coupling_sign_and_zero() {
        let g = GridSpec::new(1, 6.0, 128, true).unwrap();
        let u = random_smooth_field(&g, 1, 0.5).unwrap();
        let v = random_smooth_field(&g, 2, 0.5).unwrap();
        let w = CouplingWeight::default();
        let pair = FieldPair::new(u.clone(), v.clone()).unwrap();
        let flipped = FieldPair::new(u.clone(), v.scale(-1.0)).unwrap();
        assert_eq!(coupling_integral(&flipped, &w), -coupling_integral(&pair, &w));
        let zero = FieldPair::new(u, DiscreteField::zeros(g)).unwrap();
        assert_eq!(coupling_integral(&zero, &w), 0.0);
    }

    #[test]
    fn breakdown_caches_individual_calls() {
        let g = GridSpec::new(1, 8.0, 256, true).unwrap();
        let params = ProblemParams::symmetric(1, 0.3, 0.02, 0.5).unwrap();
        let u = DiscreteField::sample(g, |x| (-x[0] * x[0]).exp()).unwrap();
        let v = DiscreteField::sample(g, |x| (-(x[0] - 0.5).powi(2)).exp()).unwrap();
        let pair = FieldPair::new(u.clone(), v.clone()).unwrap();
        let b = breakdown(&pair, &params).unwrap();
        assert_eq!(b.semi1.to_bits(), gagliardo_sq(&u, 0.3).to_bits());
        assert_eq!(b.semi2.to_bits(), gagliardo_sq(&v, 0.3).to_bits());
        assert_eq!(b.hardy1.to_bits(), hardy_integral(&u, 0.3).unwrap().to_bits());
        assert_eq!(b.crit2.to_bits(), lp_norm_pow(&v, 5.0).to_bits());
        assert_eq!(b.coupling.to_bits(), coupling_integral(&pair, &params.weight).to_bits());

        let zero = breakdown(&FieldPair::zeros(g), &params).unwrap();
        assert_eq!(zero.energy(&params), 0.0);
        let semi = breakdown(&FieldPair::new(u, DiscreteField::zeros(g)).unwrap(), &params).unwrap();
        assert_eq!((semi.crit2, semi.coupling, semi.hardy2, semi.semi2), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn energy_splits_into_components() {
        let g = GridSpec::new(1, 8.0, 256, true).unwrap();
        let params = ProblemParams::symmetric(1, 0.3, 0.02, 0.0).unwrap();
        let pair = FieldPair::new(random_smooth_field(&g, 5, 0.4).unwrap(), random_smooth_field(&g, 6, 0.4).unwrap()).unwrap();
        let b = breakdown(&pair, &params).unwrap();
        let split = b.single_energy1(&params) + b.single_energy2(&params);
        assert_eq!(b.energy(&params).to_bits(), split.to_bits());

        let coupled = params.with_nu(0.7);
        let j = b.single_energy1(&coupled) + b.single_energy2(&coupled) - 0.7 * b.coupling;
        assert_eq!(b.energy(&coupled).to_bits(), j.to_bits());

        // single_energy recomputes the same sums
        assert_eq!(single_energy(&pair.u, &params.first).unwrap().to_bits(), b.single_energy1(&params).to_bits());
    }

    #[test]
    fn tau_expansion_matches_direct_evaluation() {
        let g = GridSpec::new(1, 8.0, 256, true).unwrap();
        let params = ProblemParams::symmetric(1, 0.3, 0.02, 0.5).unwrap();
        let pair = FieldPair::new(random_smooth_field(&g, 9, 0.4).unwrap(), random_smooth_field(&g, 10, 0.4).unwrap()).unwrap();
        let b = breakdown(&pair, &params).unwrap();
        for tau in [0.5, 1.0, 2.0] {
            let direct = energy(&pair.scale(tau), &params).unwrap();
            assert!(rel(b.energy_along_ray(tau, &params), direct) < 1e-12, "tau {tau}");
        }
    }

    #[test]
    fn rayleigh_quotient_is_scale_invariant() {
        let u = gaussian(512, 10.0);
        let p = FractionalParams::new(1, 0.3, 0.01).unwrap();
        let q = rayleigh_quotient(&u, &p).unwrap();
        for c in [0.1, 3.0] {
            assert!(rel(rayleigh_quotient(&u.scale(c), &p).unwrap(), q) < 1e-12);
        }
    }

    #[test]
    fn swapped_loop_order_is_symmetric() {
        // Σ_x Σ_y vs Σ_y Σ_x: compare against a transposed plain sum
        let g = GridSpec::new(1, 5.0, 128, true).unwrap();
        let u = random_smooth_field(&g, 4, 0.5).unwrap();
        let s = 0.35;
        let table = KernelTable::build(&g, s);
        let uv = u.values();
        let mut by_cols = 0.0;
        for j in 0..uv.len() {
            for i in 0..uv.len() {
                if i != j {
                    by_cols += (uv[i] - uv[j]).powi(2) * table.pair[i.abs_diff(j)];
                }
            }
        }
        by_cols += uv.iter().zip(&table.exterior).map(|(a, e)| a * a * e).sum::<f64>();
        assert!(rel(gagliardo_sq(&u, s), by_cols) < 1e-13);
    }

    #[test]
    fn translation_by_one_cell_keeps_seminorm() {
        let g = GridSpec::new(1, 10.0, 512, true).unwrap();
        let h = g.step();
        let u = DiscreteField::sample(g, |x| (-x[0] * x[0]).exp()).unwrap();
        let shifted = DiscreteField::sample(g, |x| (-(x[0] - h).powi(2)).exp()).unwrap();
        assert!(rel(gagliardo_sq(&shifted, 0.25), gagliardo_sq(&u, 0.25)) < 1e-6);
        let (a, b) = (hardy_integral(&u, 0.25).unwrap(), hardy_integral(&shifted, 0.25).unwrap());
        assert!(a != b);
    }

    #[test]
    fn doubling_the_box_changes_only_truncation() {
        let small = gaussian(512, 5.0);
        let large = gaussian(1024, 10.0);
        for (a, b) in [
            (gagliardo_sq(&small, 0.25), gagliardo_sq(&large, 0.25)),
            (hardy_integral(&small, 0.25).unwrap(), hardy_integral(&large, 0.25).unwrap()),
            (lp_norm_pow(&small, 4.0), lp_norm_pow(&large, 4.0)),
        ] {
            assert!(rel(a, b) < 0.01, "{a} vs {b}");
        }
    }

    #[test]
    fn gradient_represents_bilinear_form() {
        let g = GridSpec::new(2, 3.0, 12, true).unwrap();
        let u = random_smooth_field(&g, 21, 0.3).unwrap();
        let grad = gagliardo_gradient(&u, 0.6);
        let cell = g.cell_volume();
        for k in [0, 17, 70, 143] {
            let e = DiscreteField::basis(g, k);
            let pairing = gagliardo_bilinear(&u, &e, 0.6, &Quadrature::default()).unwrap();
            assert!(rel(grad[k] * cell, pairing) < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn integrals_are_homogeneous(seed in 0u64..500, c in prop::sample::select(vec![-3.0, -0.5, 0.25, 1.7, 4.0])) {
            let g = GridSpec::new(1, 6.0, 96, true).unwrap();
            let u = random_smooth_field(&g, seed, 0.4).unwrap();
            let cu = u.scale(c);
            prop_assert!(rel(gagliardo_sq(&cu, 0.3), c * c * gagliardo_sq(&u, 0.3)) < 1e-12);
            prop_assert!(rel(hardy_integral(&cu, 0.3).unwrap(), c * c * hardy_integral(&u, 0.3).unwrap()) < 1e-12);
            prop_assert!(rel(lp_norm_pow(&cu, 5.0), c.abs().powf(5.0) * lp_norm_pow(&u, 5.0)) < 1e-12);
        }
    }
}
