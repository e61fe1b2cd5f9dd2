//! Projected gradient descent on the Nehari manifold, and the Rayleigh
//! quotient minimiser for the single-equation constant `S(λ)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{sobolev_bump, FractionalParams};
use crate::derivative::gradient_fields;
use crate::error::{Error, Result};
use crate::field::{random_smooth_field, DiscreteField, FieldPair, GridSpec, ProblemParams};
use crate::functionals::{critical_power, gagliardo_gradient, hardy_norm_sq, lp_norm_pow};
use crate::nehari::{self, NehariProjection};

/// Label used for minimisers in reports; they are not proven ground states.
pub const LEVEL_LABEL: &str = "Nehari level";

const MAX_BACKTRACKS: usize = 60;
const MAX_STEP: f64 = 1e8;
const SEMITRIVIAL_RATIO: f64 = 1e-6;

/// Stopping threshold on the gradient norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Tolerance {
    Absolute(f64),
    /// Multiple of the gradient norm at the projected start.
    Relative(f64),
}

impl Tolerance {
    pub fn resolve(&self, initial: f64) -> f64 {
        match *self {
            Self::Absolute(t) => t,
            Self::Relative(r) => r * initial,
        }
    }

    fn value(&self) -> f64 {
        match *self {
            Self::Absolute(t) | Self::Relative(t) => t,
        }
    }
}

/// Backtracking line search: shrink by `shrink` until the decrease is at least `slope · t · ‖g‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Armijo {
    pub shrink: f64,
    pub slope: f64,
    /// Step multiplier after an accepted step; 1 keeps the step.
    #[serde(default = "default_growth")]
    pub growth: f64,
}

fn default_growth() -> f64 {
    2.0
}

impl Default for Armijo {
    fn default() -> Self {
        Self {
            shrink: 0.5,
            slope: 1e-4,
            growth: default_growth(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub max_iters: usize,
    pub step0: f64,
    pub armijo: Armijo,
    pub grad_tol: Tolerance,
    pub seed_count: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            step0: 1.0,
            armijo: Armijo::default(),
            grad_tol: Tolerance::Relative(1e-6),
            seed_count: 5,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: String| Err(Error::InvalidParam { field, reason });
        if !(self.step0 > 0.0 && self.step0.is_finite()) {
            return bad("solve.step0", format!("{} must be positive", self.step0));
        }
        let a = &self.armijo;
        if !(a.shrink > 0.0 && a.shrink < 1.0) {
            return bad("solve.armijo.shrink", format!("{} outside (0, 1)", a.shrink));
        }
        if !(a.slope > 0.0 && a.slope < 1.0) {
            return bad("solve.armijo.slope", format!("{} outside (0, 1)", a.slope));
        }
        if !(a.growth >= 1.0 && a.growth.is_finite()) {
            return bad("solve.armijo.growth", format!("{} must be at least 1", a.growth));
        }
        let t = self.grad_tol.value();
        if !(t > 0.0 && t.is_finite()) {
            return bad("solve.grad_tol", format!("{t} must be positive"));
        }
        if self.seed_count == 0 {
            return bad("solve.seed_count", "at least one restart is needed".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIters,
    /// No step passed the line search.
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub level: f64,
    pub grad_norm: f64,
    pub tau: f64,
}

/// Which component, if any, is negligible next to the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Semitrivial {
    No,
    UOnly,
    VOnly,
}

impl Semitrivial {
    pub fn classify(pair: &FieldPair) -> Self {
        let (nu, nv) = (pair.u.l2_norm(), pair.v.l2_norm());
        if nv < SEMITRIVIAL_RATIO * nu {
            Self::UOnly
        } else if nu < SEMITRIVIAL_RATIO * nv {
            Self::VOnly
        } else {
            Self::No
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartSummary {
    pub seeds: Vec<u64>,
    /// `None` where that restart failed.
    pub levels: Vec<Option<f64>>,
    pub best: usize,
    /// Relative gap between the two lowest levels.
    pub best_two_gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub pair: FieldPair,
    pub projection: NehariProjection,
    pub level: f64,
    pub grad_norm: f64,
    pub grad_tol: f64,
    pub iters: usize,
    pub stop: StopReason,
    pub semitrivial: Semitrivial,
    pub trace: Vec<TraceRecord>,
    pub restarts: Option<RestartSummary>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }
}

fn grad_norm(g: &FieldPair) -> f64 {
    g.inner(g).expect("same grid").max(0.0).sqrt()
}

/// Projected gradient descent `x ← P(x − t ∇J_ν(x))` with Armijo backtracking.
pub fn minimize_on_nehari(start: &FieldPair, params: &ProblemParams, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut proj = nehari::project(start, params)?;
    let mut level = proj.level(params);
    let mut grad = gradient_fields(&proj.pair, params)?;
    let mut gnorm = grad_norm(&grad);
    let tol = config.grad_tol.resolve(gnorm);
    let mut trace = vec![TraceRecord {
        level,
        grad_norm: gnorm,
        tau: proj.tau,
    }];
    let mut step = config.step0;
    let mut iters = 0;
    let stop = loop {
        if gnorm < tol {
            break StopReason::Converged;
        }
        if iters >= config.max_iters {
            break StopReason::MaxIters;
        }
        let want = config.armijo.slope * gnorm * gnorm;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = FieldPair::axpy(-step, &grad, &proj.pair)?;
            if trial.is_nonzero() {
                let candidate = nehari::project(&trial, params).map_err(|e| Error::SolveFailed {
                    iters,
                    last: Box::new(proj.pair.clone()),
                    source: Box::new(e),
                })?;
                let new_level = candidate.level(params);
                if new_level <= level - want * step {
                    accepted = Some((candidate, new_level));
                    break;
                }
            }
            step *= config.armijo.shrink;
        }
        let Some((candidate, new_level)) = accepted else {
            break StopReason::Stalled;
        };
        iters += 1;
        proj = candidate;
        level = new_level;
        grad = gradient_fields(&proj.pair, params)?;
        gnorm = grad_norm(&grad);
        trace.push(TraceRecord {
            level,
            grad_norm: gnorm,
            tau: proj.tau,
        });
        step = (step * config.armijo.growth).min(MAX_STEP);
    };
    Ok(SolveReport {
        pair: proj.pair.clone(),
        semitrivial: Semitrivial::classify(&proj.pair),
        projection: proj,
        level,
        grad_norm: gnorm,
        grad_tol: tol,
        iters,
        stop,
        trace,
        restarts: None,
    })
}

/// Starting pair for restart `seed`: dilated, translated extremal bumps plus a
/// small random perturbation in each component.
pub fn restart_start(grid: &GridSpec, params: &ProblemParams, seed: u64) -> Result<FieldPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.half_width;
    let dim = grid.dim;
    let mut component = |s: f64, salt: u64| -> Result<DiscreteField> {
        let mu = l / 10.0 * rng.gen_range(0.5..2.0);
        let mut center = [0.0; 3];
        for c in center.iter_mut().take(dim) {
            *c = rng.gen_range(-0.1..=0.1) * l;
        }
        let bump = DiscreteField::sample(*grid, |x| sobolev_bump(dim, s, mu, &center[..dim], x))?;
        let noise = random_smooth_field(grid, seed.wrapping_mul(2).wrapping_add(salt), 0.5)?;
        DiscreteField::axpy(0.1, &noise, &bump)
    };
    let u = component(params.first.s, 0)?;
    let v = component(params.second.s, 1)?;
    FieldPair::new(u, v)
}

/// Runs `config.seed_count` restarts from `base_seed` in parallel and keeps the lowest level.
pub fn minimize_with_restarts(
    grid: &GridSpec,
    params: &ProblemParams,
    config: &SolveConfig,
    base_seed: u64,
) -> Result<SolveReport> {
    config.validate()?;
    params.check_grid(grid)?;
    let seeds: Vec<u64> = (0..config.seed_count as u64).map(|k| base_seed.wrapping_add(k)).collect();
    let runs: Vec<Result<SolveReport>> = seeds
        .par_iter()
        .map(|&seed| minimize_on_nehari(&restart_start(grid, params, seed)?, params, config))
        .collect();
    let levels: Vec<Option<f64>> = runs.iter().map(|r| r.as_ref().ok().map(|r| r.level)).collect();
    let mut order: Vec<usize> = (0..runs.len()).filter(|&k| levels[k].is_some()).collect();
    order.sort_by(|&a, &b| levels[a].unwrap().total_cmp(&levels[b].unwrap()));
    let Some(&best) = order.first() else {
        let first_err = runs.into_iter().find_map(|r| r.err()).expect("at least one restart");
        return Err(first_err);
    };
    let best_two_gap = order.get(1).map(|&k| {
        let (a, b) = (levels[best].unwrap(), levels[k].unwrap());
        (b - a) / a.abs()
    });
    let summary = RestartSummary {
        seeds,
        levels,
        best,
        best_two_gap,
    };
    let mut report = runs.into_iter().nth(best).expect("index in range")?;
    report.restarts = Some(summary);
    Ok(report)
}

/// Output of [`minimize_rayleigh`].
#[derive(Debug, Clone)]
pub struct RayleighMinimum {
    /// Minimiser normalised to `∫|z|^{2*} = 1`.
    pub field: DiscreteField,
    pub s_estimate: f64,
    pub iters: usize,
    pub grad_norm: f64,
    pub stop: StopReason,
    /// `t` with `‖t z‖² = ∫|t z|^{2*}` (the single-equation Nehari rescaling).
    pub nehari_scale: f64,
}

impl RayleighMinimum {
    /// The minimiser rescaled onto `‖z‖²_{λ,s} = ∫|z|^{2*}`.
    pub fn nehari_field(&self) -> DiscreteField {
        self.field.scale(self.nehari_scale)
    }
}

/// Minimises `‖u‖²_{λ,s} / (∫|u|^{2*})^{2/2*}` by normalised gradient descent.
pub fn minimize_rayleigh(start: &DiscreteField, params: &FractionalParams, config: &SolveConfig) -> Result<RayleighMinimum> {
    config.validate()?;
    if start.is_zero() {
        return Err(Error::ZeroField("the Rayleigh quotient is undefined at 0"));
    }
    let p = params.critical_exponent();
    let normalise = |u: &DiscreteField| u.scale(lp_norm_pow(u, p).powf(-1.0 / p));
    // on a normalised field the quotient is the Hardy norm
    let quotient = |u: &DiscreteField| hardy_norm_sq(u, params);
    let weights = if params.lambda == 0.0 {
        None
    } else {
        Some(crate::functionals::hardy_weights(start.grid(), params.s)?)
    };
    let gradient = |u: &DiscreteField, q: f64| -> Result<DiscreteField> {
        let g = gagliardo_gradient(u, params.s);
        let vals = g
            .iter()
            .zip(u.values())
            .enumerate()
            .map(|(i, (&gi, &ui))| {
                let hardy = weights.as_ref().map_or(0.0, |w| params.lambda * w[i] * ui);
                2.0 * (gi - hardy - q * critical_power(ui, p))
            })
            .collect();
        DiscreteField::from_values(*u.grid(), vals)
    };

    let mut u = normalise(start);
    let mut q = quotient(&u)?;
    let mut g = gradient(&u, q)?;
    let mut gnorm = g.l2_norm();
    let tol = config.grad_tol.resolve(gnorm);
    let mut step = config.step0;
    let mut iters = 0;
    let stop = loop {
        if gnorm < tol {
            break StopReason::Converged;
        }
        if iters >= config.max_iters {
            break StopReason::MaxIters;
        }
        let want = config.armijo.slope * gnorm * gnorm;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = DiscreteField::axpy(-step, &g, &u)?;
            if !trial.is_zero() {
                let trial = normalise(&trial);
                let tq = quotient(&trial)?;
                if tq <= q - want * step {
                    accepted = Some((trial, tq));
                    break;
                }
            }
            step *= config.armijo.shrink;
        }
        let Some((next, nq)) = accepted else {
            break StopReason::Stalled;
        };
        iters += 1;
        u = next;
        q = nq;
        g = gradient(&u, q)?;
        gnorm = g.l2_norm();
        step = (step * config.armijo.growth).min(MAX_STEP);
    };
    let norm = hardy_norm_sq(&u, params)?;
    let crit = lp_norm_pow(&u, p);
    let nehari_scale = (norm / crit).powf(1.0 / (p - 2.0));
    Ok(RayleighMinimum {
        field: u,
        s_estimate: q,
        iters,
        grad_norm: gnorm,
        stop,
        nehari_scale,
    })
}

/// `(s/N) · S^{N/(2s)}`, the single-equation level for a given best constant.
pub fn level_from_constant(params: &FractionalParams, s_constant: f64) -> f64 {
    let n = params.dim as f64;
    params.s / n * s_constant.powf(n / (2.0 * params.s))
}

/// The single-equation level computed by two routes.
#[derive(Debug, Clone)]
pub struct SingleLevel {
    /// `(s/N) · S^{N/2s}` from the Rayleigh minimiser.
    pub from_rayleigh: f64,
    /// Minimum of `J_λ` on its own Nehari set.
    pub from_nehari: f64,
    pub rayleigh: RayleighMinimum,
    pub nehari: SolveReport,
}

impl SingleLevel {
    pub fn rel_gap(&self) -> f64 {
        ((self.from_rayleigh - self.from_nehari) / self.from_nehari).abs()
    }
}

/// Single-equation level from the extremal profile as starting point.
///
/// The Nehari route runs the coupled solver on `(z, 0)` with `ν = 0`, where
/// the second component stays identically zero.
pub fn single_ground_level(grid: &GridSpec, params: &FractionalParams, config: &SolveConfig) -> Result<SingleLevel> {
    let dim = grid.dim;
    let mu = grid.half_width / 10.0;
    let origin = [0.0; 3];
    let start = DiscreteField::sample(*grid, |x| sobolev_bump(dim, params.s, mu, &origin[..dim], x))?;
    let rayleigh = minimize_rayleigh(&start, params, config)?;
    let from_rayleigh = level_from_constant(params, rayleigh.s_estimate);

    let coupled = ProblemParams::new(*params, *params, 0.0, Default::default())?;
    let pair = FieldPair::new(start, DiscreteField::zeros(*grid))?;
    let nehari = minimize_on_nehari(&pair, &coupled, config)?;
    Ok(SingleLevel {
        from_rayleigh,
        from_nehari: nehari.level,
        rayleigh,
        nehari,
    })
}
