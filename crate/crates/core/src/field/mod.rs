//! Discrete fields on a truncated uniform grid over `[-L, L]^N`.
//!
//! Fields are implicitly zero outside the box. Node ordering is lexicographic
//! in the axis indices with axis 0 varying slowest.

mod csv_io;
mod params;

pub use csv_io::{read_csv, write_csv};
pub use params::{CouplingWeight, ProblemParams};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible points-per-axis for N = 1, 2, 3.
pub const MAX_POINTS: [usize; 3] = [4096, 64, 24];

/// A node position; entries past `dim` are zero.
pub type Point = [f64; 3];

/// Uniform tensor grid of cell midpoints over `[-L, L]^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub half_width: f64,
    pub points: usize,
    pub offset: bool,
}

impl GridSpec {
    /// Nodes at `-L + (k + offset/2) h` with `h = 2L/M`.
    pub fn new(dim: usize, half_width: f64, points: usize, offset: bool) -> Result<Self> {
        let g = Self {
            dim,
            half_width,
            points,
            offset,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidGrid(format!("dimension {} not in 1..=3", self.dim)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("half-width {} must be positive", self.half_width)));
        }
        let cap = MAX_POINTS[self.dim - 1];
        if self.points < 8 || self.points > cap {
            return Err(Error::InvalidGrid(format!(
                "{} points per axis outside [8, {cap}] for N = {}",
                self.points, self.dim
            )));
        }
        if self.offset && self.points % 2 == 1 {
            // odd M with the half-cell shift puts a node at the origin
            return Err(Error::InvalidGrid(
                "offset grids need an even number of points per axis".into(),
            ));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.step().powi(self.dim as i32)
    }

    /// Total node count `M^N`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axis_coord(&self, k: usize) -> f64 {
        let shift = if self.offset { 0.5 } else { 0.0 };
        -self.half_width + (k as f64 + shift) * self.step()
    }

    /// Per-axis indices of node `index`.
    pub fn multi_index(&self, index: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rem = index;
        for axis in (0..self.dim).rev() {
            out[axis] = rem % self.points;
            rem /= self.points;
        }
        out
    }

    pub fn node(&self, index: usize) -> Point {
        let mi = self.multi_index(index);
        let mut p = [0.0; 3];
        for axis in 0..self.dim {
            p[axis] = self.axis_coord(mi[axis]);
        }
        p
    }

    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// True when some node sits exactly at the origin.
    pub fn has_origin_node(&self) -> bool {
        (0..self.points).any(|k| self.axis_coord(k) == 0.0)
    }
}

/// Samples of a real function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl DiscreteField {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                index,
                coords: grid.node(index)[..grid.dim].to_vec(),
                value,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// `values[k] = f(x_k)`; `f` receives the first `N` coordinates.
    pub fn sample(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = grid.nodes().map(|p| f(&p[..grid.dim])).collect();
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Pointwise `a * u + w`.
    pub fn axpy(a: f64, u: &Self, w: &Self) -> Result<Self> {
        if u.grid != w.grid {
            return Err(Error::GridMismatch);
        }
        let values = u.values.iter().zip(&w.values).map(|(x, y)| a * x + y).collect();
        Ok(Self {
            grid: u.grid,
            values,
        })
    }

    /// `sqrt(Σ v² · cellvol)`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }

    /// `Σ a·b · cellvol`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let dot: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(dot * self.grid.cell_volume())
    }

    /// Unit mass at one node.
    pub fn basis(grid: GridSpec, index: usize) -> Self {
        let mut values = vec![0.0; grid.len()];
        values[index] = 1.0;
        Self { grid, values }
    }
}

/// A pair `(u, v)` sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldPair {
    pub u: DiscreteField,
    pub v: DiscreteField,
}

impl FieldPair {
    pub fn new(u: DiscreteField, v: DiscreteField) -> Result<Self> {
        if u.grid != v.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self { u, v })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            u: DiscreteField::zeros(grid),
            v: DiscreteField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    /// Not both components identically zero.
    pub fn is_nonzero(&self) -> bool {
        !(self.u.is_zero() && self.v.is_zero())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            u: self.u.scale(c),
            v: self.v.scale(c),
        }
    }

    pub fn axpy(a: f64, x: &Self, y: &Self) -> Result<Self> {
        Ok(Self {
            u: DiscreteField::axpy(a, &x.u, &y.u)?,
            v: DiscreteField::axpy(a, &x.v, &y.v)?,
        })
    }

    /// Product-space `ℓ²·cellvol` inner product.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        Ok(self.u.inner(&other.u)? + self.v.inner(&other.v)?)
    }

    pub fn l2_norm(&self) -> f64 {
        let (a, b) = (self.u.l2_norm(), self.v.l2_norm());
        (a * a + b * b).sqrt()
    }
}

/// Most bumps a random field superposes.
pub const MAX_BUMPS: usize = 16;

/// Deterministic superposition of Gaussian bumps.
///
/// Uses ChaCha8 seeded from `seed`, so the result is portable. Bump `k` has
/// amplitude `±exp(-decay·k)` (the first is positive), a centre in
/// `[-L/2, L/2]^N` and a width of at least `4h`.
pub fn random_smooth_field(grid: &GridSpec, seed: u64, decay: f64) -> Result<DiscreteField> {
    if !(decay > 0.0) {
        return Err(Error::InvalidParam {
            field: "decay",
            reason: format!("{decay} must be positive"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(1..=MAX_BUMPS);
    let l = grid.half_width;
    let w_min = (4.0 * grid.step()).max(l / 20.0);
    let w_max = w_min.max(l / 10.0);
    let bumps: Vec<(f64, Point, f64)> = (0..count)
        .map(|k| {
            let mut center = [0.0; 3];
            for c in center.iter_mut().take(grid.dim) {
                *c = rng.gen_range(-0.5..=0.5) * l;
            }
            let width = w_min + rng.gen::<f64>() * (w_max - w_min);
            let sign = if k == 0 || rng.gen::<bool>() { 1.0 } else { -1.0 };
            (sign * (-decay * k as f64).exp(), center, width)
        })
        .collect();
    DiscreteField::sample(*grid, |x| {
        bumps
            .iter()
            .map(|(amp, c, w)| {
                let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                amp * (-r2 / (2.0 * w * w)).exp()
            })
            .sum()
    })
}
