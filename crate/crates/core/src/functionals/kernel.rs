//! Tabulated Gagliardo kernel and exterior correction for one `(grid, s)`.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::field::GridSpec;

/// Gauss–Legendre order used for the angular face integrals.
pub const FACE_QUADRATURE_POINTS: usize = 16;

pub struct KernelTable {
    pub grid: GridSpec,
    pub s: f64,
    /// `|Δ|^{-N-2s} · cellvol²` indexed by absolute index offsets; 0 at Δ = 0.
    pub pair: Vec<f64>,
    /// `2 · K_out(x_i) · cellvol`, the zero-extension contribution of node `i`.
    pub exterior: Vec<f64>,
}

impl KernelTable {
    pub fn build(grid: &GridSpec, s: f64) -> Self {
        let h = grid.step();
        let cell = grid.cell_volume();
        let expo = -(grid.dim as f64 + 2.0 * s);
        let pair = (0..grid.len())
            .map(|k| {
                let mi = grid.multi_index(k);
                let r2: f64 = mi[..grid.dim].iter().map(|&d| (d as f64 * h).powi(2)).sum();
                if r2 == 0.0 {
                    0.0
                } else {
                    r2.powf(0.5 * expo) * cell * cell
                }
            })
            .collect();
        let exterior = grid
            .nodes()
            .map(|p| 2.0 * exterior_kernel(grid, s, &p[..grid.dim]) * cell)
            .collect();
        Self {
            grid: *grid,
            s,
            pair,
            exterior,
        }
    }

    /// Shared table for `(grid, s)`; a handful of recent tables are kept.
    pub fn cached(grid: &GridSpec, s: f64) -> Arc<Self> {
        const CAPACITY: usize = 8;
        static CACHE: OnceLock<Mutex<Vec<Arc<KernelTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        {
            let guard = cache.lock().unwrap();
            if let Some(t) = guard.iter().find(|t| t.grid == *grid && t.s.to_bits() == s.to_bits()) {
                return Arc::clone(t);
            }
        }
        let table = Arc::new(Self::build(grid, s));
        let mut guard = cache.lock().unwrap();
        if guard.len() >= CAPACITY {
            guard.remove(0);
        }
        guard.push(Arc::clone(&table));
        table
    }

    /// Calls `f(j, pair_kernel(i, j))` for every node `j` in grid order.
    #[inline]
    pub fn for_each_in_row(&self, i: usize, mut f: impl FnMut(usize, f64)) {
        let m = self.grid.points;
        let a = self.grid.multi_index(i);
        match self.grid.dim {
            1 => {
                for j in 0..m {
                    f(j, self.pair[a[0].abs_diff(j)]);
                }
            }
            2 => {
                let mut j = 0;
                for b0 in 0..m {
                    let base = a[0].abs_diff(b0) * m;
                    for b1 in 0..m {
                        f(j, self.pair[base + a[1].abs_diff(b1)]);
                        j += 1;
                    }
                }
            }
            _ => {
                let mut j = 0;
                for b0 in 0..m {
                    let base0 = a[0].abs_diff(b0) * m * m;
                    for b1 in 0..m {
                        let base1 = base0 + a[1].abs_diff(b1) * m;
                        for b2 in 0..m {
                            f(j, self.pair[base1 + a[2].abs_diff(b2)]);
                            j += 1;
                        }
                    }
                }
            }
        }
    }
}

/// `K_out(x) = ∫_{R^N \ [-L,L]^N} |x - y|^{-N-2s} dy` for `x` inside the box.
///
/// Integrating the radial variable exactly leaves `(1/2s) ∫_{S^{N-1}} ρ(θ)^{-2s} dθ`
/// with `ρ` the distance to the boundary. In 1D this is closed form; in 2D and 3D
/// the sphere is split into the solid angles of the box faces and each face is
/// integrated in tangent-angle coordinates with Gauss–Legendre rules.
pub fn exterior_kernel(grid: &GridSpec, s: f64, x: &[f64]) -> f64 {
    let l = grid.half_width;
    let two_s = 2.0 * s;
    match grid.dim {
        1 => ((l - x[0]).powf(-two_s) + (l + x[0]).powf(-two_s)) / two_s,
        2 => {
            let (nodes, weights) = gauss_legendre();
            let mut total = 0.0;
            for axis in 0..2 {
                let other = 1 - axis;
                let (a, b) = (-l - x[other], l - x[other]);
                for d in [l - x[axis], l + x[axis]] {
                    let (lo, hi) = ((a / d).atan(), (b / d).atan());
                    let integral = gl_integrate(nodes, weights, lo, hi, |phi| phi.cos().powf(two_s));
                    total += d.powf(-two_s) * integral;
                }
            }
            total / two_s
        }
        3 => {
            let (nodes, weights) = gauss_legendre();
            let mut total = 0.0;
            for axis in 0..3 {
                let (o1, o2) = ((axis + 1) % 3, (axis + 2) % 3);
                let (a1, b1) = (-l - x[o1], l - x[o1]);
                let (a2, b2) = (-l - x[o2], l - x[o2]);
                for d in [l - x[axis], l + x[axis]] {
                    let (lo, hi) = ((a1 / d).atan(), (b1 / d).atan());
                    let integral = gl_integrate(nodes, weights, lo, hi, |phi| {
                        let c = phi.cos();
                        let (ilo, ihi) = ((a2 * c / d).atan(), (b2 * c / d).atan());
                        let inner = gl_integrate(nodes, weights, ilo, ihi, |psi| psi.cos().powf(1.0 + two_s));
                        c.powf(two_s) * inner
                    });
                    total += d.powf(-two_s) * integral;
                }
            }
            total / two_s
        }
        n => panic!("unsupported dimension {n}"),
    }
}

fn gl_integrate(nodes: &[f64], weights: &[f64], lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    nodes
        .iter()
        .zip(weights)
        .map(|(t, w)| w * f(mid + half * t))
        .sum::<f64>()
        * half
}

/// Nodes and weights of the Gauss–Legendre rule on [-1, 1].
fn gauss_legendre() -> (&'static [f64], &'static [f64]) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (n, w) = RULE.get_or_init(|| legendre_rule(FACE_QUADRATURE_POINTS));
    (n, w)
}

pub(crate) fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (n, w) = gauss_legendre();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact up to degree 31
        let i30 = gl_integrate(n, w, -1.0, 1.0, |x| x.powi(30));
        assert!((i30 - 2.0 / 31.0).abs() < 1e-14);
    }

    // Independent route: march the polar angle on a fine uniform grid and
    // integrate ρ(θ)^{-2s}/(2s), ρ found by ray-box intersection.
    fn ray_distance(x: &[f64], dir: &[f64], l: f64) -> f64 {
        x.iter()
            .zip(dir)
            .filter(|(_, d)| d.abs() > 1e-300)
            .map(|(&xi, &di)| if di > 0.0 { (l - xi) / di } else { (-l - xi) / di })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn exterior_2d_matches_angular_sweep() {
        let grid = GridSpec::new(2, 1.0, 8, true).unwrap();
        let s = 0.4;
        for x in [[0.0, 0.0], [0.3, -0.5], [0.875, 0.875], [-0.9, 0.1]] {
            let n = 200_000;
            let mut acc = 0.0;
            for k in 0..n {
                let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                let rho = ray_distance(&x, &[th.cos(), th.sin()], 1.0);
                acc += rho.powf(-2.0 * s);
            }
            let oracle = acc * 2.0 * PI / n as f64 / (2.0 * s);
            let got = exterior_kernel(&grid, s, &x);
            assert!(((got - oracle) / oracle).abs() < 1e-4, "{x:?}: {got} vs {oracle}");
        }
    }

    #[test]
    fn exterior_3d_matches_sphere_sweep() {
        let grid = GridSpec::new(3, 1.0, 8, true).unwrap();
        let s = 0.6;
        for x in [[0.0, 0.0, 0.0], [0.5, -0.25, 0.1], [0.8, 0.8, -0.7]] {
            let (nt, np) = (800, 1600);
            let mut acc = 0.0;
            for i in 0..nt {
                let th = PI * (i as f64 + 0.5) / nt as f64;
                for j in 0..np {
                    let ph = 2.0 * PI * (j as f64 + 0.5) / np as f64;
                    let dir = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                    acc += ray_distance(&x, &dir, 1.0).powf(-2.0 * s) * th.sin();
                }
            }
            let oracle = acc * (PI / nt as f64) * (2.0 * PI / np as f64) / (2.0 * s);
            let got = exterior_kernel(&grid, s, &x);
            assert!(((got - oracle) / oracle).abs() < 2e-4, "{x:?}: {got} vs {oracle}");
        }
    }

    #[test]
    fn exterior_1d_closed_form() {
        let grid = GridSpec::new(1, 2.0, 8, true).unwrap();
        let got = exterior_kernel(&grid, 0.25, &[0.5]);
        let want = (1.5f64.powf(-0.5) + 2.5f64.powf(-0.5)) / 0.5;
        assert!((got - want).abs() < 1e-15);
    }
}
