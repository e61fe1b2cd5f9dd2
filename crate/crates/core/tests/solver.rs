//! Default-configuration ground-state search, pinned to a recorded level.

use frac_nehari::solver::{minimize_with_restarts, Semitrivial, SolveConfig};
use frac_nehari::{GridSpec, ProblemParams};

// first recorded run: N = 1, s = 0.3, λ = 0, ν = 0.5, L = 10, M = 512, seeds 0..5
const RECORDED_LEVEL: f64 = 6.791_316_921_409_173;

#[test]
fn default_search_reproduces_recorded_level() {
    let grid = GridSpec::new(1, 10.0, 512, true).unwrap();
    let params = ProblemParams::symmetric(1, 0.3, 0.0, 0.5).unwrap();
    let report = minimize_with_restarts(&grid, &params, &SolveConfig::default(), 0).unwrap();
    assert!(report.converged());
    assert_eq!(report.semitrivial, Semitrivial::No);
    assert!(((report.level - RECORDED_LEVEL) / RECORDED_LEVEL).abs() <= 1e-3, "level {}", report.level);
}
