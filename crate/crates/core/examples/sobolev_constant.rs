// Discrete Hardy–Sobolev constant `S(λ)` and the single-equation level by two routes.

use frac_nehari::solver::{single_ground_level, SolveConfig};
use frac_nehari::{FractionalParams, GridSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 10.0, 256, true)?;
    let base = FractionalParams::new(1, 0.3, 0.0)?;
    for lambda in [0.0, base.hardy_constant() / 2.0] {
        let p = base.with_lambda(lambda)?;
        let level = single_ground_level(&grid, &p, &SolveConfig::default())?;
        println!(
            "λ = {lambda:.6}: S ≈ {:.8}, (s/N)S^(N/2s) = {:.10}, Nehari minimum = {:.10}, gap {:.1e}",
            level.rayleigh.s_estimate,
            level.from_rayleigh,
            level.from_nehari,
            level.rel_gap()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
