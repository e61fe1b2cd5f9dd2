// Minimising the coupled energy on the Nehari manifold from several restarts.

use frac_nehari::solver::{minimize_with_restarts, SolveConfig, LEVEL_LABEL};
use frac_nehari::{GridSpec, ProblemParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 10.0, 128, true)?;
    let params = ProblemParams::symmetric(1, 0.3, 0.0, 0.5)?;
    let config = SolveConfig {
        seed_count: 3,
        ..Default::default()
    };
    let report = minimize_with_restarts(&grid, &params, &config, 0)?;
    println!("{LEVEL_LABEL}: {:.10}", report.level);
    println!("{:?} after {} iterations, |∇J| = {:.2e}", report.stop, report.iters, report.grad_norm);
    println!("semitrivial: {:?}", report.semitrivial);
    if let Some(r) = &report.restarts {
        println!("restart levels {:?}", r.levels);
    }
    for (k, rec) in report.trace.iter().enumerate().step_by(25) {
        println!("  {k:>4}  J = {:.10}  |∇J| = {:.3e}  τ = {:.6}", rec.level, rec.grad_norm, rec.tau);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
