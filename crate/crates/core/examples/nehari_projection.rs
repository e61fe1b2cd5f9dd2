// Projection of a random pair onto the Nehari manifold and the identities that hold there.

use frac_nehari::derivative::SecondForm;
use frac_nehari::field::random_smooth_field;
use frac_nehari::nehari::{project, RestrictedForms};
use frac_nehari::{FieldPair, GridSpec, ProblemParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 10.0, 256, true)?;
    let params = ProblemParams::symmetric(1, 0.3, 0.0, 0.5)?;
    let pair = FieldPair::new(random_smooth_field(&grid, 7, 0.5)?, random_smooth_field(&grid, 8, 0.5)?)?;

    let proj = project(&pair, &params)?;
    println!("tau = {:.15}, residual = {:.2e}, roots = {}", proj.tau, proj.residual, proj.root_count);

    for c in [0.2, 5.0] {
        let other = project(&pair.scale(c), &params)?;
        println!("pre-scaled by {c}: tau·c = {:.15}", other.tau * c);
    }

    let forms = RestrictedForms::from_breakdown(&proj.breakdown, &params)?;
    println!("{forms:?}  spread {:.1e}", forms.max_rel_spread());
    println!("J'' along the pair = {:.6}", SecondForm::from_breakdown(&proj.breakdown, &params).value());

    let b = proj.breakdown;
    for tau in [0.5, 1.0, 2.0, 8.0] {
        println!("J at {tau}·τ*: {:.6}", b.energy_along_ray(tau, &params));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
