// The derivative pairing against central differences, and the gradient
// field as its Riesz representative.

use frac_nehari::derivative::{gradient_fields, pairing};
use frac_nehari::field::random_smooth_field;
use frac_nehari::functionals::energy;
use frac_nehari::{DiscreteField, FieldPair, GridSpec, ProblemParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 8.0, 256, true)?;
    let params = ProblemParams::symmetric(1, 0.3, 0.01, 0.5)?;
    let pair = FieldPair::new(random_smooth_field(&grid, 1, 0.5)?, random_smooth_field(&grid, 2, 0.5)?)?;
    let dir = FieldPair::new(random_smooth_field(&grid, 3, 0.5)?, random_smooth_field(&grid, 4, 0.5)?)?;

    let exact = pairing(&pair, &dir, &params)?;
    for t in [1e-3, 1e-4, 1e-5] {
        let fd = (energy(&FieldPair::axpy(t, &dir, &pair)?, &params)?
            - energy(&FieldPair::axpy(-t, &dir, &pair)?, &params)?)
            / (2.0 * t);
        println!("t = {t:e}: fd = {fd:.12}, rel err = {:.2e}", ((fd - exact) / exact).abs());
    }

    let grad = gradient_fields(&pair, &params)?;
    let e = FieldPair::new(DiscreteField::basis(grid, 100), DiscreteField::zeros(grid))?;
    println!("⟨grad, e_100⟩ = {:.15e}", grad.inner(&e)?);
    println!("pairing(e_100) = {:.15e}", pairing(&pair, &e, &params)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
