// Every integral of the energy for a Gaussian pair, and how the pieces combine.

use frac_nehari::functionals::{breakdown, rayleigh_quotient};
use frac_nehari::nehari::phi;
use frac_nehari::{DiscreteField, FieldPair, GridSpec, ProblemParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(1, 10.0, 256, true)?;
    let params = ProblemParams::symmetric(1, 0.3, 0.02, 0.5)?;
    let u = DiscreteField::sample(grid, |x| (-x[0] * x[0]).exp())?;
    let v = DiscreteField::sample(grid, |x| 0.5 * (-(x[0] - 1.0).powi(2)).exp())?;
    let pair = FieldPair::new(u, v)?;

    let b = breakdown(&pair, &params)?;
    println!("{b:#?}");
    println!("J   = {:.12}", b.energy(&params));
    println!("Φ   = {:.12}", phi(&pair, &params)?);
    println!("Q_u = {:.12}", rayleigh_quotient(&pair.u, &params.first)?);
    for tau in [0.5, 1.0, 2.0] {
        println!("J(τ·pair), τ = {tau}: {:.6}", b.energy_along_ray(tau, &params));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
