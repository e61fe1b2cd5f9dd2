// Critical exponents and Hardy constants for a few admissible `(N, s)`.

use frac_nehari::constants::{critical_exponent, gamma, hardy_constant};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("Γ(1/2)² = {:.15} (π = {:.15})", gamma(0.5)?.powi(2), std::f64::consts::PI);
    println!("{:>3} {:>6} {:>10} {:>22}", "N", "s", "2*", "Λ");
    for (n, s) in [(1, 0.2), (1, 0.25), (1, 0.45), (2, 0.5), (3, 0.5), (3, 0.75)] {
        println!("{n:>3} {s:>6} {:>10.6} {:>22.15e}", critical_exponent(n, s)?, hardy_constant(n, s)?);
    }
    // N = 2s is outside the admissible range
    assert!(critical_exponent(1, 0.5).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
