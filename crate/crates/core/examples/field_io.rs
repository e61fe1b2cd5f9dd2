// Grids, seeded random fields and the CSV field format.

use frac_nehari::field::{random_smooth_field, read_csv, write_csv};
use frac_nehari::{DiscreteField, GridSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::new(2, 4.0, 16, true)?;
    println!("{} nodes, h = {}, origin node: {}", grid.len(), grid.step(), grid.has_origin_node());

    let u = random_smooth_field(&grid, 42, 0.5)?;
    assert_eq!(u, random_smooth_field(&grid, 42, 0.5)?);
    println!("seed 42: ‖u‖ = {:.6}", u.l2_norm());

    let mut buf = Vec::new();
    write_csv(&u, &mut buf)?;
    let text = String::from_utf8(buf)?;
    for line in text.lines().take(3) {
        println!("  {line}");
    }
    let back = read_csv(&grid, text.as_bytes())?;
    assert_eq!(back, u);

    let gauss = DiscreteField::sample(grid, |x| (-x.iter().map(|c| c * c).sum::<f64>()).exp())?;
    println!("‖gaussian‖² = {:.6} (π/2 ≈ {:.6})", gauss.l2_norm().powi(2), std::f64::consts::FRAC_PI_2);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
