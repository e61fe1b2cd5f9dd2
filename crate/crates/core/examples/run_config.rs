// Driving the command layer from an in-memory JSON configuration.

use frac_nehari::cli::{self, json::to_report_string, RunConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::from_json(
        r#"{
            "problem": {"s1": 0.25, "s2": 0.4, "nu": 1.0},
            "grid": {"half_width": 8, "points": 128}
        }"#,
    )?;
    print!("{}", to_report_string(&cli::cmd_constants(&cfg)));

    let outcome = cli::cmd_validate(&cfg).map_err(|e| e.message)?;
    println!("validate exit code {}", outcome.code);
    assert_eq!(outcome.code, cli::EXIT_OK);

    let rejected = RunConfig::from_json(r#"{"problem": {"dim": 4, "s1": 0.5, "s2": 0.5}}"#);
    println!("N = 4, s = 0.5: {}", rejected.unwrap_err());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
