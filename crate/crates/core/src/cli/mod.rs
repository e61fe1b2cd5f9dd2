//! Command-line front end: `constants | energy | project | solve | validate`.
//!
//! Every command prints one JSON report on stdout and, with `--out DIR`,
//! also writes it to `DIR/<command>.json` next to any field files.
//!
//! Exit codes: 0 success, 1 validation failure, 2 rejected configuration or
//! input, 3 projection failure, 4 solve failure.

pub mod config;
pub mod json;
pub mod validate;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::derivative::SecondForm;
use crate::error::Error;
use crate::field::{read_csv, write_csv, DiscreteField, FieldPair};
use crate::functionals::{self, rayleigh_quotient};
use crate::nehari::{self, RestrictedForms};
use crate::solver::{self, SolveReport, LEVEL_LABEL};
pub use config::RunConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PROJECTION: u8 = 3;
pub const EXIT_SOLVE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "frac-nehari", version, about = "Energy, Nehari projection and ground-state search for coupled fractional systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration; defaults apply to every missing key.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for the report and field files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Base seed for `solve` restarts and `validate` samples.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct FieldInputs {
    /// CSV for the first component (overrides `input.u`).
    #[arg(long)]
    pub u: Option<PathBuf>,
    /// CSV for the second component (overrides `input.v`).
    #[arg(long)]
    pub v: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical exponents and Hardy constants of both components.
    Constants,
    /// Energy breakdown, J, Φ and Rayleigh quotients of a field pair.
    Energy(FieldInputs),
    /// Projection of a field pair onto the Nehari manifold.
    Project(FieldInputs),
    /// Minimise the energy on the Nehari manifold with restarts.
    Solve,
    /// Run the property suite on fixed seeds.
    Validate,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Energy(_) => "energy",
            Command::Project(_) => "project",
            Command::Solve => "solve",
            Command::Validate => "validate",
        }
    }
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, e: impl std::fmt::Display) -> Self {
        Self {
            code,
            message: e.to_string(),
        }
    }

    fn config(e: impl std::fmt::Display) -> Self {
        Self::new(EXIT_CONFIG, e)
    }
}

/// Report text, extra files for `--out`, and the exit code.
pub struct Outcome {
    pub report: String,
    pub files: Vec<(String, Vec<u8>)>,
    pub code: u8,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(report: &Value) -> Self {
        Self {
            report: json::to_report_string(report),
            files: Vec::new(),
            code: EXIT_OK,
            message: None,
        }
    }
}

pub fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => RunConfig::load(p).map_err(|e| CliError::config(format!("{}: {e}", p.display()))),
        None => Ok(RunConfig::default()),
    }
}

/// Executes a parsed command without touching stdout or the filesystem outputs.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let mut cfg = load_config(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.validate.seed = seed;
    }
    match &cli.command {
        Command::Constants => Ok(Outcome::ok(&cmd_constants(&cfg))),
        Command::Energy(inputs) => cmd_energy(&cfg, &load_pair(&cfg, inputs)?).map(|r| Outcome::ok(&r)),
        Command::Project(inputs) => cmd_project(&cfg, &load_pair(&cfg, inputs)?),
        Command::Solve => cmd_solve(&cfg, cli.seed.unwrap_or(0)),
        Command::Validate => cmd_validate(&cfg),
    }
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(e.code);
        }
    };
    if let Some(dir) = &cli.out {
        if let Err(e) = write_outputs(dir, cli.command.name(), &outcome) {
            eprintln!("error: writing {}: {e}", dir.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    print!("{}", outcome.report);
    if let Some(msg) = &outcome.message {
        eprintln!("{msg}");
    }
    ExitCode::from(outcome.code)
}

fn write_outputs(dir: &Path, name: &str, outcome: &Outcome) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{name}.json")), &outcome.report)?;
    for (file, bytes) in &outcome.files {
        fs::write(dir.join(file), bytes)?;
    }
    Ok(())
}

fn load_pair(cfg: &RunConfig, inputs: &FieldInputs) -> Result<FieldPair, CliError> {
    let pick = |flag: &Option<PathBuf>, section: &Option<PathBuf>, which: &str| {
        flag.clone()
            .or_else(|| section.clone())
            .ok_or_else(|| CliError::config(format!("no CSV given for `{which}` (use --{which} or input.{which})")))
    };
    let read = |path: PathBuf| -> Result<DiscreteField, CliError> {
        let file = fs::File::open(&path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        read_csv(&cfg.grid, file).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    };
    let u = read(pick(&inputs.u, &cfg.input.u, "u")?)?;
    let v = read(pick(&inputs.v, &cfg.input.v, "v")?)?;
    FieldPair::new(u, v).map_err(CliError::config)
}

fn csv_bytes(field: &DiscreteField) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(field, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn cmd_constants(cfg: &RunConfig) -> Value {
    let component = |c: &crate::FractionalParams| {
        json!({
            "dim": c.dim,
            "s": c.s,
            "lambda": c.lambda,
            "critical_exponent": c.critical_exponent(),
            "hardy_constant": c.hardy_constant(),
        })
    };
    json!({
        "command": "constants",
        "first": component(&cfg.problem.first),
        "second": component(&cfg.problem.second),
    })
}

pub fn cmd_energy(cfg: &RunConfig, pair: &FieldPair) -> Result<Value, CliError> {
    let params = &cfg.problem;
    let b = functionals::breakdown(pair, params).map_err(CliError::config)?;
    let mut notes = serde_json::Map::new();
    let phi = if pair.is_nonzero() {
        json!(nehari::phi_from_breakdown(&b, params))
    } else {
        notes.insert("phi".into(), json!(Error::ZeroField("the Nehari manifold excludes (0, 0)").to_string()));
        Value::Null
    };
    let mut quotient = |name: &str, u: &DiscreteField, c: &crate::FractionalParams| match rayleigh_quotient(u, c) {
        Ok(q) => json!(q),
        Err(e) => {
            notes.insert(name.into(), json!(e.to_string()));
            Value::Null
        }
    };
    let rayleigh_u = quotient("rayleigh_u", &pair.u, &params.first);
    let rayleigh_v = quotient("rayleigh_v", &pair.v, &params.second);
    Ok(json!({
        "command": "energy",
        "breakdown": b,
        "norm1": b.norm1(params),
        "norm2": b.norm2(params),
        "norm_sq": b.norm_sq(params),
        "energy": b.energy(params),
        "phi": phi,
        "rayleigh_u": rayleigh_u,
        "rayleigh_v": rayleigh_v,
        "notes": notes,
    }))
}

fn projection_error(e: Error) -> CliError {
    match e {
        Error::ProjectionFailed(_) | Error::ZeroField(_) => CliError::new(EXIT_PROJECTION, e),
        other => CliError::config(other),
    }
}

pub fn cmd_project(cfg: &RunConfig, pair: &FieldPair) -> Result<Outcome, CliError> {
    let params = &cfg.problem;
    let proj = nehari::project(pair, params).map_err(projection_error)?;
    let forms = RestrictedForms::from_breakdown(&proj.breakdown, params).map_err(projection_error)?;
    let second = SecondForm::from_breakdown(&proj.breakdown, params);
    let report = json!({
        "command": "project",
        "tau": proj.tau,
        "residual": proj.residual,
        "tolerance": proj.tolerance(params),
        "root_count": proj.root_count,
        "multiple_roots": proj.multiple_roots,
        "breakdown": proj.breakdown,
        "restricted_forms": forms,
        "max_rel_spread": forms.max_rel_spread(),
        "second_form": second,
    });
    let mut out = Outcome::ok(&report);
    out.files = vec![
        ("projected_u.csv".into(), csv_bytes(&proj.pair.u)),
        ("projected_v.csv".into(), csv_bytes(&proj.pair.v)),
    ];
    Ok(out)
}

pub fn solve_report_json(report: &SolveReport, cfg: &RunConfig) -> Value {
    let params = &cfg.problem;
    let b = &report.projection.breakdown;
    let forms = RestrictedForms::from_breakdown(b, params).ok();
    json!({
        "command": "solve",
        "label": LEVEL_LABEL,
        "level": report.level,
        "grad_norm": report.grad_norm,
        "grad_tol": report.grad_tol,
        "iters": report.iters,
        "stop": report.stop,
        "converged": report.converged(),
        "semitrivial": report.semitrivial,
        "tau": report.projection.tau,
        "residual": report.projection.residual,
        "breakdown": b,
        "restricted_forms": forms,
        "second_form": SecondForm::from_breakdown(b, params),
        "restarts": report.restarts,
        "trace": report.trace,
        "config": cfg.solve,
    })
}

pub fn cmd_solve(cfg: &RunConfig, base_seed: u64) -> Result<Outcome, CliError> {
    let report = solver::minimize_with_restarts(&cfg.grid, &cfg.problem, &cfg.solve, base_seed)
        .map_err(|e| CliError::new(EXIT_SOLVE, format!("all restarts failed: {e}")))?;
    let mut out = Outcome::ok(&solve_report_json(&report, cfg));
    out.files = vec![
        ("u.csv".into(), csv_bytes(&report.pair.u)),
        ("v.csv".into(), csv_bytes(&report.pair.v)),
    ];
    Ok(out)
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let checks = validate::run_checks(cfg).map_err(|e| CliError::new(EXIT_VALIDATION, format!("validation aborted: {e}")))?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    let report = json!({
        "command": "validate",
        "seed": cfg.validate.seed,
        "all_pass": failed.is_empty(),
        "checks": checks,
    });
    let mut out = Outcome::ok(&report);
    if !failed.is_empty() {
        out.code = EXIT_VALIDATION;
        out.message = Some(format!("failed checks: {}", failed.join(", ")));
    }
    Ok(out)
}
