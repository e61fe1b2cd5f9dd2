//! JSON run configuration with sections `problem`, `grid`, `solve`,
//! `input` and `validate`. Every key is optional.
//!
//! | key | default |
//! |---|---|
//! | `problem.dim` | 1 |
//! | `problem.s1`, `problem.s2` | 0.3 |
//! | `problem.lambda1`, `problem.lambda2` | 0 |
//! | `problem.nu` | 0.5 |
//! | `problem.weight` | `{"profile": "gaussian", "amplitude": 1, "width": 1}` |
//! | `problem.quadrature.block_rows` | 1 |
//! | `grid.half_width` | 10 |
//! | `grid.points` | 512 |
//! | `grid.offset` | true |
//! | `solve.max_iters` | 2000 |
//! | `solve.step0` | 1 |
//! | `solve.armijo` | `{"shrink": 0.5, "slope": 1e-4, "growth": 2}` |
//! | `solve.grad_tol` | `{"kind": "relative", "value": 1e-6}` |
//! | `solve.seed_count` | 5 |
//! | `input.u`, `input.v` | none; relative paths resolve against the config file |
//! | `validate.seed` | 0 |
//! | `validate.hardy_scale` | 1 (multiplies Λ in the Hardy check) |

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constants::FractionalParams;
use crate::error::{Error, Result};
use crate::field::{CouplingWeight, GridSpec, ProblemParams};
use crate::functionals::Quadrature;
use crate::solver::SolveConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSection {
    pub dim: usize,
    pub s1: f64,
    pub s2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub nu: f64,
    pub weight: CouplingWeight,
    pub quadrature: Quadrature,
}

impl Default for ProblemSection {
    fn default() -> Self {
        Self {
            dim: 1,
            s1: 0.3,
            s2: 0.3,
            lambda1: 0.0,
            lambda2: 0.0,
            nu: 0.5,
            weight: CouplingWeight::default(),
            quadrature: Quadrature::default(),
        }
    }
}

impl ProblemSection {
    pub fn params(&self) -> Result<ProblemParams> {
        let first = FractionalParams::new(self.dim, self.s1, self.lambda1).map_err(|e| rename(e, "problem.s1/lambda1"))?;
        let second = FractionalParams::new(self.dim, self.s2, self.lambda2).map_err(|e| rename(e, "problem.s2/lambda2"))?;
        let mut p = ProblemParams::new(first, second, self.nu, self.weight)?;
        p.quadrature = self.quadrature;
        p.validate()?;
        Ok(p)
    }
}

fn rename(e: Error, field: &'static str) -> Error {
    match e {
        Error::InvalidParam { reason, field: inner } => Error::InvalidParam {
            field,
            reason: format!("{inner}: {reason}"),
        },
        Error::Domain(reason) => Error::InvalidParam { field, reason },
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub half_width: f64,
    pub points: usize,
    pub offset: bool,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            half_width: 10.0,
            points: 512,
            offset: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    pub u: Option<PathBuf>,
    pub v: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    pub seed: u64,
    pub hardy_scale: f64,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self {
            seed: 0,
            hardy_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    problem: ProblemSection,
    grid: GridSection,
    solve: SolveConfig,
    input: InputSection,
    validate: ValidateSection,
}

/// A fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemParams,
    pub grid: GridSpec,
    pub solve: SolveConfig,
    pub input: InputSection,
    pub validate: ValidateSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_json("{}").expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line() as u64,
            msg: e.to_string(),
        })?;
        let problem = raw.problem.params()?;
        let g = raw.grid;
        let grid = GridSpec::new(problem.dim(), g.half_width, g.points, g.offset)?;
        raw.solve.validate()?;
        if !(raw.validate.hardy_scale > 0.0) {
            return Err(Error::InvalidParam {
                field: "validate.hardy_scale",
                reason: format!("{} must be positive", raw.validate.hardy_scale),
            });
        }
        Ok(Self {
            problem,
            grid,
            solve: raw.solve,
            input: raw.input,
            validate: raw.validate,
        })
    }

    /// Reads `path`; relative input paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.input.u, &mut cfg.input.v].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c.grid, GridSpec::new(1, 10.0, 512, true).unwrap());
        assert_eq!(c.problem, ProblemParams::symmetric(1, 0.3, 0.0, 0.5).unwrap());
        assert_eq!(c.solve, SolveConfig::default());
    }

    #[test]
    fn gate_names_the_field() {
        let err = RunConfig::from_json(r#"{"problem": {"dim": 4, "s1": 0.5, "s2": 0.5}}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidParam { field: "dim", .. }), "{err}");
        let err = RunConfig::from_json(r#"{"problem": {"lambda1": 1.0}}"#).unwrap_err();
        assert!(err.to_string().contains("problem.s1/lambda1"), "{err}");
        let err = RunConfig::from_json(r#"{"grid": {"points": 511}}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
        let err = RunConfig::from_json(r#"{"solve": {"armijo": {"shrink": 2.0, "slope": 0.1}}}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidParam { field: "solve.armijo.shrink", .. }));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_json(r#"{"problem": {"nuu": 1}}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn nested_sections_parse() {
        let text = r#"{
            "problem": {"dim": 2, "s1": 0.4, "s2": 0.5, "nu": -1.0,
                        "weight": {"profile": "lorentzian", "amplitude": 2, "width": 1, "power": 1.5}},
            "grid": {"half_width": 4, "points": 32},
            "solve": {"grad_tol": {"kind": "absolute", "value": 1e-8}, "seed_count": 2}
        }"#;
        let c = RunConfig::from_json(text).unwrap();
        assert_eq!(c.grid.dim, 2);
        assert_eq!(c.problem.second.s, 0.5);
        assert_eq!(c.solve.seed_count, 2);
    }
}
