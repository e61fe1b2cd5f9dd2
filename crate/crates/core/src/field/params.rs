use serde::{Deserialize, Serialize};

use crate::constants::FractionalParams;
use crate::error::{Error, Result};
use crate::functionals::Quadrature;

/// Positive, bounded, integrable coupling weight `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum CouplingWeight {
    /// `a · exp(-|x|²/w²)`
    Gaussian { amplitude: f64, width: f64 },
    /// `a · (1 + |x|²/w²)^(-power)`, integrable for `power > N/2`
    Lorentzian {
        amplitude: f64,
        width: f64,
        power: f64,
    },
}

impl Default for CouplingWeight {
    fn default() -> Self {
        CouplingWeight::Gaussian {
            amplitude: 1.0,
            width: 1.0,
        }
    }
}

impl CouplingWeight {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        match *self {
            CouplingWeight::Gaussian { amplitude, width } => amplitude * (-r2 / (width * width)).exp(),
            CouplingWeight::Lorentzian {
                amplitude,
                width,
                power,
            } => amplitude * (1.0 + r2 / (width * width)).powf(-power),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let (amplitude, width) = match *self {
            CouplingWeight::Gaussian { amplitude, width } => (amplitude, width),
            CouplingWeight::Lorentzian {
                amplitude,
                width,
                power,
            } => {
                if !(power > dim as f64 / 2.0) {
                    return Err(Error::InvalidParam {
                        field: "weight.power",
                        reason: format!("{power} must exceed N/2 for h to be integrable"),
                    });
                }
                (amplitude, width)
            }
        };
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidParam {
                field: "weight.amplitude",
                reason: format!("{amplitude} must be positive and finite"),
            });
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParam {
                field: "weight.width",
                reason: format!("{width} must be positive and finite"),
            });
        }
        Ok(())
    }
}

/// Full parameter set of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub first: FractionalParams,
    pub second: FractionalParams,
    pub nu: f64,
    #[serde(default)]
    pub weight: CouplingWeight,
    #[serde(default)]
    pub quadrature: Quadrature,
}

impl ProblemParams {
    pub fn new(
        first: FractionalParams,
        second: FractionalParams,
        nu: f64,
        weight: CouplingWeight,
    ) -> Result<Self> {
        let p = Self {
            first,
            second,
            nu,
            weight,
            quadrature: Quadrature::default(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric parameters with the default Gaussian weight.
    pub fn symmetric(dim: usize, s: f64, lambda: f64, nu: f64) -> Result<Self> {
        let c = FractionalParams::new(dim, s, lambda)?;
        Self::new(c, c, nu, CouplingWeight::default())
    }

    pub fn validate(&self) -> Result<()> {
        self.first.validate()?;
        self.second.validate()?;
        if self.first.dim != self.second.dim {
            return Err(Error::InvalidParam {
                field: "dim",
                reason: format!("components disagree: {} vs {}", self.first.dim, self.second.dim),
            });
        }
        let n = self.first.dim as f64;
        let cap = 6.0 * self.first.s.min(self.second.s);
        if n > cap {
            return Err(Error::InvalidParam {
                field: "dim",
                reason: format!("N = {n} violates N <= min(6 s1, 6 s2) = {cap}"),
            });
        }
        if !self.nu.is_finite() {
            return Err(Error::InvalidParam {
                field: "nu",
                reason: "must be finite".into(),
            });
        }
        self.weight.validate(self.first.dim)?;
        self.quadrature.validate()
    }

    pub fn dim(&self) -> usize {
        self.first.dim
    }

    pub fn with_nu(&self, nu: f64) -> Self {
        Self { nu, ..*self }
    }

    /// Check that `grid` has the dimension of the problem.
    pub fn check_grid(&self, grid: &crate::field::GridSpec) -> Result<()> {
        if grid.dim != self.dim() {
            return Err(Error::InvalidParam {
                field: "grid.dim",
                reason: format!("grid has N = {}, problem has N = {}", grid.dim, self.dim()),
            });
        }
        Ok(())
    }
}
