//! Numerical toolkit for the coupled fractional Hardy–Sobolev system
//!
//! ```text
//! (-Δ)^{s1} u − λ1 u/|x|^{2s1} = |u|^{2*_{s1}-2} u + 2ν h u v
//! (-Δ)^{s2} v − λ2 v/|x|^{2s2} = |v|^{2*_{s2}-2} v + ν h u²
//! ```
//!
//! on a truncated uniform grid: quadrature of the energy `J_ν`, its
//! derivative, projection onto the Nehari manifold and ground-state search.

pub mod cli;
pub mod constants;
pub mod derivative;
pub mod error;
pub mod field;
pub mod functionals;
pub mod nehari;
pub mod solver;

pub use constants::FractionalParams;
pub use error::{Error, Result};
pub use field::{CouplingWeight, DiscreteField, FieldPair, GridSpec, ProblemParams};
pub use functionals::EnergyBreakdown;
