//! Simulation and numerical verification of the multi-dimensional elephant
//! random walk and its Pólya-type urn.
//!
//! * [`walk`] simulates the walk from per-direction step counts.
//! * [`urn`] simulates the `2d`-colour urn and exposes the mean replacement
//!   matrix with its closed-form spectrum.
//! * [`theory`] evaluates the limit predictions in each memory regime.
//! * [`montecarlo`] runs seeded ensembles, the exact small-`n` oracle and
//!   the verification batteries.

pub mod direction;
pub mod error;
pub mod matrix;
pub mod montecarlo;
pub mod params;
pub mod theory;
pub mod urn;
pub mod walk;

pub use direction::StepDirection;
pub use error::{Error, Result};
pub use params::{critical_memory_exact, ModelParams, Probability};
pub use theory::{classify_regime, Regime, RegimeReport};
pub use urn::{mean_replacement_matrix, SpectralData, UrnState};
pub use walk::{PathSnapshot, WalkState};
