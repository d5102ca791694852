//! Ensembles, estimators, the exact small-`n` oracle and the verification
//! batteries for each limit theorem.

mod enumerate;
mod ensemble;
mod moments;
mod rng;
pub mod stats;
mod verify;

pub use enumerate::{
    default_enumeration_max_n, exact_small_n_pmf, exact_small_n_pmf_with_budget,
    exact_urn_composition_pmf, ExactPmf,
};
pub use ensemble::{
    run_ensemble, EnsembleConfig, EnsembleSummary, Normalization, Schedule, DEFAULT_STEP_BUDGET,
};
pub use moments::Moments;
pub use rng::{replica_rng, ReplicaRng};
pub use verify::{
    verify_center_of_mass, verify_critical, verify_diffusive_clt, verify_slln,
    verify_superdiffusive, CenterOfMassConfig, Check, CltConfig, CriticalConfig, RunConfig,
    SllnConfig, SuperdiffusiveConfig, TheoremId, Verdict, VerificationReport,
};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;

/// Which simulator produces the walk positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Walk,
    Urn,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Walk => "walk",
            Engine::Urn => "urn",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "walk" => Ok(Engine::Walk),
            "urn" => Ok(Engine::Urn),
            other => Err(Error::Config(format!("unknown engine {other:?}, expected walk or urn"))),
        }
    }
}
