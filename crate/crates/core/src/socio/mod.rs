//! Socio-cognitive variants of the baseline engine.

mod caste;
mod separated;
mod topsis;

pub use caste::{
    assign_castes, caste_run, caste_sizes, child_caste, select_parents_cross_caste, AssignmentMode, CasteConfig,
};
pub use separated::{learning_operator, reassign_caste_order, separated_run, SeparatedConfig};
pub use topsis::{attraction_point, repulsion_point, topsis_mutation, topsis_run, TopsisConfig, WeightingVariant};

pub use crate::engine::CasteTag;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{run_baseline, Bound, EngineConfig, Objective, RunTrace};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    Genetic,
    Caste,
    Separated,
    Topsis,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Genetic, Algorithm::Caste, Algorithm::Separated, Algorithm::Topsis];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Genetic => "genetic",
            Algorithm::Caste => "caste",
            Algorithm::Separated => "separated",
            Algorithm::Topsis => "topsis",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm `{s}` (expected genetic, caste, separated or topsis)")))
    }
}

/// Parameters of every variant; only the selected one is used.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariantConfigs {
    pub caste: CasteConfig,
    pub separated: SeparatedConfig,
    pub topsis: TopsisConfig,
}

impl VariantConfigs {
    pub fn validate(&self, algorithm: Algorithm, engine: &EngineConfig) -> Result<()> {
        engine.validate()?;
        match algorithm {
            Algorithm::Genetic => Ok(()),
            Algorithm::Caste => self.caste.validate(engine),
            Algorithm::Separated => self.separated.validate(engine),
            Algorithm::Topsis => self.topsis.validate(engine),
        }
    }
}

/// Runs one seeded optimisation with the chosen algorithm.
pub fn run_algorithm(
    algorithm: Algorithm,
    objective: &dyn Objective,
    bounds: &[Bound],
    engine: &EngineConfig,
    variants: &VariantConfigs,
) -> Result<RunTrace> {
    match algorithm {
        Algorithm::Genetic => run_baseline(objective, bounds, engine),
        Algorithm::Caste => caste_run(objective, bounds, engine, &variants.caste),
        Algorithm::Separated => separated_run(objective, bounds, engine, &variants.separated),
        Algorithm::Topsis => topsis_run(objective, bounds, engine, &variants.topsis),
    }
}
