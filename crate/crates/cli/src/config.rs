//! TOML experiment configuration with flag overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tdsopt::bench::{ExperimentConfig, DEFAULT_CONVERGENCE_STRIDE};
use tdsopt::engine::{Bound, EngineConfig};
use tdsopt::model::{
    default_search_bounds, IdentificationProblem, ObservationDataset, PenaltySettings, PlotGrid,
    REFERENCE_STATIC_GAIN,
};
use tdsopt::socio::{Algorithm, CasteConfig, SeparatedConfig, TopsisConfig, VariantConfigs};

use crate::CliError;

/// File name of the resolved configuration written next to the outputs.
pub const ECHO_FILE: &str = "resolved_config.toml";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub algorithm: Algorithm,
    pub repetitions: usize,
    pub base_seed: u64,
    pub jobs: usize,
    pub convergence_stride: usize,
    pub output_dir: PathBuf,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Genetic,
            repetitions: 10,
            base_seed: 0,
            jobs: 1,
            convergence_stride: DEFAULT_CONVERGENCE_STRIDE,
            output_dir: PathBuf::from("results"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    /// `omega,re,im` CSV; the embedded reference table when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    pub static_gain: f64,
    pub eps: f64,
    pub penalty_base: f64,
    pub penalty_weight: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = PenaltySettings::default();
        Self {
            dataset: None,
            static_gain: REFERENCE_STATIC_GAIN,
            eps: p.eps,
            penalty_base: p.penalty_base,
            penalty_weight: p.penalty_weight,
        }
    }
}

impl ModelSection {
    pub fn penalty(&self) -> PenaltySettings {
        PenaltySettings { eps: self.eps, penalty_base: self.penalty_base, penalty_weight: self.penalty_weight }
    }

    pub fn dataset(&self) -> Result<ObservationDataset, CliError> {
        match &self.dataset {
            Some(path) => Ok(ObservationDataset::load(path, self.static_gain)?),
            None => Ok(ObservationDataset::new(ObservationDataset::reference().samples().to_vec(), self.static_gain)?),
        }
    }
}

/// Per-gene `[lower, upper]` overrides of the default search box.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau0: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a0_theta: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<[f64; 2]>,
}

impl BoundsSection {
    fn slots(&mut self) -> [&mut Option<[f64; 2]>; 8] {
        [
            &mut self.b0,
            &mut self.tau0,
            &mut self.tau,
            &mut self.a2,
            &mut self.a1,
            &mut self.a0,
            &mut self.a0_theta,
            &mut self.theta,
        ]
    }

    /// Overrides applied on top of the defaults for `eps`, in gene order.
    pub fn resolve(&self, eps: f64) -> Vec<Bound> {
        let mut copy = self.clone();
        default_search_bounds(eps)
            .into_iter()
            .zip(copy.slots())
            .map(|(d, o)| o.map_or(d, |[lo, hi]| Bound::new(lo, hi)))
            .collect()
    }

    fn fill(&mut self, bounds: &[Bound]) {
        for (slot, b) in self.slots().into_iter().zip(bounds) {
            *slot = Some([b.lower, b.upper]);
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliConfig {
    pub experiment: ExperimentSection,
    pub engine: EngineConfig,
    pub caste: CasteConfig,
    pub separated: SeparatedConfig,
    pub topsis: TopsisConfig,
    pub model: ModelSection,
    pub bounds: BoundsSection,
    pub plot: PlotGrid,
}

/// Command-line values that win over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub repetitions: Option<usize>,
    pub budget: Option<usize>,
    pub jobs: Option<usize>,
    pub algorithm: Option<Algorithm>,
}

impl CliConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        let e = &mut self.experiment;
        if let Some(v) = &o.out {
            e.output_dir = v.clone();
        }
        if let Some(v) = o.seed {
            e.base_seed = v;
        }
        if let Some(v) = o.repetitions {
            e.repetitions = v;
        }
        if let Some(v) = o.jobs {
            e.jobs = v;
        }
        if let Some(v) = o.algorithm {
            e.algorithm = v;
        }
        if let Some(v) = o.budget {
            self.engine.evaluation_budget = v;
        }
    }

    pub fn variants(&self) -> VariantConfigs {
        VariantConfigs { caste: self.caste.clone(), separated: self.separated.clone(), topsis: self.topsis.clone() }
    }

    pub fn experiment(&self, algorithm: Algorithm) -> Result<ExperimentConfig, CliError> {
        if self.experiment.jobs == 0 {
            return Err(CliError::Validation("jobs must be at least 1".into()));
        }
        if self.experiment.convergence_stride == 0 {
            return Err(CliError::Validation("convergence_stride must be at least 1".into()));
        }
        let cfg = ExperimentConfig {
            algorithm,
            engine: self.engine.clone(),
            variants: self.variants(),
            repetitions: self.experiment.repetitions,
            base_seed: self.experiment.base_seed,
            jobs: self.experiment.jobs,
            problem: IdentificationProblem::new(self.model.dataset()?, self.model.penalty()),
            bounds: self.bounds.resolve(self.model.eps),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The configuration with every bound spelled out, as TOML.
    pub fn echo(&self) -> String {
        let mut full = self.clone();
        let bounds = full.bounds.resolve(full.model.eps);
        full.bounds.fill(&bounds);
        toml::to_string(&full).expect("config serializes")
    }

    pub fn write_echo(&self, dir: &Path) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
        let path = dir.join(ECHO_FILE);
        std::fs::write(&path, self.echo()).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}
