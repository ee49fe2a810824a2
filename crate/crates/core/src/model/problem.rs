use serde::{Deserialize, Serialize};

use super::{complete_parameters, feasibility, FreeGenes, ModelParameters, ObservationDataset, DEFAULT_EPS};
use crate::engine::{Bound, Objective};

/// Static penalty applied to infeasible parameter vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PenaltySettings {
    /// Strict-inequality tolerance.
    pub eps: f64,
    pub penalty_base: f64,
    pub penalty_weight: f64,
}

impl Default for PenaltySettings {
    fn default() -> Self {
        Self { eps: DEFAULT_EPS, penalty_base: 1e6, penalty_weight: 1.0 }
    }
}

/// Least-squares cost for feasible vectors, otherwise
/// `penalty_base + penalty_weight * total_violation`. The model is not
/// evaluated for infeasible vectors.
pub fn penalized_cost(p: &ModelParameters, data: &ObservationDataset, penalty: &PenaltySettings) -> f64 {
    let report = feasibility(p, penalty.eps);
    if !report.feasible {
        return penalty.penalty_base + penalty.penalty_weight * report.total_violation();
    }
    // Feasible vectors keep |den| >= eps * min|poly| > 0, so this only trips
    // on overflow.
    match p.cost(data) {
        Ok(c) if c.is_finite() => c,
        _ => penalty.penalty_base,
    }
}

/// Box bounds for the eight free genes, in [`FreeGenes::NAMES`] order.
pub fn default_search_bounds(eps: f64) -> Vec<Bound> {
    let delay = Bound::new(eps, 1000.0);
    let coeff = Bound::new(eps, 10.0);
    let unit = Bound::new(-1.0, 1.0);
    vec![unit, delay, delay, coeff, coeff, unit, unit, delay]
}

/// The identification task as a gene-vector objective.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentificationProblem {
    pub data: ObservationDataset,
    pub penalty: PenaltySettings,
}

impl IdentificationProblem {
    pub fn new(data: ObservationDataset, penalty: PenaltySettings) -> Self {
        Self { data, penalty }
    }

    pub fn parameters(&self, genes: &FreeGenes) -> ModelParameters {
        complete_parameters(genes, self.data.static_gain())
    }
}

impl Default for IdentificationProblem {
    fn default() -> Self {
        Self::new(ObservationDataset::reference(), PenaltySettings::default())
    }
}

impl Objective for IdentificationProblem {
    fn evaluate(&self, genes: &[f64]) -> f64 {
        match FreeGenes::from_slice(genes) {
            Ok(g) => penalized_cost(&self.parameters(&g), &self.data, &self.penalty),
            Err(_) => f64::INFINITY,
        }
    }
}
