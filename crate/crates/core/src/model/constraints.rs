//! Stability, feasibility and minimum-phase conditions on the model
//! parameters, expressed as continuous violation magnitudes.

use std::fmt;

use serde::Serialize;

use super::ModelParameters;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintGroup {
    /// `tau0 > 0`, `tau > 0`, `theta > 0`
    DelayPositivity,
    /// `a2 > 0`, `a1 > 0`, `a0 + a0_theta > 0`
    CoefficientPositivity,
    /// `a2 a1 > a0`
    ProductExceedsA0,
    /// `a2 a1 > a0 + a0_theta`
    ProductExceedsSum,
    /// `|a0_theta| < |a0 - a2 ω² + jω(a1 - ω²)|` for every `ω > 0`
    DelayedTermBound,
    /// `|b0| > |b0_tau|`
    NumeratorDominance,
    /// `a0`, `a0_theta`, `b0_tau` nonzero
    NonZero,
}

impl ConstraintGroup {
    pub const ALL: [ConstraintGroup; 7] = [
        ConstraintGroup::DelayPositivity,
        ConstraintGroup::CoefficientPositivity,
        ConstraintGroup::ProductExceedsA0,
        ConstraintGroup::ProductExceedsSum,
        ConstraintGroup::DelayedTermBound,
        ConstraintGroup::NumeratorDominance,
        ConstraintGroup::NonZero,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ConstraintGroup::DelayPositivity => "delay_positivity",
            ConstraintGroup::CoefficientPositivity => "coefficient_positivity",
            ConstraintGroup::ProductExceedsA0 => "a2a1_exceeds_a0",
            ConstraintGroup::ProductExceedsSum => "a2a1_exceeds_a0_plus_a0theta",
            ConstraintGroup::DelayedTermBound => "delayed_term_bound",
            ConstraintGroup::NumeratorDominance => "numerator_dominance",
            ConstraintGroup::NonZero => "nonzero_coefficients",
        }
    }
}

impl fmt::Display for ConstraintGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// One entry per [`ConstraintGroup`], in [`ConstraintGroup::ALL`] order.
    pub violations: Vec<(ConstraintGroup, f64)>,
}

impl FeasibilityReport {
    pub fn total_violation(&self) -> f64 {
        self.violations.iter().map(|(_, v)| v).sum()
    }

    pub fn violation(&self, group: ConstraintGroup) -> f64 {
        self.violations
            .iter()
            .find(|(g, _)| *g == group)
            .map_or(0.0, |(_, v)| *v)
    }
}

/// Shortfall of `value >= bound`.
fn below(value: f64, bound: f64) -> f64 {
    (bound - value).max(0.0)
}

/// Infimum over `ω >= 0` of `|a0 - a2 ω² + jω(a1 - ω²)|`.
///
/// With `x = ω²` the squared magnitude is the cubic
/// `x³ + (a2² - 2a1)x² + (a1² - 2a0a2)x + a0²`, so the infimum is attained at
/// `x = 0` or at a positive root of its derivative.
pub fn min_denominator_magnitude(a2: f64, a1: f64, a0: f64) -> f64 {
    let sq = |x: f64| {
        let re = a0 - a2 * x;
        let im = a1 - x;
        re * re + x * im * im
    };
    let c2 = a2 * a2 - 2.0 * a1;
    let c1 = a1 * a1 - 2.0 * a0 * a2;
    // 3x² + 2 c2 x + c1 = 0
    let (a, b, c) = (3.0, 2.0 * c2, c1);
    let disc = b * b - 4.0 * a * c;
    let mut best = sq(0.0);
    if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let roots = if q == 0.0 { [0.0, 0.0] } else { [q / a, c / q] };
        for x in roots {
            if x > 0.0 && x.is_finite() {
                best = best.min(sq(x));
            }
        }
    }
    best.max(0.0).sqrt()
}

/// Checks every constraint with strict inequalities tightened by `eps`.
pub fn feasibility(p: &ModelParameters, eps: f64) -> FeasibilityReport {
    let sum = p.a0 + p.a0_theta;
    let product = p.a2 * p.a1;
    let bound = (1.0 - eps) * min_denominator_magnitude(p.a2, p.a1, p.a0);

    let groups = [
        below(p.tau0, eps) + below(p.tau, eps) + below(p.theta, eps),
        below(p.a2, eps) + below(p.a1, eps) + below(sum, eps),
        below(product - p.a0, eps),
        below(product - sum, eps),
        (p.a0_theta.abs() - bound).max(0.0),
        below(p.b0.abs() - p.b0_tau.abs(), eps),
        below(p.a0.abs(), eps) + below(p.a0_theta.abs(), eps) + below(p.b0_tau.abs(), eps),
    ];

    // NaN parameters must never look feasible
    let violations: Vec<_> = ConstraintGroup::ALL
        .into_iter()
        .zip(groups)
        .map(|(g, v)| (g, if v.is_nan() { f64::INFINITY } else { v }))
        .collect();
    let feasible = violations.iter().all(|(_, v)| *v == 0.0);
    FeasibilityReport { feasible, violations }
}
