//! Gravity mutation: members are pulled toward a weighted centre of the best
//! individuals and pushed away from a weighted centre of the worst ones.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::caste::ranking;
use crate::engine::{
    chance, check_probability, run, Bound, Context, EngineConfig, Genotype, Hooks, Individual, Objective, RunTrace,
};
use crate::error::{Error, Result};

/// Guards `1 / cost` for zero-cost attraction weights.
const WEIGHT_EPS: f64 = 1e-12;

/// How the `count` selected individuals are weighted, by rank (1 = most
/// extreme).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingVariant {
    #[default]
    Uniform,
    /// `1 / (cost + ε)` for attraction, `cost` for repulsion.
    FitnessProportional,
    /// `count - rank + 1`
    LinearRank,
    /// `2^-rank`
    ExponentialRank,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopsisConfig {
    /// Per-member probability of being mutated each generation.
    pub p: f64,
    pub t_best: f64,
    pub t_worst: f64,
    pub best_individuals_count: usize,
    pub worst_individuals_count: usize,
    pub weighting_variant: WeightingVariant,
}

impl Default for TopsisConfig {
    fn default() -> Self {
        Self {
            p: 0.1,
            t_best: 0.1,
            t_worst: 0.0,
            best_individuals_count: 10,
            worst_individuals_count: 10,
            weighting_variant: WeightingVariant::Uniform,
        }
    }
}

impl TopsisConfig {
    pub fn validate(&self, engine: &EngineConfig) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("t_best", self.t_best)?;
        check_probability("t_worst", self.t_worst)?;
        for (name, n) in [
            ("best_individuals_count", self.best_individuals_count),
            ("worst_individuals_count", self.worst_individuals_count),
        ] {
            if n == 0 || n > engine.population_size {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie in [1, {}], got {n}",
                    engine.population_size
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Best,
    Worst,
}

fn weighted_point(population: &[Individual], count: usize, variant: WeightingVariant, side: Side) -> Result<Genotype> {
    if count == 0 || count > population.len() {
        return Err(Error::InvalidConfig(format!(
            "point needs between 1 and {} individuals, got {count}",
            population.len()
        )));
    }
    let mut order = ranking(population)?;
    if side == Side::Worst {
        // stable descending order: worst first, ties by original position
        order.sort_by(|&a, &b| population[b].fitness().unwrap().total_cmp(&population[a].fitness().unwrap()));
    }
    let chosen = &order[..count];
    let mut weights: Vec<f64> = chosen
        .iter()
        .enumerate()
        .map(|(r, &i)| {
            let rank = (r + 1) as f64;
            let cost = population[i].fitness().unwrap().max(0.0);
            match (variant, side) {
                (WeightingVariant::Uniform, _) => 1.0,
                (WeightingVariant::FitnessProportional, Side::Best) => 1.0 / (cost + WEIGHT_EPS),
                (WeightingVariant::FitnessProportional, Side::Worst) => cost,
                (WeightingVariant::LinearRank, _) => count as f64 - rank + 1.0,
                (WeightingVariant::ExponentialRank, _) => 2f64.powf(-rank),
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        weights.iter_mut().for_each(|w| *w = 1.0);
    }
    let total: f64 = weights.iter().sum();

    let first = population[chosen[0]].genotype();
    let mut centre = vec![0.0; first.len()];
    for (&i, w) in chosen.iter().zip(&weights) {
        for (c, g) in centre.iter_mut().zip(population[i].genes()) {
            *c += w * g;
        }
    }
    centre.iter_mut().for_each(|c| *c /= total);
    let bounds: Arc<[Bound]> = first.bounds().into();
    Genotype::new(centre, bounds)
}

/// Weighted average genotype of the `count` lowest-cost individuals.
pub fn attraction_point(population: &[Individual], count: usize, variant: WeightingVariant) -> Result<Genotype> {
    weighted_point(population, count, variant, Side::Best)
}

/// Weighted average genotype of the `count` highest-cost individuals.
pub fn repulsion_point(population: &[Individual], count: usize, variant: WeightingVariant) -> Result<Genotype> {
    weighted_point(population, count, variant, Side::Worst)
}

/// `x' = clamp(x + t_best (attract - x) - t_worst (repulse - x))` gene-wise.
pub fn topsis_mutation(individual: &Individual, attract: &Genotype, repulse: &Genotype, config: &TopsisConfig) -> Individual {
    let mut out = individual.clone();
    let genes: Vec<f64> = individual
        .genes()
        .iter()
        .zip(attract.genes().iter().zip(repulse.genes()))
        .map(|(&x, (&a, &r))| x + config.t_best * (a - x) - config.t_worst * (r - x))
        .collect();
    let bounds: Arc<[Bound]> = individual.genotype().bounds().into();
    // lengths agree by construction, so only clamping can happen here
    if let Ok(g) = Genotype::new(genes, bounds) {
        out.set_genotype(g);
    }
    out
}

struct TopsisHooks<'a> {
    config: &'a TopsisConfig,
}

impl Hooks for TopsisHooks<'_> {
    fn post_replacement(&mut self, ctx: &mut Context<'_, '_>, population: &mut Vec<Individual>) -> Result<()> {
        if ctx.evaluator.remaining() == 0 || self.config.p <= 0.0 {
            return Ok(());
        }
        let variant = self.config.weighting_variant;
        let attract = attraction_point(population, self.config.best_individuals_count, variant)?;
        let repulse = repulsion_point(population, self.config.worst_individuals_count, variant)?;
        for member in population.iter_mut() {
            if ctx.evaluator.remaining() == 0 {
                break;
            }
            if chance(ctx.rng, self.config.p) {
                let mut moved = topsis_mutation(member, &attract, &repulse, self.config);
                ctx.evaluator.evaluate(&mut moved);
                *member = moved;
            }
        }
        Ok(())
    }
}

/// Baseline loop followed, each generation, by gravity mutation of roughly
/// `p * population_size` members; mutated members are re-evaluated.
pub fn topsis_run(
    objective: &dyn Objective,
    bounds: &[Bound],
    engine: &EngineConfig,
    config: &TopsisConfig,
) -> Result<RunTrace> {
    engine.validate()?;
    config.validate(engine)?;
    run(objective, bounds, engine, &mut TopsisHooks { config })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn population(genes: &[f64], costs: &[f64]) -> Vec<Individual> {
        let bounds: Arc<[Bound]> = vec![Bound::new(-10.0, 10.0)].into();
        genes
            .iter()
            .zip(costs)
            .map(|(&g, &c)| {
                let mut ind = Individual::new(Genotype::new(vec![g], bounds.clone()).unwrap());
                ind.set_fitness(c);
                ind
            })
            .collect()
    }

    #[test]
    fn single_member_points() {
        let pop = population(&[4.0, 1.0, 7.0], &[2.0, 1.0, 3.0]);
        for v in [WeightingVariant::Uniform, WeightingVariant::FitnessProportional, WeightingVariant::LinearRank, WeightingVariant::ExponentialRank] {
            assert_eq!(attraction_point(&pop, 1, v).unwrap().genes(), [1.0]);
            assert_eq!(repulsion_point(&pop, 1, v).unwrap().genes(), [7.0]);
        }
    }

    #[test]
    fn uniform_midpoint() {
        let pop = population(&[0.0, 1.0], &[1.0, 2.0]);
        assert_eq!(attraction_point(&pop, 2, WeightingVariant::Uniform).unwrap().genes(), [0.5]);
    }

    #[test]
    fn linear_rank_weights() {
        let pop = population(&[6.0, 0.0, 3.0], &[3.0, 1.0, 2.0]);
        let p = attraction_point(&pop, 3, WeightingVariant::LinearRank).unwrap();
        assert!((p.genes()[0] - 2.0).abs() < 1e-15);
        // worst first: 6 (w3), 3 (w2), 0 (w1) -> 24/6
        let r = repulsion_point(&pop, 3, WeightingVariant::LinearRank).unwrap();
        assert!((r.genes()[0] - 4.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_and_fitness_weights() {
        let pop = population(&[0.0, 3.0], &[1.0, 3.0]);
        // weights 1/2, 1/4
        let e = attraction_point(&pop, 2, WeightingVariant::ExponentialRank).unwrap();
        assert!((e.genes()[0] - 1.0).abs() < 1e-15);
        // weights ~1, ~1/3
        let f = attraction_point(&pop, 2, WeightingVariant::FitnessProportional).unwrap();
        assert!((f.genes()[0] - 0.75).abs() < 1e-9);
        // weights 3, 1 with 3 worst first
        let r = repulsion_point(&pop, 2, WeightingVariant::FitnessProportional).unwrap();
        assert!((r.genes()[0] - 2.25).abs() < 1e-15);
    }

    #[test]
    fn count_out_of_range() {
        let pop = population(&[0.0], &[1.0]);
        assert!(attraction_point(&pop, 2, WeightingVariant::Uniform).is_err());
        assert!(repulsion_point(&pop, 0, WeightingVariant::Uniform).is_err());
    }

    #[test]
    fn mutation_arithmetic() {
        let pop = population(&[0.5], &[1.0]);
        let attract = population(&[1.0], &[0.0])[0].genotype().clone();
        let repulse = population(&[0.0], &[0.0])[0].genotype().clone();
        let cfg = TopsisConfig { t_best: 0.1, t_worst: 0.1, ..Default::default() };
        let out = topsis_mutation(&pop[0], &attract, &repulse, &cfg);
        assert!((out.genes()[0] - 0.6).abs() < 1e-15);
        assert_eq!(out.fitness(), None);

        let still = TopsisConfig { t_best: 0.0, t_worst: 0.0, ..Default::default() };
        assert_eq!(topsis_mutation(&pop[0], &attract, &repulse, &still).genes(), pop[0].genes());

        let jump = TopsisConfig { t_best: 1.0, t_worst: 0.0, ..Default::default() };
        assert_eq!(topsis_mutation(&pop[0], &attract, &repulse, &jump).genes(), [1.0]);
    }

    #[test]
    fn mutation_is_clamped() {
        let pop = population(&[9.0], &[1.0]);
        let attract = population(&[10.0], &[0.0])[0].genotype().clone();
        let repulse = population(&[-10.0], &[0.0])[0].genotype().clone();
        let cfg = TopsisConfig { t_best: 0.0, t_worst: 1.0, ..Default::default() };
        assert_eq!(topsis_mutation(&pop[0], &attract, &repulse, &cfg).genes(), [10.0]);
    }

    #[test]
    fn full_pull_collapses_onto_best() {
        let mut pop = population(&[4.0, 1.0, 7.0, -2.0], &[2.0, 1.0, 3.0, 5.0]);
        let cfg = TopsisConfig {
            p: 1.0,
            t_best: 1.0,
            t_worst: 0.0,
            best_individuals_count: 1,
            worst_individuals_count: 1,
            ..Default::default()
        };
        let objective = |x: &[f64]| x[0].abs();
        let engine = EngineConfig::default();
        let bounds: Arc<[Bound]> = vec![Bound::new(-10.0, 10.0)].into();
        let mut rng = crate::engine::seeded_rng(0);
        let mut evaluator = crate::engine::Evaluator::new(&objective, 100);
        let mut ctx = Context { config: &engine, bounds: &bounds, rng: &mut rng, evaluator: &mut evaluator };
        TopsisHooks { config: &cfg }.post_replacement(&mut ctx, &mut pop).unwrap();
        assert!(pop.iter().all(|i| i.genes() == [1.0] && i.fitness() == Some(1.0)));
        assert_eq!(evaluator.used(), 4);
    }

    #[test]
    fn hook_stops_at_budget() {
        let mut pop = population(&[4.0, 1.0, 7.0, -2.0], &[2.0, 1.0, 3.0, 5.0]);
        let cfg = TopsisConfig { p: 1.0, best_individuals_count: 1, worst_individuals_count: 1, ..Default::default() };
        let objective = |x: &[f64]| x[0].abs();
        let engine = EngineConfig::default();
        let bounds: Arc<[Bound]> = vec![Bound::new(-10.0, 10.0)].into();
        let mut rng = crate::engine::seeded_rng(0);
        let mut evaluator = crate::engine::Evaluator::new(&objective, 2);
        let mut ctx = Context { config: &engine, bounds: &bounds, rng: &mut rng, evaluator: &mut evaluator };
        TopsisHooks { config: &cfg }.post_replacement(&mut ctx, &mut pop).unwrap();
        assert_eq!(evaluator.used(), 2);
        assert!(pop.iter().all(|i| i.fitness().is_some()));
    }

    #[test]
    fn config_checks() {
        let engine = EngineConfig::default();
        assert!(TopsisConfig::default().validate(&engine).is_ok());
        assert!(TopsisConfig { best_individuals_count: 0, ..Default::default() }.validate(&engine).is_err());
        assert!(TopsisConfig { worst_individuals_count: 101, ..Default::default() }.validate(&engine).is_err());
        assert!(TopsisConfig { t_best: -0.1, ..Default::default() }.validate(&engine).is_err());
    }
}
