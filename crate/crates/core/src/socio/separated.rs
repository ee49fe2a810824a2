//! Separated castes: every caste is its own sub-population, linked only by a
//! learning operator that copies genes from individuals of higher castes.
//! Castes are re-ranked by fitness at a fixed evaluation interval.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::caste::{assign_elitist, block_labels, caste_sizes, check_castes, members, quotas};
use crate::engine::{
    chance, check_probability, replace, run, tournament_among, vary, Bound, CasteTag, Context, EngineConfig,
    EngineRng, Hooks, Individual, Objective, RunTrace,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeparatedConfig {
    pub number_of_castes: usize,
    /// Evaluations between two caste re-rankings.
    pub assign_castes_interval: usize,
    pub learn_from_better_caste_probability: f64,
    /// Per-gene copy probability once learning fires.
    pub learn_from_variable: f64,
}

impl Default for SeparatedConfig {
    fn default() -> Self {
        Self {
            number_of_castes: 5,
            assign_castes_interval: 3000,
            learn_from_better_caste_probability: 0.1,
            learn_from_variable: 0.1,
        }
    }
}

impl SeparatedConfig {
    pub fn validate(&self, engine: &EngineConfig) -> Result<()> {
        check_castes(self.number_of_castes, engine.population_size)?;
        if engine.population_size / self.number_of_castes < 2 {
            return Err(Error::InvalidConfig(format!(
                "{} castes leave fewer than 2 individuals per caste",
                self.number_of_castes
            )));
        }
        if engine.offspring_size < self.number_of_castes {
            return Err(Error::InvalidConfig(format!(
                "offspring_size ({}) is smaller than number_of_castes ({})",
                engine.offspring_size, self.number_of_castes
            )));
        }
        if self.assign_castes_interval == 0 {
            return Err(Error::InvalidConfig("assign_castes_interval must be at least 1".into()));
        }
        check_probability("learn_from_better_caste_probability", self.learn_from_better_caste_probability)?;
        check_probability("learn_from_variable", self.learn_from_variable)
    }
}

/// With probability `learn_from_better_caste_probability`, copies genes from a
/// teacher in a strictly higher caste: a caste is drawn uniformly among the
/// higher ones, then a member of it uniformly, and each gene is copied with
/// probability `learn_from_variable`. Members of the top caste never change.
pub fn learning_operator(
    individual: &Individual,
    population: &[Individual],
    config: &SeparatedConfig,
    rng: &mut EngineRng,
) -> Individual {
    let mut out = individual.clone();
    let Some(CasteTag(own)) = individual.caste else { return out };
    let higher: Vec<usize> = (1..own)
        .filter(|&c| population.iter().any(|p| p.caste == Some(CasteTag(c))))
        .collect();
    if higher.is_empty() || !chance(rng, config.learn_from_better_caste_probability) {
        return out;
    }
    let caste = CasteTag(higher[rng.gen_range(0..higher.len())]);
    let (pool, _) = members(population, caste);
    let teacher = &population[pool[rng.gen_range(0..pool.len())]];
    for (i, &g) in teacher.genes().iter().enumerate() {
        if chance(rng, config.learn_from_variable) && out.genes()[i] != g {
            out.set_gene(i, g);
        }
    }
    out
}

/// Re-ranks castes by fitness: sorted blocks, best block to caste 1.
pub fn reassign_caste_order(population: &mut [Individual], number_of_castes: usize) -> Result<()> {
    check_castes(number_of_castes, population.len())?;
    assign_elitist(population, block_labels(population.len(), number_of_castes))
}

struct SeparatedHooks<'a> {
    config: &'a SeparatedConfig,
    next_reassignment: usize,
}

impl Hooks for SeparatedHooks<'_> {
    fn on_init(&mut self, _ctx: &mut Context<'_, '_>, population: &mut [Individual]) -> Result<()> {
        reassign_caste_order(population, self.config.number_of_castes)
    }

    fn breed(&mut self, ctx: &mut Context<'_, '_>, population: &[Individual], count: usize) -> Result<Vec<Individual>> {
        let mut children = Vec::with_capacity(count);
        for (c, quota) in quotas(count, self.config.number_of_castes).into_iter().enumerate() {
            let caste = CasteTag(c + 1);
            let (pool, _) = members(population, caste);
            if pool.is_empty() {
                return Err(Error::EmptyCaste(caste.0));
            }
            let mut produced = 0;
            while produced < quota {
                let p1 = tournament_among(population, &pool, ctx.rng)?;
                let p2 = tournament_among(population, &pool, ctx.rng)?;
                let (g1, g2) = vary(ctx, p1.genotype(), p2.genotype())?;
                for g in [g1, g2] {
                    if produced < quota {
                        children.push(Individual::with_caste(g, Some(caste)));
                        produced += 1;
                    }
                }
            }
        }
        Ok(children)
    }

    fn post_variation(
        &mut self,
        ctx: &mut Context<'_, '_>,
        population: &[Individual],
        children: &mut [Individual],
    ) -> Result<()> {
        for child in children.iter_mut() {
            *child = learning_operator(child, population, self.config, ctx.rng);
        }
        Ok(())
    }

    /// (μ+λ) truncation inside each caste, keeping caste sizes fixed.
    fn replace(
        &mut self,
        _ctx: &mut Context<'_, '_>,
        population: Vec<Individual>,
        children: Vec<Individual>,
    ) -> Result<Vec<Individual>> {
        let sizes = caste_sizes(population.len(), self.config.number_of_castes);
        let mut parents: Vec<Vec<Individual>> = vec![Vec::new(); sizes.len()];
        let mut offspring: Vec<Vec<Individual>> = vec![Vec::new(); sizes.len()];
        for (bucket, group) in [(&mut parents, population), (&mut offspring, children)] {
            for ind in group {
                let c = ind.caste.map_or(0, |t| t.0);
                if c == 0 || c > sizes.len() {
                    return Err(Error::InvalidConfig(format!("individual without a valid caste ({c})")));
                }
                bucket[c - 1].push(ind);
            }
        }
        let mut next = Vec::with_capacity(sizes.iter().sum());
        for ((p, o), size) in parents.into_iter().zip(offspring).zip(sizes) {
            next.extend(replace(p, o, size)?);
        }
        Ok(next)
    }

    fn post_replacement(&mut self, ctx: &mut Context<'_, '_>, population: &mut Vec<Individual>) -> Result<()> {
        let used = ctx.evaluator.used();
        if used >= self.next_reassignment {
            reassign_caste_order(population, self.config.number_of_castes)?;
            while self.next_reassignment <= used {
                self.next_reassignment += self.config.assign_castes_interval;
            }
        }
        Ok(())
    }
}

/// Each caste evolves as an independent sub-population; children may learn
/// from higher castes before evaluation, and castes are re-ranked every
/// `assign_castes_interval` evaluations.
pub fn separated_run(
    objective: &dyn Objective,
    bounds: &[Bound],
    engine: &EngineConfig,
    config: &SeparatedConfig,
) -> Result<RunTrace> {
    engine.validate()?;
    config.validate(engine)?;
    let mut hooks = SeparatedHooks { config, next_reassignment: config.assign_castes_interval };
    run(objective, bounds, engine, &mut hooks)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::engine::{seeded_rng, Genotype};

    fn population(castes: &[usize], genes: &[f64], len: usize) -> Vec<Individual> {
        let bounds: Arc<[Bound]> = vec![Bound::new(-100.0, 100.0); len].into();
        castes
            .iter()
            .zip(genes)
            .enumerate()
            .map(|(i, (&c, &g))| {
                let mut ind = Individual::with_caste(Genotype::new(vec![g; len], bounds.clone()).unwrap(), Some(CasteTag(c)));
                ind.set_fitness(i as f64);
                ind
            })
            .collect()
    }

    #[test]
    fn top_caste_never_learns() {
        let pop = population(&[1, 1, 2, 2], &[1.0, 2.0, 3.0, 4.0], 8);
        let cfg = SeparatedConfig { learn_from_better_caste_probability: 1.0, learn_from_variable: 1.0, ..Default::default() };
        let mut rng = seeded_rng(0);
        for _ in 0..100 {
            assert_eq!(learning_operator(&pop[0], &pop, &cfg, &mut rng), pop[0]);
        }
    }

    #[test]
    fn full_copy_from_higher_caste() {
        let pop = population(&[1, 1, 2, 2, 3, 3], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 8);
        let cfg = SeparatedConfig { learn_from_better_caste_probability: 1.0, learn_from_variable: 1.0, ..Default::default() };
        let mut rng = seeded_rng(1);
        for _ in 0..200 {
            let out = learning_operator(&pop[5], &pop, &cfg, &mut rng);
            let teacher = out.genes()[0];
            assert!([1.0, 2.0, 3.0, 4.0].contains(&teacher), "learned from equal or lower caste");
            assert!(out.genes().iter().all(|&g| g == teacher));
            assert_eq!(out.fitness(), None);
            assert_eq!(out.caste, Some(CasteTag(3)));
        }
    }

    #[test]
    fn zero_copy_probability_is_a_no_op() {
        let pop = population(&[1, 2], &[1.0, 2.0], 8);
        let cfg = SeparatedConfig { learn_from_better_caste_probability: 1.0, learn_from_variable: 0.0, ..Default::default() };
        let mut rng = seeded_rng(2);
        for _ in 0..100 {
            assert_eq!(learning_operator(&pop[1], &pop, &cfg, &mut rng), pop[1]);
        }
    }

    #[test]
    fn copied_gene_count_is_binomial() {
        let pop = population(&[1, 2], &[1.0, 2.0], 8);
        let cfg = SeparatedConfig { learn_from_better_caste_probability: 1.0, learn_from_variable: 0.1, ..Default::default() };
        let mut rng = seeded_rng(3);
        let firings = 10_000;
        let copied: usize = (0..firings)
            .map(|_| learning_operator(&pop[1], &pop, &cfg, &mut rng).genes().iter().filter(|&&g| g == 1.0).count())
            .sum();
        let mean = copied as f64 / firings as f64;
        assert!((mean - 0.8).abs() < 0.05, "{mean}");
    }

    #[test]
    fn reassignment_sorts_blocks() {
        let mut pop = population(&[1, 1, 2, 2], &[0.0; 4], 1);
        reassign_caste_order(&mut pop, 2).unwrap();
        assert_eq!(pop.iter().map(|i| i.caste.unwrap().0).collect::<Vec<_>>(), vec![1, 1, 2, 2]);
        pop.reverse();
        reassign_caste_order(&mut pop, 2).unwrap();
        assert_eq!(pop.iter().map(|i| i.caste.unwrap().0).collect::<Vec<_>>(), vec![2, 2, 1, 1]);
    }

    #[test]
    fn replacement_stays_inside_castes() {
        let pop = population(&[1, 1, 2, 2], &[1.0, 2.0, 3.0, 4.0], 1);
        // a caste-2 child better than everyone must not displace caste 1
        let mut children = population(&[2, 1], &[9.0, 8.0], 1);
        children[0].set_fitness(-1.0);
        children[1].set_fitness(100.0);
        let objective = |x: &[f64]| x[0];
        let engine = EngineConfig { population_size: 4, offspring_size: 2, ..Default::default() };
        let bounds: std::sync::Arc<[Bound]> = vec![Bound::new(-100.0, 100.0)].into();
        let mut rng = seeded_rng(0);
        let mut evaluator = crate::engine::Evaluator::new(&objective, 10);
        let mut ctx = Context { config: &engine, bounds: &bounds, rng: &mut rng, evaluator: &mut evaluator };
        let cfg = SeparatedConfig { number_of_castes: 2, ..Default::default() };
        let mut hooks = SeparatedHooks { config: &cfg, next_reassignment: usize::MAX };
        let next = hooks.replace(&mut ctx, pop, children).unwrap();
        let summary: Vec<(usize, f64)> = next.iter().map(|i| (i.caste.unwrap().0, i.genes()[0])).collect();
        assert_eq!(summary, vec![(1, 1.0), (1, 2.0), (2, 9.0), (2, 3.0)]);
    }

    #[test]
    fn config_checks() {
        let engine = EngineConfig::default();
        assert!(SeparatedConfig::default().validate(&engine).is_ok());
        assert!(SeparatedConfig { number_of_castes: 60, ..Default::default() }.validate(&engine).is_err());
        assert!(SeparatedConfig { assign_castes_interval: 0, ..Default::default() }.validate(&engine).is_err());
        assert!(SeparatedConfig { learn_from_variable: 2.0, ..Default::default() }.validate(&engine).is_err());
    }
}
