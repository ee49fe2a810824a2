//! Overlapping castes: reproduction mostly inside a caste, occasionally across.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::engine::{
    chance, check_probability, run, tournament_among, vary, Bound, CasteTag, Context, EngineConfig, EngineRng, Hooks,
    Individual, Objective, RunTrace,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentMode {
    #[default]
    Random,
    /// Best block of individuals to caste 1, next block to caste 2, ...
    Elitist,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CasteConfig {
    pub number_of_castes: usize,
    pub chance_for_non_caste_parents: f64,
    pub assignment_mode: AssignmentMode,
}

impl Default for CasteConfig {
    fn default() -> Self {
        Self { number_of_castes: 3, chance_for_non_caste_parents: 0.05, assignment_mode: AssignmentMode::Random }
    }
}

impl CasteConfig {
    pub fn validate(&self, engine: &EngineConfig) -> Result<()> {
        check_castes(self.number_of_castes, engine.population_size)?;
        check_probability("chance_for_non_caste_parents", self.chance_for_non_caste_parents)?;
        if engine.offspring_size < self.number_of_castes {
            return Err(Error::InvalidConfig(format!(
                "offspring_size ({}) is smaller than number_of_castes ({})",
                engine.offspring_size, self.number_of_castes
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_castes(castes: usize, population: usize) -> Result<()> {
    if castes == 0 || castes > population {
        return Err(Error::CasteCount { population, castes });
    }
    Ok(())
}

/// Caste sizes for `population` members: equal up to one, the extra members
/// going to the lowest-numbered castes.
pub fn caste_sizes(population: usize, castes: usize) -> Vec<usize> {
    (0..castes)
        .map(|c| population / castes + usize::from(c < population % castes))
        .collect()
}

/// Caste label of every rank position `0..population`.
pub(crate) fn block_labels(population: usize, castes: usize) -> Vec<usize> {
    caste_sizes(population, castes)
        .into_iter()
        .enumerate()
        .flat_map(|(c, n)| std::iter::repeat_n(c + 1, n))
        .collect()
}

/// Tags every individual with one of `number_of_castes` castes whose sizes
/// differ by at most one.
pub fn assign_castes(
    population: &mut [Individual],
    mode: AssignmentMode,
    number_of_castes: usize,
    rng: &mut EngineRng,
) -> Result<()> {
    check_castes(number_of_castes, population.len())?;
    let mut labels = block_labels(population.len(), number_of_castes);
    match mode {
        AssignmentMode::Random => {
            if number_of_castes > 1 {
                labels.shuffle(rng);
            }
            for (ind, c) in population.iter_mut().zip(labels) {
                ind.caste = Some(CasteTag(c));
            }
        }
        AssignmentMode::Elitist => assign_elitist(population, labels)?,
    }
    Ok(())
}

pub(crate) fn assign_elitist(population: &mut [Individual], labels: Vec<usize>) -> Result<()> {
    let order = ranking(population)?;
    for (i, c) in order.into_iter().zip(labels) {
        population[i].caste = Some(CasteTag(c));
    }
    Ok(())
}

/// Positions sorted by ascending cost, ties in original order.
pub(crate) fn ranking(population: &[Individual]) -> Result<Vec<usize>> {
    let costs = population
        .iter()
        .enumerate()
        .map(|(i, ind)| ind.fitness().ok_or(Error::Unevaluated { index: i }))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]));
    Ok(order)
}

pub(crate) fn members(population: &[Individual], caste: CasteTag) -> (Vec<usize>, Vec<usize>) {
    (0..population.len()).partition(|&i| population[i].caste == Some(caste))
}

/// First parent from a tournament inside `caste`; the second one too, except
/// that with probability `chance_for_non_caste_parents` its tournament runs
/// over all other castes.
pub fn select_parents_cross_caste<'a>(
    population: &'a [Individual],
    caste: CasteTag,
    chance_for_non_caste_parents: f64,
    rng: &mut EngineRng,
) -> Result<(&'a Individual, &'a Individual)> {
    let (inside, outside) = members(population, caste);
    if inside.is_empty() {
        return Err(Error::EmptyCaste(caste.0));
    }
    select_from_pools(population, &inside, &outside, chance_for_non_caste_parents, rng)
}

fn select_from_pools<'a>(
    population: &'a [Individual],
    inside: &[usize],
    outside: &[usize],
    cross: f64,
    rng: &mut EngineRng,
) -> Result<(&'a Individual, &'a Individual)> {
    let p1 = tournament_among(population, inside, rng)?;
    // with a single caste there is nobody outside and no draw is made
    let pool = if !outside.is_empty() && chance(rng, cross) { outside } else { inside };
    let p2 = tournament_among(population, pool, rng)?;
    Ok((p1, p2))
}

/// Children of same-caste parents inherit it; otherwise a fair coin decides.
pub fn child_caste(parent1: CasteTag, parent2: CasteTag, rng: &mut EngineRng) -> CasteTag {
    if parent1 == parent2 || chance(rng, 0.5) {
        parent1
    } else {
        parent2
    }
}

/// Splits `count` children over castes, remainder going to caste 1.
pub(crate) fn quotas(count: usize, castes: usize) -> Vec<usize> {
    let mut q = vec![count / castes; castes];
    q[0] += count % castes;
    q
}

struct CasteHooks<'a> {
    config: &'a CasteConfig,
}

impl Hooks for CasteHooks<'_> {
    fn on_init(&mut self, ctx: &mut Context<'_, '_>, population: &mut [Individual]) -> Result<()> {
        assign_castes(population, self.config.assignment_mode, self.config.number_of_castes, ctx.rng)
    }

    fn breed(&mut self, ctx: &mut Context<'_, '_>, population: &[Individual], count: usize) -> Result<Vec<Individual>> {
        // Replacement is global, so a caste can die out; its share of the
        // offspring goes to the surviving castes.
        let pools: Vec<_> = (1..=self.config.number_of_castes)
            .map(|c| (CasteTag(c), members(population, CasteTag(c))))
            .filter(|(_, (inside, _))| !inside.is_empty())
            .collect();
        if pools.is_empty() {
            return Err(Error::EmptyCaste(1));
        }
        let mut children = Vec::with_capacity(count);
        for ((caste, (inside, outside)), quota) in pools.iter().zip(quotas(count, pools.len())) {
            let caste = *caste;
            let mut produced = 0;
            while produced < quota {
                let (p1, p2) = select_from_pools(
                    population,
                    inside,
                    outside,
                    self.config.chance_for_non_caste_parents,
                    ctx.rng,
                )?;
                let (g1, g2) = vary(ctx, p1.genotype(), p2.genotype())?;
                let (t1, t2) = (p1.caste.unwrap_or(caste), p2.caste.unwrap_or(caste));
                for g in [g1, g2] {
                    if produced < quota {
                        let tag = child_caste(t1, t2, ctx.rng);
                        children.push(Individual::with_caste(g, Some(tag)));
                        produced += 1;
                    }
                }
            }
        }
        Ok(children)
    }
}

/// Baseline loop with overlapping castes; castes are assigned once after
/// initialisation and inherited afterwards.
pub fn caste_run(
    objective: &dyn Objective,
    bounds: &[Bound],
    engine: &EngineConfig,
    config: &CasteConfig,
) -> Result<RunTrace> {
    engine.validate()?;
    config.validate(engine)?;
    run(objective, bounds, engine, &mut CasteHooks { config })
}
