//! Real-coded generational evolutionary algorithm.
//!
//! The baseline loop is: random initial population, binary tournament
//! selection, SBX crossover, polynomial mutation, (μ+λ) replacement. Every
//! objective call goes through an [`Evaluator`] which enforces the evaluation
//! budget and records the best-so-far history. Variants customise the loop
//! through [`Hooks`].

mod operators;

pub use operators::{binary_tournament, polynomial_mutation, replace, sbx_crossover};
pub(crate) use operators::tournament_among;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// PRNG owned by a single run.
pub type EngineRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> EngineRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Bernoulli draw that consumes no randomness when the outcome is certain.
pub fn chance(rng: &mut EngineRng, p: f64) -> bool {
    if p <= 0.0 {
        false
    } else if p >= 1.0 {
        true
    } else {
        rng.gen::<f64>() < p
    }
}

/// Something to minimise.
pub trait Objective {
    fn evaluate(&self, genes: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> Objective for F {
    fn evaluate(&self, genes: &[f64]) -> f64 {
        self(genes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lower: f64,
    pub upper: f64,
}

impl Bound {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lower..=self.upper).contains(&x)
    }
}

pub fn validate_bounds(bounds: &[Bound]) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::InvalidConfig("no genes to optimise".into()));
    }
    for (index, b) in bounds.iter().enumerate() {
        if !(b.lower.is_finite() && b.upper.is_finite() && b.lower <= b.upper) {
            return Err(Error::InvalidBounds { index, lower: b.lower, upper: b.upper });
        }
    }
    Ok(())
}

/// A bounded real vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Genotype {
    genes: Vec<f64>,
    bounds: Arc<[Bound]>,
}

impl Genotype {
    /// Genes outside their bounds are clamped.
    pub fn new(genes: Vec<f64>, bounds: Arc<[Bound]>) -> Result<Self> {
        if genes.len() != bounds.len() {
            return Err(Error::LengthMismatch { expected: bounds.len(), actual: genes.len() });
        }
        let genes = genes.iter().zip(bounds.iter()).map(|(x, b)| b.clamp(*x)).collect();
        Ok(Self { genes, bounds })
    }

    pub fn genes(&self) -> &[f64] {
        &self.genes
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn set(&mut self, index: usize, value: f64) {
        self.genes[index] = self.bounds[index].clamp(value);
    }

    pub fn in_bounds(&self) -> bool {
        self.genes.iter().zip(self.bounds.iter()).all(|(x, b)| b.contains(*x))
    }
}

/// 1-based caste number; caste 1 is the highest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CasteTag(pub usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    genotype: Genotype,
    fitness: Option<f64>,
    pub caste: Option<CasteTag>,
}

impl Individual {
    pub fn new(genotype: Genotype) -> Self {
        Self { genotype, fitness: None, caste: None }
    }

    pub fn with_caste(genotype: Genotype, caste: Option<CasteTag>) -> Self {
        Self { genotype, fitness: None, caste }
    }

    pub fn genotype(&self) -> &Genotype {
        &self.genotype
    }

    pub fn genes(&self) -> &[f64] {
        self.genotype.genes()
    }

    /// Cost under the active objective, lower is better.
    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn set_fitness(&mut self, cost: f64) {
        self.fitness = Some(cost);
    }

    /// Replaces the genotype and drops the cached fitness.
    pub fn set_genotype(&mut self, genotype: Genotype) {
        self.genotype = genotype;
        self.fitness = None;
    }

    pub fn set_gene(&mut self, index: usize, value: f64) {
        self.genotype.set(index, value);
        self.fitness = None;
    }

    pub(crate) fn cost_or_err(&self, index: usize) -> Result<f64> {
        self.fitness.ok_or(Error::Unevaluated { index })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineConfig {
    pub population_size: usize,
    pub offspring_size: usize,
    pub crossover_probability: f64,
    pub crossover_distribution_index: f64,
    pub mutation_probability: f64,
    pub mutation_distribution_index: f64,
    pub evaluation_budget: usize,
    #[serde(skip)]
    pub rng_seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            offspring_size: 20,
            crossover_probability: 0.9,
            crossover_distribution_index: 20.0,
            mutation_probability: 1.0 / 8.0,
            mutation_distribution_index: 20.0,
            evaluation_budget: 15_000,
            rng_seed: 0,
        }
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig("population_size must be at least 2".into()));
        }
        if self.offspring_size < 2 || !self.offspring_size.is_multiple_of(2) {
            return Err(Error::InvalidConfig("offspring_size must be even and at least 2".into()));
        }
        check_probability("crossover_probability", self.crossover_probability)?;
        check_probability("mutation_probability", self.mutation_probability)?;
        for (name, eta) in [
            ("crossover_distribution_index", self.crossover_distribution_index),
            ("mutation_distribution_index", self.mutation_distribution_index),
        ] {
            if !(eta >= 0.0 && eta.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be non-negative")));
            }
        }
        if self.evaluation_budget < self.population_size {
            return Err(Error::InvalidConfig(format!(
                "evaluation_budget ({}) is smaller than population_size ({})",
                self.evaluation_budget, self.population_size
            )));
        }
        Ok(())
    }
}

/// History of one seeded run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    /// `(evaluation index, best cost so far)` after every evaluation, 1-based.
    pub best_history: Vec<(usize, f64)>,
    pub best_individual: Individual,
    pub evaluations_used: usize,
    pub seed: u64,
}

impl RunTrace {
    pub fn final_cost(&self) -> f64 {
        self.best_history.last().map_or(f64::INFINITY, |&(_, c)| c)
    }
}

/// Budgeted objective wrapper.
pub struct Evaluator<'o> {
    objective: &'o (dyn Objective + 'o),
    budget: usize,
    history: Vec<(usize, f64)>,
    best: Option<Individual>,
}

impl<'o> Evaluator<'o> {
    pub fn new(objective: &'o (dyn Objective + 'o), budget: usize) -> Self {
        Self { objective, budget, history: Vec::with_capacity(budget), best: None }
    }

    pub fn used(&self) -> usize {
        self.history.len()
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.used()
    }

    pub fn best(&self) -> Option<&Individual> {
        self.best.as_ref()
    }

    /// Evaluates `ind` and returns `false` when the budget is already spent.
    pub fn evaluate(&mut self, ind: &mut Individual) -> bool {
        if self.remaining() == 0 {
            return false;
        }
        let mut cost = self.objective.evaluate(ind.genes());
        if cost.is_nan() {
            cost = f64::INFINITY;
        }
        ind.set_fitness(cost);
        let improved = match &self.best {
            Some(b) => cost < b.fitness.unwrap_or(f64::INFINITY),
            None => true,
        };
        if improved {
            self.best = Some(ind.clone());
        }
        let best = self.best.as_ref().and_then(|b| b.fitness).unwrap_or(cost);
        self.history.push((self.used() + 1, best));
        true
    }

    fn into_trace(self, seed: u64) -> Result<RunTrace> {
        let best_individual = self
            .best
            .ok_or_else(|| Error::InvalidConfig("run finished without evaluations".into()))?;
        Ok(RunTrace { evaluations_used: self.history.len(), best_history: self.history, best_individual, seed })
    }
}

/// Mutable state handed to [`Hooks`].
pub struct Context<'c, 'o> {
    pub config: &'c EngineConfig,
    pub bounds: &'c Arc<[Bound]>,
    pub rng: &'c mut EngineRng,
    pub evaluator: &'c mut Evaluator<'o>,
}

/// Extension points of the generational loop.
///
/// Randomness is drawn in a fixed order per generation: selection, crossover
/// and mutation inside [`Hooks::breed`], then the remaining hooks.
pub trait Hooks {
    fn on_init(&mut self, _ctx: &mut Context<'_, '_>, _population: &mut [Individual]) -> Result<()> {
        Ok(())
    }

    /// Produces `count` unevaluated children.
    fn breed(&mut self, ctx: &mut Context<'_, '_>, population: &[Individual], count: usize) -> Result<Vec<Individual>> {
        let mut children = Vec::with_capacity(count);
        while children.len() < count {
            let p1 = binary_tournament(population, ctx.rng)?;
            let p2 = binary_tournament(population, ctx.rng)?;
            let (c1, c2) = vary(ctx, p1.genotype(), p2.genotype())?;
            children.push(Individual::new(c1));
            if children.len() < count {
                children.push(Individual::new(c2));
            }
        }
        Ok(children)
    }

    fn post_variation(
        &mut self,
        _ctx: &mut Context<'_, '_>,
        _population: &[Individual],
        _children: &mut [Individual],
    ) -> Result<()> {
        Ok(())
    }

    fn replace(
        &mut self,
        ctx: &mut Context<'_, '_>,
        population: Vec<Individual>,
        children: Vec<Individual>,
    ) -> Result<Vec<Individual>> {
        replace(population, children, ctx.config.population_size)
    }

    fn post_replacement(&mut self, _ctx: &mut Context<'_, '_>, _population: &mut Vec<Individual>) -> Result<()> {
        Ok(())
    }
}

/// The unmodified baseline.
#[derive(Clone, Copy, Debug, Default)]
pub struct Baseline;

impl Hooks for Baseline {}

/// SBX followed by polynomial mutation of both children.
pub fn vary(ctx: &mut Context<'_, '_>, p1: &Genotype, p2: &Genotype) -> Result<(Genotype, Genotype)> {
    let cfg = ctx.config;
    let (c1, c2) = sbx_crossover(p1, p2, cfg.crossover_probability, cfg.crossover_distribution_index, ctx.rng)?;
    let c1 = polynomial_mutation(c1, cfg.mutation_probability, cfg.mutation_distribution_index, ctx.rng);
    let c2 = polynomial_mutation(c2, cfg.mutation_probability, cfg.mutation_distribution_index, ctx.rng);
    Ok((c1, c2))
}

/// `population_size` uniform random individuals, each evaluated.
pub fn init_population(
    config: &EngineConfig,
    bounds: &Arc<[Bound]>,
    rng: &mut EngineRng,
    evaluator: &mut Evaluator<'_>,
) -> Result<Vec<Individual>> {
    validate_bounds(bounds)?;
    let mut population = Vec::with_capacity(config.population_size);
    for _ in 0..config.population_size {
        let genes = bounds
            .iter()
            .map(|b| b.lower + rng.gen::<f64>() * b.width())
            .collect::<Vec<_>>();
        let mut ind = Individual::new(Genotype::new(genes, bounds.clone())?);
        if !evaluator.evaluate(&mut ind) {
            return Err(Error::InvalidConfig("evaluation budget smaller than the population".into()));
        }
        population.push(ind);
    }
    Ok(population)
}

/// Runs the generational loop until the evaluation budget is spent.
pub fn run<H: Hooks + ?Sized>(
    objective: &dyn Objective,
    bounds: &[Bound],
    config: &EngineConfig,
    hooks: &mut H,
) -> Result<RunTrace> {
    config.validate()?;
    validate_bounds(bounds)?;
    let bounds: Arc<[Bound]> = bounds.into();
    let mut rng = seeded_rng(config.rng_seed);
    let mut evaluator = Evaluator::new(objective, config.evaluation_budget);

    let mut population = init_population(config, &bounds, &mut rng, &mut evaluator)?;
    let mut ctx = Context { config, bounds: &bounds, rng: &mut rng, evaluator: &mut evaluator };
    hooks.on_init(&mut ctx, &mut population)?;

    while ctx.evaluator.remaining() > 0 {
        let count = config.offspring_size.min(ctx.evaluator.remaining());
        let mut children = hooks.breed(&mut ctx, &population, count)?;
        hooks.post_variation(&mut ctx, &population, &mut children)?;
        children.truncate(ctx.evaluator.remaining());
        for child in &mut children {
            ctx.evaluator.evaluate(child);
        }
        population = hooks.replace(&mut ctx, population, children)?;
        hooks.post_replacement(&mut ctx, &mut population)?;
    }

    evaluator.into_trace(config.rng_seed)
}

/// Baseline run with no extensions.
pub fn run_baseline(objective: &dyn Objective, bounds: &[Bound], config: &EngineConfig) -> Result<RunTrace> {
    run(objective, bounds, config, &mut Baseline)
}
