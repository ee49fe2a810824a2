//! Selection, variation and replacement operators.

use rand::Rng;

use super::{chance, EngineRng, Genotype, Individual};
use crate::error::{Error, Result};

/// Index of the winner of a binary tournament over `len` candidates.
///
/// Two distinct candidates are drawn uniformly; the lower cost wins and ties
/// go to the first drawn.
pub(crate) fn tournament_index(
    len: usize,
    cost: impl Fn(usize) -> Result<f64>,
    rng: &mut EngineRng,
) -> Result<usize> {
    match len {
        0 => Err(Error::InvalidConfig("tournament over an empty pool".into())),
        1 => cost(0).map(|_| 0),
        _ => {
            let first = rng.gen_range(0..len);
            let mut second = rng.gen_range(0..len - 1);
            if second >= first {
                second += 1;
            }
            let (c1, c2) = (cost(first)?, cost(second)?);
            Ok(if c2 < c1 { second } else { first })
        }
    }
}

pub fn binary_tournament<'a>(population: &'a [Individual], rng: &mut EngineRng) -> Result<&'a Individual> {
    let i = tournament_index(population.len(), |i| population[i].cost_or_err(i), rng)?;
    Ok(&population[i])
}

/// Tournament restricted to the individuals at `pool` positions.
pub(crate) fn tournament_among<'a>(
    population: &'a [Individual],
    pool: &[usize],
    rng: &mut EngineRng,
) -> Result<&'a Individual> {
    let i = tournament_index(pool.len(), |i| population[pool[i]].cost_or_err(pool[i]), rng)?;
    Ok(&population[pool[i]])
}

/// Simulated binary crossover.
///
/// With probability `probability` every gene pair is recombined with the
/// spread factor `β(u)` of index `eta`; children are clipped to the bounds.
pub fn sbx_crossover(
    p1: &Genotype,
    p2: &Genotype,
    probability: f64,
    eta: f64,
    rng: &mut EngineRng,
) -> Result<(Genotype, Genotype)> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch { expected: p1.len(), actual: p2.len() });
    }
    let mut c1 = p1.clone();
    let mut c2 = p2.clone();
    if !chance(rng, probability) {
        return Ok((c1, c2));
    }
    let exponent = 1.0 / (eta + 1.0);
    for i in 0..p1.len() {
        let (x1, x2) = (p1.genes[i], p2.genes[i]);
        let u: f64 = rng.gen();
        if x1 == x2 {
            continue;
        }
        let beta = if u <= 0.5 { (2.0 * u).powf(exponent) } else { (1.0 / (2.0 * (1.0 - u))).powf(exponent) };
        let b = p1.bounds[i];
        c1.genes[i] = b.clamp(0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2));
        c2.genes[i] = b.clamp(0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2));
    }
    Ok((c1, c2))
}

/// Bounded polynomial mutation; each gene mutates with `probability`.
pub fn polynomial_mutation(mut g: Genotype, probability: f64, eta: f64, rng: &mut EngineRng) -> Genotype {
    let exponent = eta + 1.0;
    let mut_pow = 1.0 / exponent;
    for i in 0..g.len() {
        if !chance(rng, probability) {
            continue;
        }
        let b = g.bounds[i];
        let y = g.genes[i];
        if b.width() == 0.0 {
            g.genes[i] = b.lower;
            continue;
        }
        let delta1 = (y - b.lower) / b.width();
        let delta2 = (b.upper - y) / b.width();
        let rnd: f64 = rng.gen();
        let delta_q = if rnd <= 0.5 {
            let xy = 1.0 - delta1;
            let val = 2.0 * rnd + (1.0 - 2.0 * rnd) * xy.powf(exponent);
            val.powf(mut_pow) - 1.0
        } else {
            let xy = 1.0 - delta2;
            let val = 2.0 * (1.0 - rnd) + 2.0 * (rnd - 0.5) * xy.powf(exponent);
            1.0 - val.powf(mut_pow)
        };
        g.genes[i] = b.clamp(y + delta_q * b.width());
    }
    g
}

/// (μ+λ) truncation: the `size` lowest-cost members of `population ∪ offspring`,
/// ties kept in their original order.
pub fn replace(population: Vec<Individual>, offspring: Vec<Individual>, size: usize) -> Result<Vec<Individual>> {
    let mut merged = population;
    merged.extend(offspring);
    let mut keyed = merged
        .into_iter()
        .enumerate()
        .map(|(i, ind)| ind.cost_or_err(i).map(|c| (c, ind)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.truncate(size);
    Ok(keyed.into_iter().map(|(_, ind)| ind).collect())
}
