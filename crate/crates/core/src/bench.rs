//! Repeated seeded runs, summary statistics, convergence curves and CSV
//! exports of the comparison experiment.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{Bound, EngineConfig, Objective, RunTrace};
use crate::error::{Error, Result};
use crate::model::{
    bode_points, dataset_bode_points, default_search_bounds, nyquist_points, FreeGenes, IdentificationProblem,
    ModelParameters, ObservationDataset, PlotGrid,
};
use crate::socio::{run_algorithm, Algorithm, VariantConfigs};

pub const DEFAULT_CONVERGENCE_STRIDE: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub engine: EngineConfig,
    pub variants: VariantConfigs,
    pub repetitions: usize,
    /// Run `i` is seeded with `base_seed + i`.
    pub base_seed: u64,
    /// Upper bound on concurrently executing runs.
    pub jobs: usize,
    pub problem: IdentificationProblem,
    pub bounds: Vec<Bound>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let problem = IdentificationProblem::default();
        let bounds = default_search_bounds(problem.penalty.eps);
        Self {
            algorithm: Algorithm::Genetic,
            engine: EngineConfig::default(),
            variants: VariantConfigs::default(),
            repetitions: 10,
            base_seed: 0,
            jobs: 1,
            problem,
            bounds,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        if self.bounds.len() != FreeGenes::NAMES.len() {
            return Err(Error::LengthMismatch { expected: FreeGenes::NAMES.len(), actual: self.bounds.len() });
        }
        crate::engine::validate_bounds(&self.bounds)?;
        self.variants.validate(self.algorithm, &self.engine)
    }
}

/// `repetitions` runs of `algorithm` on an arbitrary objective, in seed order.
#[allow(clippy::too_many_arguments)]
pub fn run_repetitions(
    algorithm: Algorithm,
    objective: &(dyn Objective + Sync),
    bounds: &[Bound],
    engine: &EngineConfig,
    variants: &VariantConfigs,
    repetitions: usize,
    base_seed: u64,
    jobs: usize,
) -> Result<Vec<RunTrace>> {
    let one = |i: usize| {
        let cfg = EngineConfig { rng_seed: base_seed.wrapping_add(i as u64), ..engine.clone() };
        run_algorithm(algorithm, objective, bounds, &cfg, variants)
    };
    #[cfg(feature = "parallel")]
    if jobs > 1 && repetitions > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.min(repetitions))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
        return pool.install(|| (0..repetitions).into_par_iter().map(one).collect());
    }
    let _ = jobs;
    (0..repetitions).map(one).collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunTrace>> {
    config.validate()?;
    run_repetitions(
        config.algorithm,
        &config.problem,
        &config.bounds,
        &config.engine,
        &config.variants,
        config.repetitions,
        config.base_seed,
        config.jobs,
    )
}

/// One row of the comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub algorithm: String,
    pub average: f64,
    pub minimum: f64,
    /// Population standard deviation.
    pub std: f64,
}

/// Statistics of the final best costs.
pub fn summarize(algorithm: &str, traces: &[RunTrace]) -> Result<StatsSummary> {
    if traces.is_empty() {
        return Err(Error::EmptyResults);
    }
    let finals: Vec<f64> = traces.iter().map(RunTrace::final_cost).collect();
    let n = finals.len() as f64;
    let average = finals.iter().sum::<f64>() / n;
    let variance = finals.iter().map(|x| (x - average).powi(2)).sum::<f64>() / n;
    let minimum = finals.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(StatsSummary { algorithm: algorithm.to_owned(), average, minimum, std: variance.sqrt() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceCurve {
    pub evaluations: Vec<usize>,
    pub mean_best: Vec<f64>,
}

/// Mean best-so-far at every `stride`-th evaluation (and at the last one).
pub fn convergence_curve(traces: &[RunTrace], stride: usize) -> Result<ConvergenceCurve> {
    let first = traces.first().ok_or(Error::EmptyResults)?;
    if stride == 0 {
        return Err(Error::InvalidConfig("convergence stride must be at least 1".into()));
    }
    let budget = first.evaluations_used;
    if traces.iter().any(|t| t.evaluations_used != budget || t.best_history.len() != budget) {
        return Err(Error::InvalidConfig("traces do not share an evaluation budget".into()));
    }
    let mut evaluations: Vec<usize> = (stride..=budget).step_by(stride).collect();
    if evaluations.last() != Some(&budget) {
        evaluations.push(budget);
    }
    let n = traces.len() as f64;
    let mean_best = evaluations
        .iter()
        .map(|&e| traces.iter().map(|t| t.best_history[e - 1].1).sum::<f64>() / n)
        .collect();
    Ok(ConvergenceCurve { evaluations, mean_best })
}

/// Traces of one algorithm with their derived summaries.
#[derive(Clone, Debug)]
pub struct AlgorithmResult {
    pub algorithm: Algorithm,
    pub traces: Vec<RunTrace>,
    pub summary: StatsSummary,
    pub curve: ConvergenceCurve,
}

impl AlgorithmResult {
    pub fn new(algorithm: Algorithm, traces: Vec<RunTrace>, stride: usize) -> Result<Self> {
        let summary = summarize(algorithm.as_str(), &traces)?;
        let curve = convergence_curve(&traces, stride)?;
        Ok(Self { algorithm, traces, summary, curve })
    }

    /// Lowest-cost individual over all runs, completed to model parameters.
    pub fn best_parameters(&self, static_gain: f64) -> Result<ModelParameters> {
        let best = self
            .traces
            .iter()
            .min_by(|a, b| a.final_cost().total_cmp(&b.final_cost()))
            .ok_or(Error::EmptyResults)?;
        let genes = FreeGenes::from_slice(best.best_individual.genes())?;
        Ok(crate::model::complete_parameters(&genes, static_gain))
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// Writes `header` explicitly; rows never add their own.
fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(header).map_err(|e| Error::csv(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_summary_csv(path: &Path, summaries: &[StatsSummary]) -> Result<()> {
    let mut w = writer(path)?;
    for s in summaries {
        w.serialize(s).map_err(|e| Error::csv(path, e))?;
    }
    if summaries.is_empty() {
        w.write_record(["algorithm", "average", "minimum", "std"]).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<StatsSummary>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    r.deserialize().collect::<Result<Vec<StatsSummary>, _>>().map_err(|e| Error::csv(path, e))
}

pub fn write_convergence_csv(path: &Path, curve: &ConvergenceCurve) -> Result<()> {
    write_rows(path, &["evaluation", "mean_best"], curve.evaluations.iter().zip(&curve.mean_best))
}

pub fn write_bode_csv(path: &Path, points: &[crate::model::BodePoint]) -> Result<()> {
    let mut w = writer(path)?;
    for p in points {
        w.serialize(p).map_err(|e| Error::csv(path, e))?;
    }
    if points.is_empty() {
        w.write_record(["omega", "mag_db", "phase_deg"]).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_nyquist_csv(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    write_rows(path, &["re", "im"], points)
}

/// Bode and Nyquist files of one model over `grid`; returns the written paths.
pub fn write_model_plots(params: &ModelParameters, grid: &PlotGrid, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    let omegas = grid.omegas()?;
    let bode = dir.join(format!("bode_{stem}.csv"));
    let nyquist = dir.join(format!("nyquist_{stem}.csv"));
    write_bode_csv(&bode, &bode_points(params, &omegas)?)?;
    write_nyquist_csv(&nyquist, &nyquist_points(params, &omegas)?)?;
    Ok(vec![bode, nyquist])
}

/// Reference curves straight from the measured samples.
pub fn write_dataset_plots(data: &ObservationDataset, dir: &Path) -> Result<Vec<PathBuf>> {
    let bode = dir.join("bode_dataset.csv");
    let nyquist = dir.join("nyquist_dataset.csv");
    write_bode_csv(&bode, &dataset_bode_points(data)?)?;
    let points: Vec<(f64, f64)> = data.samples().iter().map(|s| (s.re_value, s.im_value)).collect();
    write_nyquist_csv(&nyquist, &points)?;
    Ok(vec![bode, nyquist])
}

#[derive(Serialize)]
struct FinalRow<'a> {
    algorithm: &'a str,
    seed: u64,
    final_cost: f64,
}

/// Writes every export of a comparison into `dir` (created if missing) and
/// returns the written paths.
pub fn export_results(
    results: &[AlgorithmResult],
    data: &ObservationDataset,
    grid: &PlotGrid,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    if results.is_empty() || results.iter().any(|r| r.traces.is_empty()) {
        return Err(Error::EmptyResults);
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let summary = dir.join("summary.csv");
    write_summary_csv(&summary, &results.iter().map(|r| r.summary.clone()).collect::<Vec<_>>())?;
    written.push(summary);

    let finals = dir.join("finals.csv");
    write_rows(
        &finals,
        &["algorithm", "seed", "final_cost"],
        results.iter().flat_map(|r| {
            r.traces
                .iter()
                .map(|t| FinalRow { algorithm: r.algorithm.as_str(), seed: t.seed, final_cost: t.final_cost() })
        }),
    )?;
    written.push(finals);

    for r in results {
        let name = r.algorithm.as_str();
        let path = dir.join(format!("convergence_{name}.csv"));
        write_convergence_csv(&path, &r.curve)?;
        written.push(path);

        let params = r.best_parameters(data.static_gain())?;
        let path = dir.join(format!("best_parameters_{name}.csv"));
        params.save(&path)?;
        written.push(path);

        written.extend(write_model_plots(&params, grid, dir, name)?);
    }
    written.extend(write_dataset_plots(data, dir)?);
    Ok(written)
}
