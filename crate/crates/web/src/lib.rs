//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; the `*_json` functions hold the logic
//! and are what the native tests exercise.

use serde::Serialize;
use tdsopt::bench::{convergence_curve, summarize, StatsSummary};
use tdsopt::engine::{Bound, EngineConfig, RunTrace};
use tdsopt::model::{
    bode_points, complete_parameters, dataset_bode_points, default_search_bounds, feasibility, nyquist_points,
    BodePoint, FreeGenes, IdentificationProblem, ModelParameters, ObservationDataset, PlotGrid,
};
use tdsopt::socio::{run_algorithm, Algorithm, VariantConfigs};
use wasm_bindgen::prelude::*;

/// Largest budget accepted from the page.
pub const MAX_BUDGET: usize = 15_000;
const CURVE_POINTS: usize = 150;

#[derive(Serialize)]
struct Constraint {
    name: &'static str,
    violation: f64,
}

#[derive(Serialize)]
struct Response {
    parameters: ModelParameters,
    feasible: bool,
    constraints: Vec<Constraint>,
    static_gain: Option<f64>,
    cost: Option<f64>,
    bode: Vec<BodePoint>,
    nyquist: Vec<(f64, f64)>,
    dataset_bode: Vec<BodePoint>,
    dataset_nyquist: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct Curve {
    evaluations: Vec<usize>,
    best: Vec<f64>,
}

#[derive(Serialize)]
struct Optimized {
    algorithm: Algorithm,
    seed: u64,
    final_cost: f64,
    genes: Vec<f64>,
    curve: Curve,
    response: Response,
}

#[derive(Serialize)]
struct Comparison {
    summaries: Vec<StatsSummary>,
    curves: Vec<(Algorithm, Curve)>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn response(p: &ModelParameters) -> Result<Response, String> {
    let data = ObservationDataset::reference();
    let omegas = PlotGrid::default().omegas().map_err(err)?;
    let report = feasibility(p, tdsopt::model::DEFAULT_EPS);
    Ok(Response {
        parameters: *p,
        feasible: report.feasible,
        constraints: report.violations.iter().map(|&(g, v)| Constraint { name: g.label(), violation: v }).collect(),
        static_gain: p.static_gain().ok(),
        cost: p.cost(&data).ok(),
        bode: bode_points(p, &omegas).map_err(err)?,
        nyquist: nyquist_points(p, &omegas).map_err(err)?,
        dataset_bode: dataset_bode_points(&data).map_err(err)?,
        dataset_nyquist: data.samples().iter().map(|s| (s.re_value, s.im_value)).collect(),
    })
}

fn curve_of(traces: &[RunTrace], budget: usize) -> Result<Curve, String> {
    let stride = (budget / CURVE_POINTS).max(1);
    let c = convergence_curve(traces, stride).map_err(err)?;
    Ok(Curve { evaluations: c.evaluations, best: c.mean_best })
}

fn check_budget(budget: usize) -> Result<(), String> {
    let min = EngineConfig::default().population_size;
    if !(min..=MAX_BUDGET).contains(&budget) {
        return Err(format!("budget must lie in [{min}, {MAX_BUDGET}]"));
    }
    Ok(())
}

fn run_one(algorithm: Algorithm, seed: u64, budget: usize) -> Result<RunTrace, String> {
    let problem = IdentificationProblem::default();
    let bounds: Vec<Bound> = default_search_bounds(problem.penalty.eps);
    let engine = EngineConfig { evaluation_budget: budget, rng_seed: seed, ..Default::default() };
    run_algorithm(algorithm, &problem, &bounds, &engine, &VariantConfigs::default()).map_err(err)
}

/// Model response for the eight free genes; `b0_tau` is completed from the
/// reference static gain.
pub fn model_response_json(genes: &[f64]) -> Result<String, String> {
    let genes = FreeGenes::from_slice(genes).map_err(err)?;
    let p = complete_parameters(&genes, ObservationDataset::reference().static_gain());
    serde_json::to_string(&response(&p)?).map_err(err)
}

pub fn optimize_json(algorithm: &str, seed: u64, budget: usize) -> Result<String, String> {
    let algorithm: Algorithm = algorithm.parse().map_err(err)?;
    check_budget(budget)?;
    let trace = run_one(algorithm, seed, budget)?;
    let genes = trace.best_individual.genes().to_vec();
    let p = complete_parameters(&FreeGenes::from_slice(&genes).map_err(err)?, ObservationDataset::reference().static_gain());
    let out = Optimized {
        algorithm,
        seed,
        final_cost: trace.final_cost(),
        genes,
        curve: curve_of(std::slice::from_ref(&trace), budget)?,
        response: response(&p)?,
    };
    serde_json::to_string(&out).map_err(err)
}

/// All four algorithms over `repetitions` shared seeds starting at `seed`.
pub fn compare_json(seed: u64, budget: usize, repetitions: usize) -> Result<String, String> {
    check_budget(budget)?;
    if !(1..=10).contains(&repetitions) {
        return Err("repetitions must lie in [1, 10]".into());
    }
    let mut out = Comparison { summaries: Vec::new(), curves: Vec::new() };
    for alg in Algorithm::ALL {
        let traces = (0..repetitions as u64)
            .map(|i| run_one(alg, seed.wrapping_add(i), budget))
            .collect::<Result<Vec<_>, _>>()?;
        out.summaries.push(summarize(alg.as_str(), &traces).map_err(err)?);
        out.curves.push((alg, curve_of(&traces, budget)?));
    }
    serde_json::to_string(&out).map_err(err)
}

#[wasm_bindgen]
pub fn model_response(genes: &[f64]) -> Result<String, JsError> {
    model_response_json(genes).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn optimize(algorithm: &str, seed: u32, budget: usize) -> Result<String, JsError> {
    optimize_json(algorithm, seed.into(), budget).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare(seed: u32, budget: usize, repetitions: usize) -> Result<String, JsError> {
    compare_json(seed.into(), budget, repetitions).map_err(|e| JsError::new(&e))
}

/// Gene names and search bounds, for building the page's sliders.
#[wasm_bindgen]
pub fn gene_bounds() -> String {
    let rows: Vec<_> = FreeGenes::NAMES
        .iter()
        .zip(default_search_bounds(tdsopt::model::DEFAULT_EPS))
        .map(|(n, b)| (n, b.lower, b.upper))
        .collect();
    serde_json::to_string(&rows).expect("bounds serialize")
}
