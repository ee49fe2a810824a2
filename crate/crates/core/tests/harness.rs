use std::fs;
use std::path::Path;

use tdsopt::bench::{
    export_results, read_summary_csv, run_experiment, AlgorithmResult, ExperimentConfig, DEFAULT_CONVERGENCE_STRIDE,
};
use tdsopt::engine::EngineConfig;
use tdsopt::model::{ModelParameters, ObservationDataset, PlotGrid, REFERENCE_SAMPLES};
use tdsopt::socio::Algorithm;

fn small(algorithm: Algorithm, repetitions: usize, jobs: usize) -> ExperimentConfig {
    ExperimentConfig {
        algorithm,
        engine: EngineConfig { evaluation_budget: 600, ..Default::default() },
        repetitions,
        base_seed: 17,
        jobs,
        ..Default::default()
    }
}

fn export_all(dir: &Path) -> Vec<std::path::PathBuf> {
    let results: Vec<_> = Algorithm::ALL
        .into_iter()
        .map(|a| AlgorithmResult::new(a, run_experiment(&small(a, 3, 2)).unwrap(), DEFAULT_CONVERGENCE_STRIDE).unwrap())
        .collect();
    export_results(&results, &ObservationDataset::reference(), &PlotGrid::default(), dir).unwrap()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn single_repetition_uses_the_base_seed() {
    let traces = run_experiment(&small(Algorithm::Genetic, 1, 1)).unwrap();
    assert_eq!(traces.len(), 1);
    assert_eq!(traces[0].seed, 17);
}

#[test]
fn same_config_gives_identical_traces() {
    for alg in Algorithm::ALL {
        let a = run_experiment(&small(alg, 2, 1)).unwrap();
        let b = run_experiment(&small(alg, 2, 1)).unwrap();
        assert_eq!(a, b, "{alg}");
    }
}

#[test]
fn parallel_runs_match_sequential_ones() {
    let seq = run_experiment(&small(Algorithm::Separated, 5, 1)).unwrap();
    let par = run_experiment(&small(Algorithm::Separated, 5, 4)).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.iter().map(|t| t.seed).collect::<Vec<_>>(), (17..22).collect::<Vec<_>>());
}

#[test]
fn ten_full_budget_runs_of_the_baseline() {
    let cfg = ExperimentConfig { jobs: 4, ..Default::default() };
    let traces = run_experiment(&cfg).unwrap();
    assert_eq!(traces.len(), 10);
    for (i, t) in traces.iter().enumerate() {
        assert_eq!(t.seed, i as u64);
        assert_eq!(t.evaluations_used, 15_000);
        assert_eq!(t.best_history.len(), 15_000);
        assert!(t.final_cost() < 1e-2);
    }
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(run_experiment(&ExperimentConfig { repetitions: 0, ..Default::default() }).is_err());
    let mut cfg = ExperimentConfig::default();
    cfg.bounds.pop();
    assert!(run_experiment(&cfg).is_err());
    let cfg = ExperimentConfig { engine: EngineConfig { evaluation_budget: 10, ..Default::default() }, ..Default::default() };
    assert!(run_experiment(&cfg).is_err());
}

#[test]
fn exports_are_complete_and_byte_identical() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let w1 = export_all(d1.path());
    let w2 = export_all(d2.path());
    assert_eq!(w1.len(), w2.len());
    for (a, b) in w1.iter().zip(&w2) {
        assert_eq!(a.file_name(), b.file_name());
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{}", a.display());
    }

    let dir = d1.path();
    let summary = read_summary_csv(&dir.join("summary.csv")).unwrap();
    let names: Vec<_> = summary.iter().map(|s| s.algorithm.as_str()).collect();
    assert_eq!(names, ["genetic", "caste", "separated", "topsis"]);
    let finals = rows(&dir.join("finals.csv"));
    assert_eq!(finals.len(), 12);
    assert_eq!((&finals[0][0], &finals[0][1]), ("genetic", "17"));

    for alg in Algorithm::ALL {
        let curve = rows(&dir.join(format!("convergence_{alg}.csv")));
        let means: Vec<f64> = curve.iter().map(|r| r[1].parse().unwrap()).collect();
        assert!(means.windows(2).all(|w| w[1] <= w[0]), "{alg}");
        assert_eq!(curve.last().unwrap()[0].parse::<usize>().unwrap(), 600);

        let params = ModelParameters::load(&dir.join(format!("best_parameters_{alg}.csv"))).unwrap();
        assert!((params.static_gain().unwrap() - 0.0322).abs() < 1e-9);
        assert_eq!(rows(&dir.join(format!("bode_{alg}.csv"))).len(), 500);
        assert_eq!(rows(&dir.join(format!("nyquist_{alg}.csv"))).len(), 500);
    }
    let dataset = rows(&dir.join("nyquist_dataset.csv"));
    assert_eq!(dataset.len(), REFERENCE_SAMPLES.len());
    assert_eq!(rows(&dir.join("bode_dataset.csv")).len(), 20);
}

#[test]
fn export_into_unwritable_location_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let results = vec![AlgorithmResult::new(
        Algorithm::Genetic,
        run_experiment(&small(Algorithm::Genetic, 1, 1)).unwrap(),
        DEFAULT_CONVERGENCE_STRIDE,
    )
    .unwrap()];
    let err = export_results(&results, &ObservationDataset::reference(), &PlotGrid::default(), &blocker.join("out"))
        .unwrap_err();
    assert!(err.to_string().contains("file"), "{err}");
}
