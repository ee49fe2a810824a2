mod common;

use std::cell::Cell;
use std::sync::Arc;

use proptest::prelude::*;
use tdsopt::bench::{summarize, StatsSummary};
use tdsopt::engine::{
    polynomial_mutation, replace, sbx_crossover, seeded_rng, Bound, EngineConfig, Genotype, Individual, RunTrace,
};
use tdsopt::model::{
    bode_points, complete_parameters, default_search_bounds, feasibility, log_grid, penalized_cost, FreeGenes,
    ObservationDataset, PenaltySettings,
};
use tdsopt::socio::{
    assign_castes, attraction_point, caste_sizes, reassign_caste_order, run_algorithm, topsis_mutation, Algorithm,
    AssignmentMode, CasteConfig, SeparatedConfig, TopsisConfig, VariantConfigs, WeightingVariant,
};

use common::{feasible_vector, fitted_vector, welford};

const K: f64 = 0.0322;

fn genes_in_bounds() -> impl Strategy<Value = FreeGenes> {
    let b = default_search_bounds(1e-9);
    let ranges: Vec<_> = b.iter().map(|b| b.lower..=b.upper).collect();
    ranges.prop_map(|v| FreeGenes(v.try_into().unwrap()))
}

fn trace_from(finals: &[f64]) -> Vec<RunTrace> {
    let bounds: Arc<[Bound]> = vec![Bound::new(0.0, 1.0)].into();
    finals
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut best = Individual::new(Genotype::new(vec![0.5], bounds.clone()).unwrap());
            best.set_fitness(c);
            RunTrace { best_history: vec![(1, c)], best_individual: best, evaluations_used: 1, seed: i as u64 }
        })
        .collect()
}

fn evaluated(genes: &[f64], costs: &[f64], lo: f64, hi: f64) -> Vec<Individual> {
    let bounds: Arc<[Bound]> = vec![Bound::new(lo, hi)].into();
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

proptest! {
    #[test]
    fn static_gain_closure(genes in genes_in_bounds()) {
        let p = complete_parameters(&genes, K);
        let s = p.a0 + p.a0_theta;
        prop_assume!(s != 0.0);
        let err = (p.static_gain().unwrap() - K).abs();
        // b0_tau is a double: its spacing bounds how well b0 + b0_tau can hit k·s
        let floor = 2.0 * f64::EPSILON * p.b0.abs().max(p.b0_tau.abs()) / s.abs() + 4.0 * f64::EPSILON * K;
        prop_assert!(err <= floor.max(1e-12), "err {err:e}, s {s:e}");
        if s.abs() >= 1e-3 {
            prop_assert!(err <= 1e-12);
        }
    }

    #[test]
    fn feasibility_is_monotone_in_eps(genes in genes_in_bounds(), e1 in 1e-12f64..1e-3, shrink in 0.0f64..1.0) {
        let p = complete_parameters(&genes, K);
        if feasibility(&p, e1).feasible {
            prop_assert!(feasibility(&p, e1 * shrink).feasible);
        }
    }

    #[test]
    fn infeasible_points_cost_more_than_feasible_ones(genes in genes_in_bounds()) {
        let data = ObservationDataset::reference();
        let penalty = PenaltySettings::default();
        let p = complete_parameters(&genes, K);
        if !feasibility(&p, penalty.eps).feasible {
            let c = penalized_cost(&p, &data, &penalty);
            for q in [feasible_vector(), fitted_vector()] {
                prop_assert!(c > penalized_cost(&q, &data, &penalty));
            }
        }
    }

    #[test]
    fn bode_phase_has_no_jumps(genes in genes_in_bounds()) {
        let p = complete_parameters(&genes, K);
        let omegas = log_grid(1e-4, 1e-1, 500).unwrap();
        let bode = bode_points(&p, &omegas).unwrap();
        for w in bode.windows(2) {
            prop_assert!((w[1].phase_deg - w[0].phase_deg).abs() <= 180.0);
        }
    }

    #[test]
    fn variation_stays_in_bounds(
        seed in any::<u64>(),
        raw in prop::collection::vec((-5.0f64..5.0, 0.0f64..5.0, 0.0f64..1.0, 0.0f64..1.0), 1..8),
        px in 0.0f64..=1.0,
        pm in 0.0f64..=1.0,
        eta in 0.0f64..50.0,
    ) {
        let bounds: Arc<[Bound]> = raw.iter().map(|&(lo, w, _, _)| Bound::new(lo, lo + w)).collect::<Vec<_>>().into();
        let a: Vec<f64> = raw.iter().map(|&(lo, w, u, _)| lo + u * w).collect();
        let b: Vec<f64> = raw.iter().map(|&(lo, w, _, v)| lo + v * w).collect();
        let a = Genotype::new(a, bounds.clone()).unwrap();
        let b = Genotype::new(b, bounds).unwrap();
        let mut rng = seeded_rng(seed);
        let (c1, c2) = sbx_crossover(&a, &b, px, eta, &mut rng).unwrap();
        prop_assert!(c1.in_bounds() && c2.in_bounds());
        prop_assert!(polynomial_mutation(c1, pm, eta, &mut rng).in_bounds());
        prop_assert!(polynomial_mutation(c2, pm, eta, &mut rng).in_bounds());
    }

    #[test]
    fn replacement_matches_selection_oracle(
        pop_costs in prop::collection::vec(0u8..20, 1..30),
        off_costs in prop::collection::vec(0u8..20, 0..30),
    ) {
        let pop_genes: Vec<f64> = (0..pop_costs.len()).map(|i| i as f64).collect();
        let off_genes: Vec<f64> = (0..off_costs.len()).map(|i| 100.0 + i as f64).collect();
        let to_f = |v: &[u8]| v.iter().map(|&c| f64::from(c)).collect::<Vec<_>>();
        let pop = evaluated(&pop_genes, &to_f(&pop_costs), -1000.0, 1000.0);
        let off = evaluated(&off_genes, &to_f(&off_costs), -1000.0, 1000.0);
        let size = pop.len();

        // repeated extraction of the first strict minimum
        let mut pool: Vec<(f64, f64)> = pop.iter().chain(&off).map(|i| (i.fitness().unwrap(), i.genes()[0])).collect();
        let mut expected = Vec::new();
        for _ in 0..size {
            let mut best = 0;
            for j in 1..pool.len() {
                if pool[j].0 < pool[best].0 {
                    best = j;
                }
            }
            expected.push(pool.remove(best).1);
        }
        let got: Vec<f64> = replace(pop, off, size).unwrap().iter().map(|i| i.genes()[0]).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn summary_matches_single_pass_statistics(finals in prop::collection::vec(1e-9f64..1e-2, 1..40)) {
        let StatsSummary { average, minimum, std, .. } = summarize("x", &trace_from(&finals)).unwrap();
        let (mean, var) = welford(&finals);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        prop_assert!(close(average, mean));
        prop_assert!(close(std, var.sqrt()));
        prop_assert_eq!(minimum, finals.iter().copied().fold(f64::INFINITY, f64::min));
        prop_assert!(minimum <= average && std >= 0.0);
    }

    #[test]
    fn elitist_castes_are_ordered_blocks(
        costs in prop::collection::vec(-100.0f64..100.0, 1..40),
        castes in 1usize..8,
        seed in any::<u64>(),
    ) {
        prop_assume!(castes <= costs.len());
        let mut pop = evaluated(&costs, &costs, -100.0, 100.0);
        assign_castes(&mut pop, AssignmentMode::Elitist, castes, &mut seeded_rng(seed)).unwrap();
        let sizes = caste_sizes(costs.len(), castes);
        for c in 1..=castes {
            let members: Vec<f64> = pop.iter().filter(|i| i.caste.unwrap().0 == c).map(|i| i.fitness().unwrap()).collect();
            prop_assert_eq!(members.len(), sizes[c - 1]);
            for d in c + 1..=castes {
                let worse = pop.iter().filter(|i| i.caste.unwrap().0 == d).map(|i| i.fitness().unwrap());
                let min_worse = worse.fold(f64::INFINITY, f64::min);
                prop_assert!(members.iter().all(|&m| m <= min_worse));
            }
        }
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);

        // re-ranking after random assignment gives the same tags
        let mut shuffled = evaluated(&costs, &costs, -100.0, 100.0);
        assign_castes(&mut shuffled, AssignmentMode::Random, castes, &mut seeded_rng(seed)).unwrap();
        reassign_caste_order(&mut shuffled, castes).unwrap();
        prop_assert_eq!(
            shuffled.iter().map(|i| i.caste).collect::<Vec<_>>(),
            pop.iter().map(|i| i.caste).collect::<Vec<_>>()
        );
    }

    #[test]
    fn pure_attraction_never_moves_away(
        genes in prop::collection::vec(-10.0f64..10.0, 2..20),
        t_best in 0.0f64..=1.0,
        count_frac in 0.0f64..1.0,
        variant in prop::sample::select(vec![
            WeightingVariant::Uniform,
            WeightingVariant::FitnessProportional,
            WeightingVariant::LinearRank,
            WeightingVariant::ExponentialRank,
        ]),
    ) {
        let costs: Vec<f64> = genes.iter().map(|g| g * g).collect();
        let pop = evaluated(&genes, &costs, -10.0, 10.0);
        let count = 1 + (count_frac * (pop.len() - 1) as f64) as usize;
        let attract = attraction_point(&pop, count, variant).unwrap();
        let cfg = TopsisConfig { t_best, t_worst: 0.0, ..Default::default() };
        for m in &pop {
            let out = topsis_mutation(m, &attract, &attract, &cfg);
            let a = attract.genes()[0];
            prop_assert!((out.genes()[0] - a).abs() <= (m.genes()[0] - a).abs() + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_algorithm_spends_the_exact_budget_inside_bounds(
        algorithm in prop::sample::select(Algorithm::ALL.to_vec()),
        budget in 12usize..400,
        seed in any::<u64>(),
    ) {
        let bounds = vec![Bound::new(-1.0, 2.0), Bound::new(0.0, 0.0), Bound::new(5.0, 6.0)];
        let calls = Cell::new(0usize);
        let escaped = Cell::new(false);
        let objective = |x: &[f64]| {
            calls.set(calls.get() + 1);
            if x.iter().zip(&bounds).any(|(v, b)| !b.contains(*v)) {
                escaped.set(true);
            }
            x.iter().map(|v| (v - 0.3) * (v - 0.3)).sum::<f64>()
        };
        let engine = EngineConfig { population_size: 12, offspring_size: 4, evaluation_budget: budget, rng_seed: seed, ..Default::default() };
        let variants = VariantConfigs {
            caste: CasteConfig { number_of_castes: 3, ..Default::default() },
            separated: SeparatedConfig { number_of_castes: 3, assign_castes_interval: 25, ..Default::default() },
            topsis: TopsisConfig { p: 0.5, best_individuals_count: 3, worst_individuals_count: 3, ..Default::default() },
        };
        let trace = run_algorithm(algorithm, &objective, &bounds, &engine, &variants).unwrap();
        prop_assert_eq!(calls.get(), budget);
        prop_assert_eq!(trace.evaluations_used, budget);
        prop_assert_eq!(trace.best_history.len(), budget);
        prop_assert!(!escaped.get());
        prop_assert!(trace.best_history.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 == w[0].0 + 1));
        prop_assert_eq!(trace.final_cost(), trace.best_individual.fitness().unwrap());
        let recomputed = objective(trace.best_individual.genes());
        prop_assert_eq!(recomputed, trace.final_cost());
    }
}
