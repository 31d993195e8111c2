mod common;

use ewcg::coloring::{
    b_fold_chromatic_number, fractional_chromatic_number, search_folded_coloring, split_replicas,
    validate_folded, Budgets, FoldedColoring, Mode, SearchOptions,
};
use ewcg::fixtures;
use ewcg::graph::{build_bipartite, digits, power_graph, project_ewcg, Ewcg, Rule, Side};
use ewcg::pipeline::{simulate, SimOptions};
use ewcg::prob::Pmf;
use ewcg::rates::{self, joint_color_pmf, PlanOptions};
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn graph_strategy(max_nv: usize) -> impl Strategy<Value = (Ewcg, Vec<f64>)> {
    (1..=max_nv, any::<u64>(), 0.1f64..0.9).prop_map(|(nv, seed, density)| {
        common::random_graph(&mut ChaCha8Rng::seed_from_u64(seed), nv, density)
    })
}

fn instance_strategy(
    k: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (ewcg::prob::JointPmf, ewcg::graph::FunctionTable)> {
    (k.clone(), k, any::<u64>()).prop_map(|(k1, k2, seed)| {
        common::random_instance(&mut ChaCha8Rng::seed_from_u64(seed), k1, k2)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normalized_weights_in_unit_interval((j, f) in instance_strategy(2..=5)) {
        let g = project_ewcg(&build_bipartite(&j, &f).unwrap(), Side::First, Rule::Exact).unwrap();
        let norm: Vec<f64> = g.edges().map(|(_, w)| w.normalized).collect();
        prop_assert!(norm.iter().all(|&w| w > 0.0 && w <= 1.0));
        if !norm.is_empty() {
            prop_assert_eq!(norm.iter().copied().fold(0.0, f64::max), 1.0);
        }
    }

    #[test]
    fn thresholded_weights_give_classical_graph((j, f) in instance_strategy(2..=5)) {
        let g = project_ewcg(&build_bipartite(&j, &f).unwrap(), Side::First, Rule::Exact).unwrap();
        for u in 0..j.rows() {
            for w in u + 1..j.rows() {
                let classical = (0..j.cols())
                    .any(|v| j.p(u, v) > 0.0 && j.p(w, v) > 0.0 && f.eval(u, v) != f.eval(w, v));
                prop_assert_eq!(g.weight(u, w).is_some(), classical);
            }
        }
    }

    #[test]
    fn power_edges_come_from_base_edges((j, f) in instance_strategy(2..=4)) {
        let g1 = project_ewcg(&build_bipartite(&j, &f).unwrap(), Side::First, Rule::Exact).unwrap();
        let g2 = power_graph(&g1, 2, &j, &f, Rule::Exact, 4096).unwrap();
        let k = j.rows();
        for ((x, y), _) in g2.edges() {
            let (u, w) = (digits(x, k, 2), digits(y, k, 2));
            prop_assert!((0..2).any(|i| g1.weight(u[i], w[i]).is_some()));
        }
    }

    #[test]
    fn positive_replicas_match_required_colors((g, _) in graph_strategy(7), b in 1usize..=5) {
        let split = split_replicas(&g, b).unwrap();
        for ((u, v), w) in g.edges() {
            let reps = split.weights(u, v).unwrap();
            let positive = reps.iter().filter(|&&x| x > 0.0).count();
            prop_assert_eq!(positive, (w.normalized * b as f64 - 1e-9).ceil() as usize);
            prop_assert!((reps.iter().sum::<f64>() - b as f64 * w.normalized).abs() < 1e-9 || positive == b);
        }
    }

    #[test]
    fn unit_weights_mean_disjoint_sets((g, _) in graph_strategy(7), b in 1usize..=3, seed in any::<u64>()) {
        use ::rand::seq::IndexedRandom;
        let plain = g.as_unweighted();
        let a = 2 * b + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let palette: Vec<usize> = (0..a).collect();
        let slots: Vec<Vec<usize>> = (0..g.len())
            .map(|_| palette.choose_multiple(&mut rng, b).copied().collect())
            .collect();
        let c = FoldedColoring::new(a, b, slots.clone()).unwrap();
        let disjoint = plain.edges().all(|((u, v), _)| slots[u].iter().all(|x| !slots[v].contains(x)));
        prop_assert_eq!(validate_folded(&c, &plain).unwrap().is_ok(), disjoint);
    }

    #[test]
    fn heuristic_results_are_valid((g, _) in graph_strategy(10), b in 1usize..=3, extra in 0usize..3, seed in any::<u64>()) {
        let chi = b_fold_chromatic_number(&g.as_unweighted(), 1, &Budgets { folded_vertices: 16, ..Default::default() }).unwrap();
        let a = chi * b + extra;
        let opts = SearchOptions { mode: Mode::Heuristic, seed, ..Default::default() };
        let s = search_folded_coloring(&g, a, b, g.marginal(), &opts).unwrap();
        prop_assert!(validate_folded(&s.coloring, &g).unwrap().is_ok());
        prop_assert_eq!((s.coloring.a(), s.coloring.b()), (a, b));
    }

    #[test]
    fn fractional_below_folded_ratio((g, _) in graph_strategy(6)) {
        let g = g.as_unweighted();
        let chi_f = fractional_chromatic_number(&g, &Budgets::default()).unwrap().to_f64().unwrap();
        for b in 1..=3 {
            let chi_b = b_fold_chromatic_number(&g, b, &Budgets::default()).unwrap();
            prop_assert!(chi_f <= chi_b as f64 / b as f64 + 1e-12);
        }
    }

    #[test]
    fn conditional_entropy_below_marginal((j, _) in instance_strategy(2..=6)) {
        prop_assert!(j.conditional_entropy() <= j.row_marginal().entropy() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn plan_invariants((j, f) in instance_strategy(3..=4), b in 1usize..=2) {
        let opts = PlanOptions::new(1, b);
        let plan = rates::plan(&j, &f, &opts).unwrap();
        // weighted search is warm-started from the unweighted optimum
        if let Some(u) = &plan.unweighted_1 {
            prop_assert!(plan.weighted_1.color_entropy <= u.color_entropy + 1e-12);
        }
        let jc = joint_color_pmf(plan.coloring_1(), &plan.coloring_2, &j, 1).unwrap();
        for (s, &p) in jc.sets_1.iter().zip(jc.pmf.row_marginal().probs()) {
            let direct: f64 = (0..j.rows())
                .filter(|&x| &plan.coloring_1().color_set(x) == s)
                .map(|x| j.row_marginal().probs()[x])
                .sum();
            prop_assert!((p - direct).abs() < 1e-12);
        }
        let report = rates::rate_region(&j, &f, &opts).unwrap();
        prop_assert!(report.sum_rate_min.unwrap() <= report.slepian_wolf_sum_rate + 1e-9);
    }

    #[test]
    fn lookup_decoding_is_lossless((j, f) in instance_strategy(3..=5), b in 1usize..=3, seed in any::<u64>()) {
        let opts = SimOptions { plan: PlanOptions::new(1, b), num_blocks: 2000, seed, binning: None };
        prop_assert_eq!(simulate(&j, &f, &opts).unwrap().decode_errors, 0);
    }
}

#[test]
fn empirical_color_sets_follow_their_distribution() {
    let j = fixtures::example1_joint();
    let f = fixtures::example1_function();
    let opts = SimOptions {
        plan: PlanOptions::new(1, 2),
        num_blocks: 100_000,
        seed: 3,
        binning: None,
    };
    let plan = rates::plan(&j, &f, &opts.plan).unwrap();
    let r = simulate(&j, &f, &opts).unwrap();
    let jc = joint_color_pmf(plan.coloring_1(), &plan.coloring_2, &j, 1).unwrap();
    for (counts, marginal) in [
        (&r.set_counts_1, jc.pmf.row_marginal()),
        (&r.set_counts_2, jc.pmf.col_marginal()),
    ] {
        let total = r.samples as f64;
        let mut stat = 0.0;
        let mut cells = 0;
        for ((_, observed), &p) in counts.iter().zip(marginal.probs()) {
            if p > 0.0 {
                let expected = p * total;
                stat += (*observed as f64 - expected).powi(2) / expected;
                cells += 1;
            }
        }
        let p_value = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
        assert!(
            p_value > 0.001,
            "chi-square {stat} on {cells} cells, p = {p_value}"
        );
    }
}

#[test]
fn simulation_is_deterministic() {
    let j = fixtures::example1_joint();
    let f = fixtures::example1_function();
    let run = |seed| {
        let opts = SimOptions {
            plan: PlanOptions::new(1, 2),
            num_blocks: 20_000,
            seed,
            binning: None,
        };
        serde_json::to_string(&simulate(&j, &f, &opts).unwrap()).unwrap()
    };
    assert_eq!(run(9), run(9));
    assert_ne!(run(9), run(10));
}

#[test]
fn uniform_marginal_gives_log_palette_for_five_two() {
    let g = fixtures::example1_graph(Side::First).as_unweighted();
    let s = search_folded_coloring(
        &g,
        5,
        2,
        &Pmf::uniform(5).unwrap(),
        &SearchOptions::default(),
    )
    .unwrap();
    assert!((s.color_entropy / 2.0 - 5f64.log2() / 2.0).abs() < 1e-12);
}
