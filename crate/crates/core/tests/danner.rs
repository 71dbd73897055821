use congest_danner::congest::CongestConfig;
use congest_danner::danner::{build_danner, component_trace_check, domination_audit, DannerParams};
use congest_danner::graph::{generate, oracle, GenOptions, GeneratorKind, Graph};

fn graphs() -> Vec<Graph> {
    let kinds = [
        GeneratorKind::Gnp { n: 96, p: 0.08 },
        GeneratorKind::Torus { rows: 8, cols: 8 },
        GeneratorKind::Barbell { k: 24, bridges: 2 },
        GeneratorKind::Geometric { n: 80, radius: 0.25 },
        GeneratorKind::Star { n: 40 },
        GeneratorKind::Path { n: 50 },
    ];
    kinds
        .iter()
        .map(|k| generate(k, GenOptions::default(), 3).unwrap())
        .collect()
}

#[test]
fn danners_span_and_stay_close_to_the_graph_diameter() {
    for g in graphs() {
        let d = oracle::diameter(&g).unwrap();
        let n = g.n() as f64;
        for delta in [0.0, 0.25, 0.5, 0.75] {
            let res = build_danner(&g, DannerParams::with_delta(delta), 5, CongestConfig::default()).unwrap();
            assert!(res.is_spanning_connected(&g));
            let dh = res.realized_diameter(&g).unwrap();
            let slack = 8.0 * n.powf(1.0 - delta) * n.log2().powi(2);
            assert!((dh as f64) <= d as f64 + slack, "diam(H) {dh} vs {d}");
            let cap = 4.0 * (g.edges().len() as f64).min(n.powf(1.0 + delta)) * n.log2();
            assert!(res.edge_count() as f64 <= cap);
            assert!(res.metrics.is_consistent());
        }
    }
}

#[test]
fn delta_one_keeps_every_edge_for_free() {
    for g in graphs() {
        let res = build_danner(&g, DannerParams::with_delta(1.0), 0, CongestConfig::default()).unwrap();
        assert_eq!(res.edge_count(), g.edges().len());
        assert_eq!(res.metrics.messages, 0);
    }
}

#[test]
fn components_halve_and_centers_dominate() {
    for seed in 0..6 {
        let g = generate(&GeneratorKind::Gnp { n: 80, p: 0.1 }, GenOptions::default(), seed).unwrap();
        for delta in [0.0, 0.3, 0.6] {
            let res = build_danner(&g, DannerParams::with_delta(delta), seed, CongestConfig::default()).unwrap();
            assert!(component_trace_check(&g, &res), "seed {seed} delta {delta}");
            assert!(domination_audit(&g, &res), "seed {seed} delta {delta}");
        }
    }
}

#[test]
fn same_seed_same_danner() {
    let g = generate(&GeneratorKind::Gnp { n: 256, p: 0.05 }, GenOptions::default(), 9).unwrap();
    let run = |seed| build_danner(&g, DannerParams::with_delta(0.75), seed, CongestConfig::default()).unwrap();
    assert_eq!(run(2), run(2));
    let other = (3..10).map(run).any(|r| r.state.is_center != run(2).state.is_center);
    assert!(other, "seeds should change the sampled centers");
}

#[test]
fn invalid_parameters_are_rejected() {
    let g = generate(&GeneratorKind::Cycle { n: 8 }, GenOptions::default(), 0).unwrap();
    for delta in [-0.1, 1.5, f64::NAN] {
        assert!(build_danner(&g, DannerParams::with_delta(delta), 0, CongestConfig::default()).is_err());
    }
    let params = DannerParams {
        c: 0.0,
        ..DannerParams::with_delta(0.5)
    };
    assert!(build_danner(&g, params, 0, CongestConfig::default()).is_err());
}

#[test]
fn higher_delta_uses_fewer_rounds() {
    let g = generate(&GeneratorKind::Torus { rows: 10, cols: 10 }, GenOptions::default(), 1).unwrap();
    let rounds: Vec<u64> = [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|&d| build_danner(&g, DannerParams::with_delta(d), 4, CongestConfig::default()).unwrap().metrics.rounds)
        .collect();
    assert!(rounds.windows(2).all(|w| w[1] <= w[0]), "{rounds:?}");
}
