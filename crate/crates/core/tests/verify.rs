use congest_danner::congest::CongestConfig;
use congest_danner::danner::DannerParams;
use congest_danner::graph::{generate, oracle, GenOptions, GeneratorKind, Graph};
use congest_danner::verify::{double_cover, oracle_verdict, verify, Instance, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run(g: &Graph, inst: &Instance, seed: u64) -> bool {
    verify(g, inst, DannerParams::with_delta(0.5), seed, CongestConfig::default())
        .unwrap()
        .holds
}

fn whole(g: &Graph, problem: Problem) -> Instance {
    Instance {
        problem,
        marks: vec![true; g.edges().len()],
        pair: None,
        edge: None,
    }
}

#[test]
fn small_cases() {
    let c5 = generate(&GeneratorKind::Cycle { n: 5 }, GenOptions::default(), 0).unwrap();
    let c4 = generate(&GeneratorKind::Cycle { n: 4 }, GenOptions::default(), 0).unwrap();
    assert!(!run(&c5, &whole(&c5, Problem::Bipartiteness), 1));
    assert!(run(&c4, &whole(&c4, Problem::Bipartiteness), 1));
    assert!(run(&c5, &whole(&c5, Problem::SpanningConnectedSubgraph), 1));
    assert!(run(&c5, &whole(&c5, Problem::CycleContainment), 1));
    assert!(run(&c5, &whole(&c5, Problem::Cut), 1));

    let mut missing = whole(&c5, Problem::SpanningConnectedSubgraph);
    missing.marks[0] = false;
    assert!(run(&c5, &missing, 2));
    missing.problem = Problem::CycleContainment;
    assert!(!run(&c5, &missing, 2));
}

#[test]
fn problems_parse_by_name() {
    for p in Problem::ALL {
        assert_eq!(p.name().parse::<Problem>().unwrap(), p);
    }
    assert!("hamiltonicity".parse::<Problem>().is_err());
}

#[test]
fn missing_designated_elements_are_rejected() {
    let g = generate(&GeneratorKind::Cycle { n: 5 }, GenOptions::default(), 0).unwrap();
    let inst = whole(&g, Problem::StCut);
    assert!(oracle_verdict(&g, &inst).is_err());
    assert!(verify(&g, &inst, DannerParams::with_delta(0.5), 0, CongestConfig::default()).is_err());
}

#[test]
fn double_cover_copies_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for seed in 0..40 {
        let g = generate(&GeneratorKind::Gnp { n: 12, p: 0.25 }, GenOptions::default(), seed).unwrap();
        let marks: Vec<bool> = (0..g.edges().len()).map(|_| rng.gen_bool(0.6)).collect();
        let (cover, cmarks) = double_cover(&g, &marks).unwrap();
        let labels = oracle::components_where(&cover, |e| cmarks[e]);
        let h = oracle::components_where(&g, |e| marks[e]);
        for v in 0..g.n() {
            let comp: Vec<usize> = (0..g.n()).filter(|&x| h[x] == h[v]).collect();
            let odd = !oracle::bipartite_where(&g, |e| marks[e] && comp.contains(&g.edge(e).u)).bipartite;
            assert_eq!(labels[2 * v] == labels[2 * v + 1], odd);
        }
    }
}

#[test]
fn random_instances_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for problem in Problem::ALL {
        let mut wrong = 0;
        for seed in 0..12u64 {
            let n = rng.gen_range(4..=24);
            let g = generate(&GeneratorKind::Gnp { n, p: 0.3 }, GenOptions::default(), seed).unwrap();
            let keep = rng.gen_range(0.3..1.0);
            let marks: Vec<bool> = (0..g.edges().len()).map(|_| rng.gen_bool(keep)).collect();
            let inst = Instance {
                problem,
                marks,
                pair: Some((rng.gen_range(0..n), rng.gen_range(0..n))),
                edge: Some(rng.gen_range(0..g.edges().len())),
            };
            wrong += (run(&g, &inst, seed) != oracle_verdict(&g, &inst).unwrap()) as usize;
        }
        assert_eq!(wrong, 0, "{problem}");
    }
}
