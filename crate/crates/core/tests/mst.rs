use congest_danner::congest::{CongestConfig, Sim};
use congest_danner::danner::DannerParams;
use congest_danner::graph::oracle;
use congest_danner::graph::{generate, GenOptions, GeneratorKind, Graph, IdMode, NodeId};
use congest_danner::mst::{
    connected_components, controlled_ghs, cut_property_audit, mst, AdoptionLog, Ambient, Branch, FragmentMap, Growth,
    MstParams,
};
use congest_danner::sketch::SearchMode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> CongestConfig {
    CongestConfig::default()
}

fn check(g: &Graph, params: MstParams, seed: u64) -> bool {
    let res = mst(g, params, seed, cfg()).unwrap();
    let ok = res.matches_oracle(g);
    if ok {
        assert!(res.verified);
        assert!(cut_property_audit(g, &res.log).is_empty(), "cut audit failed");
    }
    ok
}

#[test]
fn trivial_shapes() {
    let opts = GenOptions {
        ids: IdMode::Sequential,
        ..GenOptions::default()
    };
    let path = generate(&GeneratorKind::Path { n: 9 }, opts, 1).unwrap();
    for delta in [0.0, 0.25, 0.5] {
        let res = mst(&path, MstParams::with_delta(delta), 3, cfg()).unwrap();
        assert_eq!(res.edges.len(), 8);
    }
    let tri = Graph::new(vec![NodeId(1), NodeId(2), NodeId(3)], [(0, 1, 1, 1), (1, 2, 2, 1), (0, 2, 3, 1)]).unwrap();
    let res = mst(&tri, MstParams::with_delta(0.0), 0, cfg()).unwrap();
    let weights: Vec<u64> = res.edges.iter().map(|&e| tri.edge(e).weight).collect();
    assert_eq!(weights, vec![1, 2]);
}

#[test]
fn matches_kruskal_on_both_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut runs = 0;
    let mut good = 0;
    for seed in 0..30u64 {
        let n = rng.gen_range(8..=64);
        let p = rng.gen_range(0.08..0.5);
        let g = generate(&GeneratorKind::Gnp { n, p }, GenOptions::default(), seed).unwrap();
        for delta in [0.0, 0.25, 0.5] {
            for branch in [Branch::Dense, Branch::Sparse] {
                let params = MstParams {
                    force_branch: Some(branch),
                    ..MstParams::with_delta(delta)
                };
                runs += 1;
                good += check(&g, params, seed) as usize;
            }
        }
    }
    assert!(good * 100 >= runs * 99, "{good}/{runs}");
}

#[test]
fn branch_follows_edge_count() {
    let dense = generate(&GeneratorKind::Complete { n: 16 }, GenOptions::default(), 0).unwrap();
    let sparse = generate(&GeneratorKind::Cycle { n: 16 }, GenOptions::default(), 0).unwrap();
    let a = mst(&dense, MstParams::with_delta(0.25), 0, cfg()).unwrap();
    let b = mst(&sparse, MstParams::with_delta(0.25), 0, cfg()).unwrap();
    assert_eq!((a.branch, a.m), (Branch::Dense, 120));
    assert_eq!((b.branch, b.m), (Branch::Sparse, 16));
}

#[test]
fn rejects_bad_inputs() {
    let g = generate(&GeneratorKind::Cycle { n: 6 }, GenOptions::default(), 0).unwrap();
    assert!(mst(&g, MstParams::with_delta(0.75), 0, cfg()).is_err());
    let unit = GenOptions {
        weights: congest_danner::graph::WeightMode::Unit,
        ..GenOptions::default()
    };
    let g = generate(&GeneratorKind::Cycle { n: 6 }, unit, 0).unwrap();
    assert!(mst(&g, MstParams::with_delta(0.0), 0, cfg()).is_err());
}

#[test]
fn growth_bounds_fragment_count_and_stays_inside_mst() {
    let g = generate(&GeneratorKind::Complete { n: 16 }, GenOptions::default(), 5).unwrap();
    let want = oracle::mst(&g).unwrap();
    for seed in 0..20 {
        let mut sim = Sim::new(&g, cfg(), seed);
        let mut fm = FragmentMap::singletons(&g);
        let mut log = AdoptionLog::default();
        let growth = Growth::Sketch {
            mode: SearchMode::Min,
            ambient: Ambient::All,
            a: 3.0,
        };
        controlled_ghs(&mut sim, "ghs", &mut fm, 2, growth, &mut log).unwrap();
        assert!(fm.count() <= 4);
        for e in fm.edge_list() {
            assert!(want.contains(&e));
        }
        let bad = cut_property_audit(&g, &log);
        assert!(bad.is_empty(), "seed {seed}: {bad:?} {:?}", log.adoptions);
    }
    let mut sim = Sim::new(&g, cfg(), 0);
    let mut fm = FragmentMap::singletons(&g);
    controlled_ghs(&mut sim, "ghs", &mut fm, 0, Growth::Exchange, &mut AdoptionLog::default()).unwrap();
    assert_eq!(fm.count(), 16);
}

#[test]
fn components_match_bfs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut wrong = 0;
    let trials = 60;
    for seed in 0..trials {
        let n = rng.gen_range(6..=48);
        let g = generate(&GeneratorKind::Gnp { n, p: 0.2 }, GenOptions::default(), seed).unwrap();
        let keep = rng.gen_range(0.0..1.0);
        let marks: Vec<bool> = (0..g.edges().len()).map(|_| rng.gen_bool(keep)).collect();
        let delta = [0.0, 0.25, 0.5][seed as usize % 3];
        let cc = connected_components(&g, &marks, DannerParams::with_delta(delta), seed, cfg()).unwrap();
        let want = oracle::components_where(&g, |e| marks[e]);
        wrong += (cc.label != want) as usize;
    }
    assert!(wrong <= 1, "{wrong} wrong of {trials}");

    let g = generate(&GeneratorKind::Torus { rows: 4, cols: 4 }, GenOptions::default(), 0).unwrap();
    let all = vec![true; g.edges().len()];
    let none = vec![false; g.edges().len()];
    let p = DannerParams::with_delta(0.5);
    assert_eq!(connected_components(&g, &all, p, 0, cfg()).unwrap().count(), 1);
    assert_eq!(connected_components(&g, &none, p, 0, cfg()).unwrap().count(), 16);
}
