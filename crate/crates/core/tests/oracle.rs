use congest_danner::graph::{generate, oracle, GenOptions, GeneratorKind, Graph, NodeId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INF: u32 = u32::MAX / 4;

fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for v in 0..n {
        d[v][v] = 0;
    }
    for e in g.edges() {
        d[e.u][e.v] = 1;
        d[e.v][e.u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d
}

fn prim_weight(g: &Graph) -> u64 {
    let n = g.n();
    let mut inside = vec![false; n];
    inside[0] = true;
    let mut total = 0;
    for _ in 1..n {
        let best = g
            .edges()
            .iter()
            .filter(|e| inside[e.u] != inside[e.v])
            .min_by_key(|e| e.weight)
            .unwrap();
        total += best.weight;
        inside[best.u] = true;
        inside[best.v] = true;
    }
    total
}

fn brute_mincut(g: &Graph) -> u64 {
    let n = g.n();
    (1u32..(1 << (n - 1)))
        .map(|side| {
            g.edges()
                .iter()
                .filter(|e| (side >> e.u & 1) != (side >> e.v & 1))
                .map(|e| e.mult as u64)
                .sum()
        })
        .min()
        .unwrap()
}

fn brute_domination(g: &Graph) -> u32 {
    let n = g.n();
    (1u32..(1 << n))
        .filter(|set| {
            (0..n).all(|v| set >> v & 1 == 1 || g.adj(v).iter().any(|a| set >> a.nbr & 1 == 1))
        })
        .map(u32::count_ones)
        .min()
        .unwrap()
}

fn random_graph(rng: &mut ChaCha8Rng, max_n: usize, multiplicity: u32) -> Graph {
    let n = rng.gen_range(3..=max_n);
    let opts = GenOptions {
        multiplicity,
        ..GenOptions::default()
    };
    let p = rng.gen_range(0.3..0.9);
    generate(&GeneratorKind::Gnp { n, p }, opts, rng.gen()).unwrap()
}

#[test]
fn bfs_distances_match_floyd_warshall() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let g = random_graph(&mut rng, 24, 1);
        let fw = floyd_warshall(&g);
        for s in 0..g.n() {
            let d = oracle::bfs(&g, s);
            assert!((0..g.n()).all(|t| d[t] == fw[s][t]));
        }
        let diam = fw.iter().flatten().copied().max().unwrap();
        assert_eq!(oracle::diameter(&g), Some(diam));
    }
}

#[test]
fn kruskal_weight_matches_prim() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..60 {
        let g = random_graph(&mut rng, 40, 1);
        let tree = oracle::mst(&g).unwrap();
        assert_eq!(tree.len(), g.n() - 1);
        let w: u64 = tree.iter().map(|&e| g.edge(e).weight).sum();
        assert_eq!(w, prim_weight(&g));
    }
}

#[test]
fn stoer_wagner_matches_cut_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..80 {
        let g = random_graph(&mut rng, 11, 1 + i % 3);
        assert_eq!(oracle::mincut(&g).unwrap(), brute_mincut(&g));
    }
}

#[test]
fn domination_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..80 {
        let g = random_graph(&mut rng, 12, 1);
        assert_eq!(oracle::domination_number(&g).unwrap(), brute_domination(&g));
    }
}

#[test]
fn odd_cycle_certificates_are_odd_closed_walks() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut seen_odd = 0;
    for _ in 0..80 {
        let g = random_graph(&mut rng, 16, 1);
        let verdict = oracle::bipartite(&g);
        match verdict.odd_cycle {
            Some(cycle) => {
                seen_odd += 1;
                assert!(!verdict.bipartite);
                assert_eq!(cycle.len() % 2, 1);
                for i in 0..cycle.len() {
                    let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                    assert!(g.adj(a).iter().any(|x| x.nbr == b));
                }
            }
            None => assert!(verdict.bipartite),
        }
    }
    assert!(seen_odd > 0);
}

#[test]
fn components_label_by_minimum_id() {
    let ids: Vec<NodeId> = [9, 4, 7, 2, 5].into_iter().map(NodeId).collect();
    let g = Graph::new(ids, [(0, 1, 1, 1), (2, 3, 2, 1)]).unwrap();
    let labels = oracle::components(&g);
    assert_eq!(labels, [4, 4, 2, 2, 5].map(NodeId));
    assert_eq!(oracle::component_count(&labels), 3);
    assert!(!oracle::is_connected(&g));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diameter_is_below_three_domination(n in 2usize..16, p in 0.2f64..0.8, seed in any::<u64>()) {
        if let Ok(g) = generate(&GeneratorKind::Gnp { n, p }, GenOptions::default(), seed) {
            let diam = oracle::diameter(&g).unwrap();
            prop_assert!(diam < 3 * oracle::domination_number(&g).unwrap());
        }
    }

    #[test]
    fn shortest_paths_meet_closed_neighbourhoods_at_most_three_times(
        n in 2usize..18, p in 0.15f64..0.7, seed in any::<u64>(), s in any::<prop::sample::Index>(), t in any::<prop::sample::Index>()
    ) {
        if let Ok(g) = generate(&GeneratorKind::Gnp { n, p }, GenOptions::default(), seed) {
            let path = oracle::shortest_path(&g, s.index(n), t.index(n)).unwrap();
            prop_assert_eq!(path.len() as u32, oracle::bfs(&g, s.index(n))[t.index(n)] + 1);
            for v in 0..n {
                let near = path.iter().filter(|&&x| x == v || g.adj(v).iter().any(|a| a.nbr == x)).count();
                prop_assert!(near <= 3);
            }
        }
    }
}
