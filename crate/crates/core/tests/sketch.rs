use congest_danner::congest::{CongestConfig, Sim};
use congest_danner::graph::{generate, EdgeId, GenOptions, GeneratorKind, Graph, IdMode, NodeId};
use congest_danner::primitives::{build_bfs_tree, Subgraph};
use congest_danner::sketch::{
    find_any, find_min, leaving_edges, node_parity, test_out, HashSpec, Restriction, SearchInput, DEFAULT_REPETITION,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random connected node set (sometimes the whole graph).
fn random_component(g: &Graph, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let n = g.n();
    let target = if rng.gen_bool(0.1) { n } else { rng.gen_range(1..n) };
    let mut inside = vec![false; n];
    let start = rng.gen_range(0..n);
    inside[start] = true;
    let mut members = vec![start];
    while members.len() < target {
        let v = members[rng.gen_range(0..members.len())];
        let a = &g.adj(v)[rng.gen_range(0..g.degree(v))];
        if !inside[a.nbr] {
            inside[a.nbr] = true;
            members.push(a.nbr);
        }
    }
    inside
}

fn inputs(g: &Graph, sim: &mut Sim<'_>, inside: &[bool]) -> Vec<SearchInput> {
    let root = inside.iter().position(|&b| b).unwrap();
    let trees = build_bfs_tree(sim, "tree", &Subgraph::induced(g, inside, |_| true), root).unwrap();
    (0..g.n())
        .map(|v| SearchInput {
            tree: trees[v].clone(),
            label: g.id(root),
            incident: if inside[v] {
                g.adj(v).iter().map(|a| (g.edge(a.edge).id, g.edge(a.edge).weight)).collect()
            } else {
                Vec::new()
            },
        })
        .collect()
}

fn leaving(g: &Graph, inside: &[bool]) -> Vec<(EdgeId, u64)> {
    g.edges()
        .iter()
        .filter(|e| inside[e.u] != inside[e.v])
        .map(|e| (e.id, e.weight))
        .collect()
}

#[test]
fn singleton_in_triangle_detects_half_the_time() {
    let opts = GenOptions {
        ids: IdMode::Sequential,
        ..GenOptions::default()
    };
    let g = generate(&GeneratorKind::Complete { n: 3 }, opts, 0).unwrap();
    let inside = vec![true, false, false];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut hits = 0;
    for _ in 0..1000 {
        let spec = HashSpec::random(&mut rng, 2);
        let mut sim = Sim::new(&g, CongestConfig::default(), 0);
        let inp = inputs(&g, &mut sim, &inside);
        let res = test_out(&mut sim, "t", inp, &spec).unwrap();
        assert_eq!(res.len(), 1);
        hits += res[0].1 as usize;
    }
    assert!((450..=550).contains(&hits), "hits {hits}");
}

#[test]
fn parity_of_internal_edges_cancels() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for seed in 0..200 {
        let g = generate(&GeneratorKind::Gnp { n: 20, p: 0.3 }, GenOptions::default(), seed).unwrap();
        let inside = random_component(&g, &mut rng);
        let spec = HashSpec::random(&mut rng, 2);
        let restriction = Restriction::default();
        let members: Vec<NodeId> = (0..g.n()).filter(|&v| inside[v]).map(|v| g.id(v)).collect();
        let all: Vec<(EdgeId, u64)> = g.edges().iter().map(|e| (e.id, e.weight)).collect();
        let xor = (0..g.n()).filter(|&v| inside[v]).fold(false, |acc, v| {
            let inc: Vec<(EdgeId, u64)> = g.adj(v).iter().map(|a| (g.edge(a.edge).id, 0)).collect();
            acc ^ node_parity(&spec, &inc, &restriction, g.id_bits())
        });
        let direct = leaving_edges(&members, &all)
            .iter()
            .fold(false, |acc, (e, _)| acc ^ spec.bit(e.encode(g.id_bits())));
        assert_eq!(xor, direct);
    }
}

#[test]
fn find_any_and_find_min_are_sound_and_rarely_miss() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut instances, mut misses, mut min_wrong) = (0, 0, 0);
    for seed in 0..500u64 {
        let n = rng.gen_range(2..=64);
        let p = rng.gen_range(0.05..0.5);
        let Ok(g) = generate(&GeneratorKind::Gnp { n, p }, GenOptions::default(), seed) else {
            continue;
        };
        let inside = random_component(&g, &mut rng);
        let out = leaving(&g, &inside);
        let lightest = out.iter().min_by_key(|(_, w)| *w).map(|(e, _)| *e);

        let mut sim = Sim::new(&g, CongestConfig::default(), seed);
        let inp = inputs(&g, &mut sim, &inside);
        let any = find_any(&mut sim, "any", inp.clone(), DEFAULT_REPETITION).unwrap();
        let min = find_min(&mut sim, "min", inp, DEFAULT_REPETITION).unwrap();
        for (found, is_min) in [(any[0].1, false), (min[0].1, true)] {
            instances += 1;
            match found {
                Some(e) => {
                    assert!(out.iter().any(|(x, _)| *x == e), "non-leaving edge returned");
                    if is_min && Some(e) != lightest {
                        min_wrong += 1;
                    }
                }
                None if !out.is_empty() => misses += 1,
                None => {}
            }
        }
    }
    assert!(misses * 100 < instances, "misses {misses}/{instances}");
    assert!(min_wrong * 100 < instances / 2, "wrong minima {min_wrong}");
}

#[test]
fn several_components_search_in_parallel() {
    let g = generate(&GeneratorKind::Torus { rows: 6, cols: 6 }, GenOptions::default(), 4).unwrap();
    // two halves of the torus, each with its own tree
    let left: Vec<bool> = (0..36).map(|v| v % 6 < 3).collect();
    let mut sim = Sim::new(&g, CongestConfig::default(), 9);
    let mut inp = inputs(&g, &mut sim, &left);
    let right: Vec<bool> = left.iter().map(|b| !b).collect();
    let inp_r = inputs(&g, &mut sim, &right);
    for v in 0..36 {
        if right[v] {
            inp[v] = inp_r[v].clone();
        }
    }
    let found = find_min(&mut sim, "min", inp, DEFAULT_REPETITION).unwrap();
    assert_eq!(found.len(), 2);
    let out = leaving(&g, &left);
    let best = out.iter().min_by_key(|(_, w)| *w).unwrap().0;
    for (_, e) in found {
        assert_eq!(e, Some(best));
    }
}
