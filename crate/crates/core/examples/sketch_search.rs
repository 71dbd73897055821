//! Finds an arbitrary and the lightest edge leaving a node set using only
//! parity sketches aggregated over a spanning tree of the set.

use congest_danner::congest::Sim;
use congest_danner::graph::{generate, GenOptions, GeneratorKind};
use congest_danner::primitives::{build_bfs_tree, Subgraph};
use congest_danner::sketch::{find_any, find_min, SearchInput, DEFAULT_REPETITION};
use congest_danner::CongestConfig;

fn main() -> congest_danner::Result<()> {
    let g = generate(&GeneratorKind::Gnp { n: 48, p: 0.1 }, GenOptions::default(), 2)?;
    // the component of node 0 inside the first half of the nodes
    let half: Vec<bool> = (0..g.n()).map(|v| v < g.n() / 2).collect();
    let sub = Subgraph::induced(&g, &half, |_| true);
    let mut sim = Sim::new(&g, CongestConfig::default(), 5);
    let trees = build_bfs_tree(&mut sim, "tree", &sub, 0)?;
    let inside: Vec<bool> = trees.iter().map(Option::is_some).collect();

    let inputs: Vec<SearchInput> = (0..g.n())
        .map(|v| SearchInput {
            tree: trees[v].clone(),
            label: g.id(0),
            incident: if inside[v] {
                g.adj(v).iter().map(|a| (g.edge(a.edge).id, g.edge(a.edge).weight)).collect()
            } else {
                Vec::new()
            },
        })
        .collect();
    let leaving: Vec<_> = g.edges().iter().filter(|e| inside[e.u] != inside[e.v]).collect();
    let lightest = leaving.iter().min_by_key(|e| e.weight);

    let before = sim.metrics().clone();
    let any = find_any(&mut sim, "any", inputs.clone(), DEFAULT_REPETITION)?;
    let mid = sim.metrics().clone();
    let min = find_min(&mut sim, "min", inputs, DEFAULT_REPETITION)?;
    let any_cost = mid.since(&before);
    let min_cost = sim.metrics().since(&mid);

    println!("set of {} nodes, {} leaving edges", inside.iter().filter(|&&b| b).count(), leaving.len());
    println!("find_any -> {:?}  ({} rounds, {} messages)", any[0].1, any_cost.rounds, any_cost.messages);
    println!("find_min -> {:?}  ({} rounds, {} messages)", min[0].1, min_cost.rounds, min_cost.messages);
    println!("lightest by enumeration: {:?}", lightest.map(|e| (e.id, e.weight)));
    Ok(())
}
