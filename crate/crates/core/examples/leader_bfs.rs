//! Elects a leader on a torus, builds a BFS tree from it, and aggregates the
//! sum of all node degrees at the root. Prints the cost of each phase.

use congest_danner::congest::{Sim, Word};
use congest_danner::graph::{generate, oracle, GenOptions, GeneratorKind};
use congest_danner::primitives::{build_bfs_tree, elect_leader, pipelined_convergecast, Subgraph};
use congest_danner::CongestConfig;

fn main() -> congest_danner::Result<()> {
    let side: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let g = generate(&GeneratorKind::Torus { rows: side, cols: side }, GenOptions::default(), 1)?;
    let mut sim = Sim::new(&g, CongestConfig::default(), 1);
    let all = Subgraph::from_edges(&g, |_| true);

    let le = elect_leader(&mut sim, "leader", &all)?;
    let leader = le.leaders()[0];
    let root = g.index_of(leader).expect("leader is a node");
    let tree = build_bfs_tree(&mut sim, "bfs", &all, root)?;
    let depth = tree.iter().flatten().map(|t| t.depth).max().unwrap_or(0);

    let items = (0..g.n()).map(|v| vec![(0, Word::new(g.degree(v) as u64, 32))]).collect();
    let sums = pipelined_convergecast(&mut sim, "sum", &tree, items, |a, b| Word::new(a.value + b.value, 32), 1, None)?;

    println!("n={} D={:?} leader={} (smallest id {})", g.n(), oracle::diameter(&g), leader.0, g.ids().iter().min().unwrap().0);
    println!("tree depth {depth}, degree sum at root {}", sums[root][&0].value);
    for (phase, cost) in &sim.metrics().phases {
        println!("  {phase:<8} rounds={:<5} messages={}", cost.rounds, cost.messages);
    }
    Ok(())
}
