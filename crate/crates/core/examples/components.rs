//! Connected components of a random edge subset, computed over a danner
//! and checked against BFS.

use congest_danner::danner::DannerParams;
use congest_danner::graph::{generate, oracle, GenOptions, GeneratorKind};
use congest_danner::mst::connected_components;
use congest_danner::CongestConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> congest_danner::Result<()> {
    let keep: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let g = generate(&GeneratorKind::Gnp { n: 160, p: 0.06 }, GenOptions::default(), 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let marks: Vec<bool> = (0..g.edges().len()).map(|_| rng.gen_bool(keep)).collect();
    let expected = oracle::components_where(&g, |e| marks[e]);

    for delta in [0.0, 0.25, 0.5] {
        let cc = connected_components(&g, &marks, DannerParams::with_delta(delta), 7, CongestConfig::default())?;
        println!(
            "delta={delta:<4} components={:<4} matches BFS: {:<5} merge phases={} rounds={} messages={}",
            cc.count(),
            cc.label == expected,
            cc.merge_phases,
            cc.metrics.rounds,
            cc.metrics.messages
        );
    }
    Ok(())
}
