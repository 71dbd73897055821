//! Computes the MST of a random graph for several delta values, checks it
//! against Kruskal and prints the metered cost per step.

use congest_danner::graph::{generate, oracle, GenOptions, GeneratorKind};
use congest_danner::mst::{cut_property_audit, mst, MstParams};
use congest_danner::CongestConfig;

fn main() -> congest_danner::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    let p: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let g = generate(&GeneratorKind::Gnp { n, p }, GenOptions::default(), 3)?;
    println!("n={} m={} D={:?}", g.n(), g.m(), oracle::diameter(&g));
    for delta in [0.0, 0.25, 0.5] {
        let t = std::time::Instant::now();
        let res = mst(&g, MstParams::with_delta(delta), 1, CongestConfig::default())?;
        println!(
            "delta={delta:<4} branch={:?} weight={} kruskal={} audit_ok={} fragments={} (diam {}) phases={} rounds={} messages={} ({:?})",
            res.branch,
            res.total_weight(&g),
            res.matches_oracle(&g),
            cut_property_audit(&g, &res.log).is_empty(),
            res.fragments_after_growth,
            res.fragment_diameter,
            res.merge_phases,
            res.metrics.rounds,
            res.metrics.messages,
            t.elapsed()
        );
        for step in ["danner", "backbone", "mst/", "ghs", "merge"] {
            let c = res.metrics.phase_prefix(step);
            println!("    {step:<10} rounds {:<8} messages {}", c.rounds, c.messages);
        }
    }
    Ok(())
}
