//! Builds danners of a random graph for a range of delta values and prints
//! their size, diameter and metered cost.

use congest_danner::danner::{build_danner, component_trace_check, domination_audit, DannerParams};
use congest_danner::graph::{generate, oracle, GenOptions, GeneratorKind};
use congest_danner::CongestConfig;

fn main() -> congest_danner::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(256);
    let p: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let g = generate(&GeneratorKind::Gnp { n, p }, GenOptions::default(), 7)?;
    println!("n={} m={} D={:?}", g.n(), g.m(), oracle::diameter(&g));
    println!("delta  |H|  diam(H)  rounds  messages  overruns  halving  domination");
    for delta in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let t = std::time::Instant::now();
        let res = build_danner(&g, DannerParams::with_delta(delta), 1, CongestConfig::default())?;
        println!(
            "{delta:<5}  {:<4} {:<8} {:<7} {:<9} {:<9} {:<8} {}   ({:?})",
            res.edge_count(),
            res.realized_diameter(&g).map_or("inf".into(), |d| d.to_string()),
            res.metrics.rounds,
            res.metrics.messages,
            res.overruns,
            component_trace_check(&g, &res),
            domination_audit(&g, &res),
            t.elapsed()
        );
        if std::env::var("PHASES").is_ok() {
            for (label, cost) in &res.metrics.phases {
                println!("    {label:<16} rounds {:<8} messages {}", cost.rounds, cost.messages);
            }
        }
    }
    Ok(())
}
