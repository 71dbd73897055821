//! Estimates edge connectivity on a few graphs with known min cuts and
//! prints the ratio of estimate to the exact value.

use congest_danner::graph::{generate, oracle, GenOptions, GeneratorKind};
use congest_danner::mincut::{approx_mincut, MincutParams};
use congest_danner::CongestConfig;

fn main() -> congest_danner::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let multi = GenOptions {
        multiplicity: 5,
        ..GenOptions::default()
    };
    let cases = [
        ("cycle32", GeneratorKind::Cycle { n: 32 }, GenOptions::default()),
        ("k16", GeneratorKind::Complete { n: 16 }, GenOptions::default()),
        ("barbell(8,4)", GeneratorKind::Barbell { k: 8, bridges: 4 }, GenOptions::default()),
        ("cycle8x5", GeneratorKind::Cycle { n: 8 }, multi),
    ];
    for (name, kind, opts) in cases {
        let g = generate(&kind, opts, 0)?;
        let lambda = oracle::mincut(&g)?;
        let mut ratios = Vec::new();
        let mut rounds = 0;
        let mut messages = 0;
        for seed in 0..seeds {
            let res = approx_mincut(&g, MincutParams::with_delta(0.5), seed, CongestConfig::default())?;
            let est = res.estimate.unwrap_or(0);
            ratios.push(est as f64 / lambda as f64);
            rounds = rounds.max(res.metrics.rounds);
            messages = messages.max(res.metrics.messages);
        }
        ratios.sort_by(f64::total_cmp);
        println!(
            "{name:<13} lambda={lambda:<3} ratio min={:.3} median={:.3} max={:.3}  max rounds={rounds} max messages={messages}",
            ratios[0],
            ratios[ratios.len() / 2],
            ratios[ratios.len() - 1]
        );
    }
    Ok(())
}
