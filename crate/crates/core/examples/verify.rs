//! Runs every verification problem on one marked subgraph and compares the
//! distributed verdict with the centralized one.

use congest_danner::danner::DannerParams;
use congest_danner::graph::{generate, GenOptions, GeneratorKind};
use congest_danner::verify::{oracle_verdict, verify, Instance, Problem};
use congest_danner::CongestConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> congest_danner::Result<()> {
    let g = generate(&GeneratorKind::Geometric { n: 64, radius: 0.25 }, GenOptions::default(), 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let marks: Vec<bool> = (0..g.edges().len()).map(|_| rng.gen_bool(0.7)).collect();
    println!("n={} m={} marked={}", g.n(), g.edges().len(), marks.iter().filter(|&&b| b).count());
    for problem in Problem::ALL {
        let inst = Instance {
            problem,
            marks: marks.clone(),
            pair: Some((0, g.n() - 1)),
            edge: Some(0),
        };
        let got = verify(&g, &inst, DannerParams::with_delta(0.25), 9, CongestConfig::default())?;
        println!(
            "{:<28} {:<5} (oracle {:<5}) rounds={:<7} messages={}",
            problem.name(),
            got.holds,
            oracle_verdict(&g, &inst)?,
            got.metrics.rounds,
            got.metrics.messages
        );
    }
    Ok(())
}
