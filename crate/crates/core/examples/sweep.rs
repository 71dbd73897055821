//! A small experiment grid written to a results directory, the same layout
//! the command-line tool produces.

use congest_danner::experiment::{run_experiment, summary_csv, write_results, Algorithm, ExperimentSpec, GraphSource};
use congest_danner::graph::{GenOptions, GeneratorKind};

fn main() -> congest_danner::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "sweep-results".into());
    let mut spec = ExperimentSpec::new(
        Algorithm::Mst,
        GraphSource::Generated {
            kind: GeneratorKind::Gnp { n: 96, p: 0.15 },
            options: GenOptions::default(),
        },
    );
    spec.deltas = Algorithm::Mst.default_deltas();
    spec.seeds = (0..3).collect();
    let records = run_experiment(&spec)?;
    write_results(&spec, &records, std::path::Path::new(&out))?;
    print!("{}", summary_csv(&records));
    eprintln!("wrote {} records to {out}/", records.len());
    Ok(())
}
