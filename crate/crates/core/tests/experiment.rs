use congest_danner::experiment::{run_experiment, write_results, Algorithm, ExperimentSpec, GraphSource, VerifySetup};
use congest_danner::graph::{GenOptions, GeneratorKind};
use congest_danner::verify::Problem;

fn gnp(n: usize, p: f64) -> GraphSource {
    GraphSource::Generated {
        kind: GeneratorKind::Gnp { n, p },
        options: GenOptions::default(),
    }
}

fn jsonl(spec: &ExperimentSpec) -> Vec<String> {
    run_experiment(spec).unwrap().iter().map(|r| r.to_json()).collect()
}

#[test]
fn sweeps_are_reproducible() {
    for algorithm in [Algorithm::Danner, Algorithm::Mst, Algorithm::Components, Algorithm::Mincut] {
        let mut spec = ExperimentSpec::new(algorithm, gnp(40, 0.2));
        spec.deltas = vec![0.0, 0.5];
        spec.seeds = vec![1, 2];
        let a = jsonl(&spec);
        assert_eq!(a.len(), 4);
        assert_eq!(a, jsonl(&spec), "{}", algorithm.name());
    }
}

#[test]
fn each_seed_gets_its_own_graph() {
    let mut spec = ExperimentSpec::new(Algorithm::Danner, gnp(30, 0.2));
    spec.seeds = vec![0, 1];
    let records = run_experiment(&spec).unwrap();
    assert_ne!(records[0].m, records[1].m);
}

#[test]
fn results_directory_round_trips_the_config() {
    let dir = std::env::temp_dir().join(format!("congest-danner-test-{}", std::process::id()));
    let mut spec = ExperimentSpec::new(Algorithm::Verify, gnp(24, 0.25));
    spec.verify = Some(VerifySetup {
        problem: Problem::CycleContainment,
        marks: None,
        pair: None,
        edge: None,
    });
    spec.seeds = vec![3, 4, 5];
    let records = run_experiment(&spec).unwrap();
    write_results(&spec, &records, &dir).unwrap();

    let lines = std::fs::read_to_string(dir.join("records.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 3);
    let csv = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let config: ExperimentSpec =
        serde_json::from_str(&std::fs::read_to_string(dir.join("config.json")).unwrap()).unwrap();
    assert_eq!(config, spec);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn round_limit_turns_into_timeout_records() {
    let mut spec = ExperimentSpec::new(Algorithm::Mst, gnp(40, 0.2));
    spec.round_limit = 2;
    let records = run_experiment(&spec).unwrap();
    assert_eq!(records[0].status, "timeout");
    assert!(records[0].outcome.contains_key("timeout_phase"));
}

#[test]
fn out_of_range_delta_is_rejected_up_front() {
    let mut spec = ExperimentSpec::new(Algorithm::Mincut, gnp(20, 0.3));
    spec.deltas = vec![0.75];
    assert!(run_experiment(&spec).is_err());
    spec.algorithm = Algorithm::Danner;
    assert!(run_experiment(&spec).is_ok());
}
