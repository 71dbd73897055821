//! Sweeps over graphs, delta values and seeds with one record per cell.
//!
//! Records are JSON objects with fixed key order; a cell's record depends
//! only on the spec and the cell's seed.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::congest::{derive_seed, CongestConfig, Metrics, DEFAULT_KAPPA, DEFAULT_ROUND_LIMIT};
use crate::danner::{build_danner, DannerParams};
use crate::error::{Error, Result};
use crate::graph::{generate, oracle, read_graph, GenOptions, GeneratorKind, Graph};
use crate::mincut::{approx_mincut, MincutParams};
use crate::mst::{connected_components, cut_property_audit, mst, MstParams};
use crate::verify::{oracle_verdict, verify, Instance, Problem};

/// Graphs above this size skip the exact min-cut oracle.
pub const MINCUT_ORACLE_LIMIT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Danner,
    Mst,
    Components,
    Mincut,
    Verify,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Danner => "danner",
            Algorithm::Mst => "mst",
            Algorithm::Components => "components",
            Algorithm::Mincut => "mincut",
            Algorithm::Verify => "verify",
        }
    }

    pub fn max_delta(self) -> f64 {
        match self {
            Algorithm::Danner => 1.0,
            _ => 0.5,
        }
    }

    /// Grid used by a sweep when no deltas are given.
    pub fn default_deltas(self) -> Vec<f64> {
        match self {
            Algorithm::Danner => vec![0.0, 0.25, 0.5, 0.75, 1.0],
            _ => vec![0.0, 0.25, 0.5],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    /// Regenerated for every seed.
    Generated { kind: GeneratorKind, options: GenOptions },
    File { path: PathBuf },
}

/// Every tunable constant, with the defaults of the modules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Center sampling.
    pub c: f64,
    /// Danner round budget.
    pub c_t: f64,
    /// Search repetitions per `log2 n`.
    pub a: f64,
    /// Blocks of `log2 n` bits per message.
    pub kappa: u32,
    /// Edge sampling for min-cut.
    pub c_s: f64,
    /// Hash independence per `log2 n` for min-cut.
    pub c_h: f64,
}

impl Default for Constants {
    fn default() -> Self {
        let d = DannerParams::default();
        let m = MincutParams::default();
        Constants {
            c: d.c,
            c_t: d.c_t,
            a: d.a,
            kappa: DEFAULT_KAPPA,
            c_s: m.c_s,
            c_h: m.c_h,
        }
    }
}

impl Constants {
    pub fn danner(&self, delta: f64) -> DannerParams {
        DannerParams {
            delta,
            c: self.c,
            c_t: self.c_t,
            a: self.a,
        }
    }
}

/// What the verify cells check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySetup {
    pub problem: Problem,
    /// Fixed marks as node-index pairs; random marks when absent.
    pub marks: Option<Vec<(usize, usize)>>,
    pub pair: Option<(usize, usize)>,
    pub edge: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub source: GraphSource,
    pub deltas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub constants: Constants,
    pub round_limit: u64,
    /// Probability of marking an edge when marks are random.
    pub mark_probability: f64,
    pub verify: Option<VerifySetup>,
}

impl ExperimentSpec {
    pub fn new(algorithm: Algorithm, source: GraphSource) -> Self {
        ExperimentSpec {
            algorithm,
            source,
            deltas: vec![0.5],
            seeds: vec![0],
            constants: Constants::default(),
            round_limit: DEFAULT_ROUND_LIMIT,
            mark_probability: 0.5,
            verify: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::param("seeds", "at least one seed is required"));
        }
        if self.deltas.is_empty() {
            return Err(Error::param("delta", "at least one value is required"));
        }
        let max = self.algorithm.max_delta();
        if let Some(d) = self.deltas.iter().find(|d| !(0.0..=max).contains(*d)) {
            return Err(Error::param(
                "delta",
                format!("{d} outside [0, {max}] for {}", self.algorithm.name()),
            ));
        }
        if !(0.0..=1.0).contains(&self.mark_probability) {
            return Err(Error::param("mark_probability", "must be in [0, 1]"));
        }
        if self.algorithm == Algorithm::Verify && self.verify.is_none() {
            return Err(Error::param("problem", "verify needs a problem"));
        }
        if self.round_limit == 0 {
            return Err(Error::param("round_limit", "must be positive"));
        }
        self.constants.danner(0.0).validate()?;
        if self.constants.kappa == 0 {
            return Err(Error::param("kappa", "must be positive"));
        }
        Ok(())
    }

    pub fn congest_config(&self) -> CongestConfig {
        CongestConfig {
            kappa: self.constants.kappa,
            round_limit: self.round_limit,
        }
    }

    /// The effective configuration, as written by `--print-config`.
    pub fn config_json(&self) -> Value {
        serde_json::to_value(self).expect("spec serializes")
    }

    pub fn graph_for(&self, seed: u64) -> Result<Graph> {
        match &self.source {
            GraphSource::Generated { kind, options } => generate(kind, *options, seed),
            GraphSource::File { path } => read_graph(&std::fs::read_to_string(path)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub algorithm: Algorithm,
    pub n: usize,
    pub m: u64,
    #[serde(rename = "D")]
    pub diameter: Option<u32>,
    pub delta: f64,
    pub seed: u64,
    /// `ok`, `timeout` or `error`.
    pub status: String,
    pub rounds: u64,
    pub messages: u64,
    pub outcome: Map<String, Value>,
}

impl Record {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

/// Runs every cell in order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<Record>> {
    spec.validate()?;
    let mut out = Vec::new();
    for &seed in &spec.seeds {
        let g = spec.graph_for(seed)?;
        for &delta in &spec.deltas {
            out.push(run_cell(spec, &g, delta, seed)?);
        }
    }
    Ok(out)
}

/// Writes `records.jsonl`, `summary.csv` and `config.json` into `dir`.
pub fn write_results(spec: &ExperimentSpec, records: &[Record], dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut jsonl = String::new();
    for r in records {
        jsonl.push_str(&r.to_json());
        jsonl.push('\n');
    }
    std::fs::write(dir.join("records.jsonl"), jsonl)?;
    std::fs::write(dir.join("summary.csv"), summary_csv(records))?;
    std::fs::write(
        dir.join("config.json"),
        serde_json::to_string_pretty(&spec.config_json())? + "\n",
    )?;
    Ok(())
}

/// One row per record; outcome fields become columns (scalars only).
pub fn summary_csv(records: &[Record]) -> String {
    let mut keys: Vec<String> = Vec::new();
    for r in records {
        for (k, v) in &r.outcome {
            if !v.is_array() && !v.is_object() && !keys.contains(k) {
                keys.push(k.clone());
            }
        }
    }
    let mut out = String::from("algorithm,n,m,D,delta,seed,status,rounds,messages");
    for k in &keys {
        write!(out, ",{k}").unwrap();
    }
    out.push('\n');
    for r in records {
        write!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.algorithm.name(),
            r.n,
            r.m,
            r.diameter.map_or(String::new(), |d| d.to_string()),
            r.delta,
            r.seed,
            r.status,
            r.rounds,
            r.messages
        )
        .unwrap();
        for k in &keys {
            let cell = match r.outcome.get(k) {
                Some(Value::String(s)) => s.clone(),
                Some(Value::Null) | None => String::new(),
                Some(v) => v.to_string(),
            };
            write!(out, ",{cell}").unwrap();
        }
        out.push('\n');
    }
    out
}

fn random_marks(g: &Graph, p: f64, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x6d61726b));
    (0..g.edges().len()).map(|_| rng.gen_bool(p)).collect()
}

fn edge_index(g: &Graph, (a, b): (usize, usize)) -> Result<usize> {
    if a >= g.n() || b >= g.n() {
        return Err(Error::param("edge", format!("node index out of range in ({a}, {b})")));
    }
    g.edge_index(crate::graph::EdgeId::new(g.id(a), g.id(b)))
        .ok_or_else(|| Error::param("edge", format!("({a}, {b}) is not an edge")))
}

fn instance(spec: &ExperimentSpec, g: &Graph, seed: u64) -> Result<Instance> {
    let setup = spec.verify.as_ref().expect("validated");
    let marks = match &setup.marks {
        Some(pairs) => {
            let mut m = vec![false; g.edges().len()];
            for &p in pairs {
                m[edge_index(g, p)?] = true;
            }
            m
        }
        None => random_marks(g, spec.mark_probability, seed),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x696e7374));
    let pair = setup
        .pair
        .unwrap_or_else(|| (rng.gen_range(0..g.n()), rng.gen_range(0..g.n())));
    let edge = match setup.edge {
        Some(p) => edge_index(g, p)?,
        None => rng.gen_range(0..g.edges().len().max(1)),
    };
    Ok(Instance {
        problem: setup.problem,
        marks,
        pair: Some(pair),
        edge: (!g.edges().is_empty()).then_some(edge),
    })
}

/// Runs one cell; protocol timeouts and failures become records.
pub fn run_cell(spec: &ExperimentSpec, g: &Graph, delta: f64, seed: u64) -> Result<Record> {
    let cfg = spec.congest_config();
    let consts = spec.constants;
    let mut outcome = Map::new();
    let result: Result<Metrics> = (|| match spec.algorithm {
        Algorithm::Danner => {
            let res = build_danner(g, consts.danner(delta), seed, cfg)?;
            outcome.insert("h_edges".into(), json!(res.edge_count()));
            outcome.insert("diam_h".into(), json!(res.realized_diameter(g)));
            outcome.insert("spanning_connected".into(), json!(res.is_spanning_connected(g)));
            outcome.insert("h_equals_g".into(), json!(res.edge_count() == g.edges().len()));
            outcome.insert("overruns".into(), json!(res.overruns));
            outcome.insert("round_budget".into(), json!(res.round_budget));
            outcome.insert("components_trace".into(), json!(res.component_count_trace));
            Ok(res.metrics)
        }
        Algorithm::Mst => {
            let params = MstParams {
                danner: consts.danner(delta),
                force_branch: None,
            };
            let res = mst(g, params, seed, cfg)?;
            outcome.insert("branch".into(), json!(res.branch));
            outcome.insert("weight_total".into(), json!(res.total_weight(g)));
            outcome.insert("oracle_match".into(), json!(res.matches_oracle(g)));
            outcome.insert("audit_ok".into(), json!(cut_property_audit(g, &res.log).is_empty()));
            outcome.insert("verified".into(), json!(res.verified));
            outcome.insert("fragments_after_growth".into(), json!(res.fragments_after_growth));
            outcome.insert("fragment_diameter".into(), json!(res.fragment_diameter));
            outcome.insert("merge_phases".into(), json!(res.merge_phases));
            Ok(res.metrics)
        }
        Algorithm::Components => {
            let marks = random_marks(g, spec.mark_probability, seed);
            let res = connected_components(g, &marks, consts.danner(delta), seed, cfg)?;
            let want = oracle::components_where(g, |e| marks[e]);
            outcome.insert("components".into(), json!(res.count()));
            outcome.insert("oracle_match".into(), json!(res.label == want));
            Ok(res.metrics)
        }
        Algorithm::Mincut => {
            let params = MincutParams {
                danner: consts.danner(delta),
                c_s: consts.c_s,
                c_h: consts.c_h,
            };
            let res = approx_mincut(g, params, seed, cfg)?;
            let lambda = if g.n() <= MINCUT_ORACLE_LIMIT {
                Some(oracle::mincut(g)?)
            } else {
                None
            };
            outcome.insert("lambda_oracle".into(), json!(lambda));
            outcome.insert("estimate".into(), json!(res.estimate));
            outcome.insert("trials".into(), serde_json::to_value(&res.trials)?);
            Ok(res.metrics)
        }
        Algorithm::Verify => {
            let inst = instance(spec, g, seed)?;
            let res = verify(g, &inst, consts.danner(delta), seed, cfg)?;
            outcome.insert("problem".into(), json!(inst.problem));
            outcome.insert("verdict".into(), json!(res.holds));
            outcome.insert("oracle".into(), json!(oracle_verdict(g, &inst)?));
            Ok(res.metrics)
        }
    })();
    let (status, metrics) = match result {
        Ok(m) => ("ok", m),
        Err(Error::Timeout { partial, phase, .. }) => {
            outcome.insert("timeout_phase".into(), json!(phase));
            ("timeout", *partial)
        }
        Err(Error::ProtocolFailure(reason)) => {
            outcome.insert("failure".into(), json!(reason));
            ("error", Metrics::default())
        }
        Err(e) => return Err(e),
    };
    Ok(Record {
        algorithm: spec.algorithm,
        n: g.n(),
        m: g.m(),
        diameter: oracle::diameter(g),
        delta,
        seed,
        status: status.into(),
        rounds: metrics.rounds,
        messages: metrics.messages,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ExperimentSpec {
        ExperimentSpec::new(
            Algorithm::Danner,
            GraphSource::Generated {
                kind: GeneratorKind::Cycle { n: 8 },
                options: GenOptions::default(),
            },
        )
    }

    #[test]
    fn empty_seed_list_is_rejected() {
        let mut s = spec();
        s.seeds.clear();
        match s.validate() {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "seeds"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn delta_ranges_depend_on_algorithm() {
        let mut s = spec();
        s.deltas = vec![1.0];
        assert!(s.validate().is_ok());
        s.algorithm = Algorithm::Mst;
        assert!(s.validate().is_err());
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let mut s = spec();
        s.seeds = vec![1, 2];
        s.deltas = vec![0.5, 1.0];
        let records = run_experiment(&s).unwrap();
        let csv = summary_csv(&records);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("algorithm,n,m,D,delta,seed,status,rounds,messages,diam_h,h_edges"));
    }
}
