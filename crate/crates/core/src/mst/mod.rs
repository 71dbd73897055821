//! Minimum spanning tree and connected components on top of a danner.
//!
//! 1. Build a danner, elect a leader on it and count `m` over the leader's
//!    tree; the count picks the dense or the sparse branch.
//! 2. Grow fragments locally for `ceil((1 - delta) log2 n)` iterations, each
//!    fragment searching only over its own tree.
//! 3. Merge the remaining fragments through the danner tree: per-fragment
//!    searches are pipelined to the root, which merges centrally.
//!
//! The dense branch finds edges with hash-parity searches (messages scale
//! with `n`), the sparse branch by exchanging labels with every neighbor
//! (messages scale with `m`).

mod backbone;
mod ghs;
mod global;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use backbone::Backbone;
pub use ghs::{controlled_ghs, Growth};
pub use global::{merge_phases, phase_cap, Down};

use crate::congest::{CongestConfig, Metrics, Payload, Sim, Widths};
use crate::danner::DannerParams;
use crate::error::{Error, Result};
use crate::graph::{log2_ceil, oracle, EdgeId, Graph, NodeId};
use crate::primitives::{broadcast, elect_leader, pipelined_convergecast, Subgraph};
use crate::sketch::SearchMode;

/// Edges a search may use.
#[derive(Clone, Copy, Debug)]
pub enum Ambient<'a> {
    All,
    /// Only edges with a set mark (indexed like `Graph::edges`).
    Marked(&'a [bool]),
}

impl Ambient<'_> {
    pub fn admits(&self, e: usize) -> bool {
        match self {
            Ambient::All => true,
            Ambient::Marked(m) => m[e],
        }
    }
}

/// Per-node fragment labels plus the fragment edges found so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentMap {
    /// Minimum id in the node's fragment.
    pub label: Vec<NodeId>,
    /// Per edge of the graph.
    pub edges: Vec<bool>,
    /// The fragment is known to have no outgoing ambient edge.
    pub retired: Vec<bool>,
}

impl FragmentMap {
    pub fn singletons(g: &Graph) -> Self {
        FragmentMap {
            label: g.ids().to_vec(),
            edges: vec![false; g.edges().len()],
            retired: vec![false; g.n()],
        }
    }

    pub fn count(&self) -> usize {
        let mut l = self.label.clone();
        l.sort();
        l.dedup();
        l.len()
    }

    pub fn edge_list(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e]).collect()
    }

    /// Largest diameter of a fragment tree (computed centrally).
    pub fn max_diameter(&self, g: &Graph) -> u32 {
        let mut groups: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
        for (v, l) in self.label.iter().enumerate() {
            groups.entry(*l).or_default().push(v);
        }
        groups
            .values()
            .map(|members| oracle::induced_diameter(g, members, |e| self.edges[e]).unwrap_or(u32::MAX))
            .max()
            .unwrap_or(0)
    }
}

/// A fragment's candidate outgoing edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cand {
    pub weight: u64,
    pub edge: EdgeId,
    /// Label on the far side.
    pub far: NodeId,
}

impl Cand {
    pub fn min(a: &Cand, b: &Cand) -> Cand {
        if (b.weight, b.edge) < (a.weight, a.edge) {
            *b
        } else {
            *a
        }
    }
}

/// An edge taken by a fragment; `snapshot` indexes the label vector in
/// force when the fragment searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adoption {
    pub edge: usize,
    pub fragment: NodeId,
    pub snapshot: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdoptionLog {
    pub adoptions: Vec<Adoption>,
    pub snapshots: Vec<Vec<NodeId>>,
}

impl AdoptionLog {
    pub fn snapshot(&mut self, labels: &[NodeId]) -> usize {
        if self.snapshots.last().map(Vec::as_slice) != Some(labels) {
            self.snapshots.push(labels.to_vec());
        }
        self.snapshots.len() - 1
    }

    pub fn adopt(&mut self, edge: usize, fragment: NodeId, snapshot: usize) {
        self.adoptions.push(Adoption {
            edge,
            fragment,
            snapshot,
        });
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Dense,
    Sparse,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MstParams {
    pub danner: DannerParams,
    /// Skip the edge count and take this branch.
    pub force_branch: Option<Branch>,
}

impl MstParams {
    pub fn with_delta(delta: f64) -> Self {
        MstParams {
            danner: DannerParams::with_delta(delta),
            force_branch: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.danner.validate()?;
        if self.danner.delta > 0.5 {
            return Err(Error::param("delta", "must be in [0, 0.5]"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct MstResult {
    /// Edge indices, sorted.
    pub edges: Vec<usize>,
    pub metrics: Metrics,
    pub branch: Branch,
    /// Edge count learnt by the leader.
    pub m: u64,
    pub log: AdoptionLog,
    pub fragments_after_growth: usize,
    pub fragment_diameter: u32,
    pub merge_phases: usize,
    /// The final distributed check saw one component with `n - 1` edges.
    pub verified: bool,
}

impl MstResult {
    pub fn total_weight(&self, g: &Graph) -> u64 {
        self.edges.iter().map(|&e| g.edge(e).weight).sum()
    }

    pub fn matches_oracle(&self, g: &Graph) -> bool {
        match oracle::mst(g) {
            Ok(mut want) => {
                want.sort();
                want == self.edges
            }
            Err(_) => false,
        }
    }
}

/// A tree sum; values fit in `2 log n + 2` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Count(u64);

impl Payload for Count {
    fn bits(&self, w: &Widths) -> u64 {
        2 * w.log_n as u64 + 2
    }
}

fn add(a: &Count, b: &Count) -> Count {
    Count(a.0 + b.0)
}

/// Sums one value per node at the backbone root.
pub(crate) fn sum_at_root(sim: &mut Sim<'_>, phase: &str, backbone: &Backbone, values: &[u64]) -> Result<u64> {
    let items = values.iter().map(|&x| vec![(0, Count(x))]).collect();
    let out = pipelined_convergecast(sim, phase, &backbone.tree, items, add, 0, Some(1))?;
    Ok(out[backbone.root].get(&0).map_or(0, |c| c.0))
}

fn growth_iterations(n: usize, delta: f64) -> usize {
    ((1.0 - delta) * log2_ceil(n) as f64).ceil().max(0.0) as usize
}

/// Computes the MST of a connected graph with distinct weights.
pub fn mst(g: &Graph, params: MstParams, seed: u64, cfg: CongestConfig) -> Result<MstResult> {
    params.validate()?;
    if !oracle::is_connected(g) {
        return Err(Error::Disconnected);
    }
    if !g.has_distinct_weights() {
        return Err(Error::DuplicateWeights);
    }
    let mut sim = Sim::new(g, cfg, seed);
    mst_in(&mut sim, params)
}

pub fn mst_in(sim: &mut Sim<'_>, params: MstParams) -> Result<MstResult> {
    let g = sim.graph();
    let n = g.n();
    let start = sim.metrics().clone();
    let backbone = Backbone::build(sim, params.danner)?;

    // m from the degree sum, then the leader broadcasts the branch
    let degrees: Vec<u64> = (0..n).map(|v| g.degree(v) as u64).collect();
    let m = sum_at_root(sim, "mst/count", &backbone, &degrees)? / 2;
    let delta = params.danner.delta;
    let dense = (m as f64) > (n as f64).powf(1.0 + delta);
    let branch = params
        .force_branch
        .unwrap_or(if dense { Branch::Dense } else { Branch::Sparse });
    let mut root_values = vec![None; n];
    root_values[backbone.root] = Some(crate::congest::Word::new(u64::from(branch == Branch::Dense), 1));
    broadcast(sim, "mst/branch", &backbone.tree, root_values)?;

    let mut fm = FragmentMap::singletons(g);
    let mut log = AdoptionLog::default();
    let a = params.danner.a;
    let (growth, iters) = match branch {
        Branch::Dense => (
            Growth::Sketch {
                mode: SearchMode::Min,
                ambient: Ambient::All,
                a,
            },
            growth_iterations(n, delta),
        ),
        Branch::Sparse => (Growth::Exchange, growth_iterations(n, 0.5)),
    };
    controlled_ghs(sim, "ghs", &mut fm, iters, growth, &mut log)?;
    let fragments_after_growth = fm.count();
    let fragment_diameter = fm.max_diameter(g);
    let merge_phases = merge_phases(sim, &backbone, &mut fm, growth, &mut log)?;

    // final check: one component of fragment edges, n - 1 of them
    let sub = Subgraph::from_edges(g, |e| fm.edges[e]);
    let le = elect_leader(sim, "mst/check", &sub)?;
    let local: Vec<u64> = (0..n)
        .map(|v| g.adj(v).iter().filter(|x| fm.edges[x.edge]).count() as u64)
        .collect();
    let edge_ends = sum_at_root(sim, "mst/check/edges", &backbone, &local)?;
    let leaders: Vec<u64> = (0..n).map(|v| u64::from(le.leader[v] == Some(g.id(v)))).collect();
    let leader_count = sum_at_root(sim, "mst/check/leaders", &backbone, &leaders)?;
    let verified = leader_count == 1 && edge_ends == 2 * (n as u64 - 1);

    Ok(MstResult {
        edges: fm.edge_list(),
        metrics: sim.metrics().since(&start),
        branch,
        m,
        log,
        fragments_after_growth,
        fragment_diameter,
        merge_phases,
        verified,
    })
}

/// Checks every adoption against the cut property: the adopted edge must be
/// the lightest edge leaving the fragment as it stood at search time.
/// Returns the offending adoptions.
pub fn cut_property_audit(g: &Graph, log: &AdoptionLog) -> Vec<Adoption> {
    let mut bad = Vec::new();
    for a in &log.adoptions {
        let labels = &log.snapshots[a.snapshot];
        let lightest = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                let (lu, lv) = (labels[e.u], labels[e.v]);
                lu != lv && (lu == a.fragment || lv == a.fragment)
            })
            .min_by_key(|(_, e)| (e.weight, e.id))
            .map(|(i, _)| i);
        if lightest != Some(a.edge) {
            bad.push(*a);
        }
    }
    bad
}

/// Component labels (minimum id) of the subgraph given by `marks`.
#[derive(Clone, Debug)]
pub struct Components {
    pub label: Vec<NodeId>,
    pub metrics: Metrics,
    pub merge_phases: usize,
}

impl Components {
    pub fn count(&self) -> usize {
        let mut l = self.label.clone();
        l.sort();
        l.dedup();
        l.len()
    }
}

/// Components of the marked subgraph, using an existing backbone. Edges of
/// weight 0 (marked) are searched with `Any`; fragments that detect nothing
/// leave the computation.
pub fn components_on(sim: &mut Sim<'_>, backbone: &Backbone, marks: &[bool], a: f64) -> Result<Components> {
    let g = sim.graph();
    if marks.len() != g.edges().len() {
        return Err(Error::param("marks", "one mark per edge expected"));
    }
    let start = sim.metrics().clone();
    let delta = backbone.danner.params.delta.min(0.5);
    let mut fm = FragmentMap::singletons(g);
    let mut log = AdoptionLog::default();
    let growth = Growth::Sketch {
        mode: SearchMode::Any,
        ambient: Ambient::Marked(marks),
        a,
    };
    controlled_ghs(sim, "cc/ghs", &mut fm, growth_iterations(g.n(), delta), growth, &mut log)?;
    let merge_phases = merge_phases(sim, backbone, &mut fm, growth, &mut log)?;
    Ok(Components {
        label: fm.label,
        metrics: sim.metrics().since(&start),
        merge_phases,
    })
}

/// Components of the subgraph given by `marks` (the graph itself must be
/// connected: the backbone spans it).
pub fn connected_components(
    g: &Graph,
    marks: &[bool],
    params: DannerParams,
    seed: u64,
    cfg: CongestConfig,
) -> Result<Components> {
    params.validate()?;
    if params.delta > 0.5 {
        return Err(Error::param("delta", "must be in [0, 0.5]"));
    }
    if !oracle::is_connected(g) {
        return Err(Error::Disconnected);
    }
    let mut sim = Sim::new(g, cfg, seed);
    let backbone = Backbone::build(&mut sim, params)?;
    let mut cc = components_on(&mut sim, &backbone, marks, params.a)?;
    cc.metrics = sim.into_metrics();
    Ok(cc)
}
