//! Distributed danner construction.
//!
//! 1. Every node becomes a center with probability `p = min(c ln n / n^delta, 1)`.
//! 2. Every node adds the edges to its `min(deg, ceil(n^delta))` lowest-id
//!    neighbors to `H`.
//! 3. Low-degree nodes (`deg < n^delta`) tell their neighbors whether they
//!    are centers, so everybody knows which neighbors lie in
//!    `V^ = V_high ∪ C`.
//! 4. For `ceil(log2 n)` iterations, each component of `H^ = H[V^]` elects a
//!    leader, finds some edge of `G^ = G[V^]` leaving it, adds that edge to
//!    `H`, and waits until `T` rounds of the iteration have passed.
//!
//! With `delta = 1` every node adds all incident edges and `H = G`.

use serde::{Deserialize, Serialize};

use crate::congest::{Ctx, Metrics, NodeProgram, Payload, Sim, Status, Widths};
use crate::error::{Error, Result};
use crate::graph::{log2_ceil, oracle, Graph, NodeId};
use crate::primitives::{elect_leader, Subgraph};
use crate::sketch::{run_search, SearchInput, SearchMode, SearchParams, DEFAULT_REPETITION};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DannerParams {
    pub delta: f64,
    /// Center-sampling constant.
    pub c: f64,
    /// Round budget constant: `T = c_t * n^(1-delta) * log2(n)^2`.
    pub c_t: f64,
    /// Amplification constant for leaving-edge searches.
    pub a: f64,
}

impl Default for DannerParams {
    fn default() -> Self {
        DannerParams {
            delta: 0.5,
            c: 2.0,
            c_t: 4.0,
            a: DEFAULT_REPETITION,
        }
    }
}

impl DannerParams {
    pub fn with_delta(delta: f64) -> Self {
        DannerParams {
            delta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::param("delta", "must lie in [0, 1]"));
        }
        if !(self.c >= 1.0) {
            return Err(Error::param("c", "must be at least 1"));
        }
        if !(self.c_t > 0.0) {
            return Err(Error::param("c_t", "must be positive"));
        }
        if !(self.a > 0.0) {
            return Err(Error::param("a", "must be positive"));
        }
        Ok(())
    }

    pub fn center_probability(&self, n: usize) -> f64 {
        let n = n.max(2) as f64;
        (self.c * n.ln() / n.powf(self.delta)).min(1.0)
    }

    /// `n^delta`; nodes with at least this degree are high-degree.
    pub fn degree_threshold(&self, n: usize) -> f64 {
        (n as f64).powf(self.delta)
    }

    /// Rounds per loop iteration.
    pub fn round_budget(&self, n: usize) -> u64 {
        let l = log2_ceil(n) as f64;
        (self.c_t * (n as f64).powf(1.0 - self.delta) * l * l).ceil() as u64
    }

    pub fn iterations(&self, n: usize) -> usize {
        log2_ceil(n) as usize
    }
}

/// Node roles and edge marks after the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DannerState {
    pub is_center: Vec<bool>,
    pub is_high: Vec<bool>,
    /// `V^ = V_high ∪ C`.
    pub in_hat: Vec<bool>,
    /// Per edge index: in `H`.
    pub h: Vec<bool>,
    /// Per node: label (minimum id) of its `H^` component at the end; `None` outside `V^`.
    pub component: Vec<Option<NodeId>>,
}

impl DannerState {
    /// Edge of `G^`: both endpoints in `V^`.
    pub fn in_g_hat(&self, g: &Graph, e: usize) -> bool {
        let edge = g.edge(e);
        self.in_hat[edge.u] && self.in_hat[edge.v]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DannerResult {
    pub params: DannerParams,
    pub state: DannerState,
    pub metrics: Metrics,
    /// `H` marks at the start of the loop and after every iteration.
    pub snapshots: Vec<Vec<bool>>,
    /// Number of `H^` components at each snapshot.
    pub component_count_trace: Vec<usize>,
    /// Iterations whose work exceeded the round budget.
    pub overruns: usize,
    pub round_budget: u64,
}

impl DannerResult {
    pub fn edge_count(&self) -> usize {
        self.state.h.iter().filter(|&&b| b).count()
    }

    pub fn h_edges(&self) -> Vec<usize> {
        (0..self.state.h.len()).filter(|&e| self.state.h[e]).collect()
    }

    /// Hop diameter of `H` (`None` if `H` is disconnected).
    pub fn realized_diameter(&self, g: &Graph) -> Option<u32> {
        oracle::diameter_where(g, |e| self.state.h[e])
    }

    pub fn is_spanning_connected(&self, g: &Graph) -> bool {
        oracle::component_count(&oracle::components_where(g, |e| self.state.h[e])) == 1
    }
}

#[derive(Clone, Debug)]
pub struct AnnounceMsg {
    pub low: bool,
    pub center: bool,
}

impl Payload for AnnounceMsg {
    fn bits(&self, _: &Widths) -> u64 {
        2
    }
}

/// Steps 2 and 3 in one round: a node messages each selected neighbor (all
/// neighbors if it is low-degree) with its degree class and center bit.
struct AnnounceNode {
    targets: Vec<NodeId>,
    msg: AnnounceMsg,
    heard: Vec<(NodeId, bool, bool)>,
    sent: bool,
}

impl NodeProgram for AnnounceNode {
    type Msg = AnnounceMsg;

    fn step(&mut self, ctx: &mut Ctx<'_, AnnounceMsg>) -> Status {
        if !self.sent {
            self.sent = true;
            for &t in &self.targets {
                ctx.send(t, self.msg.clone());
            }
        }
        for (src, m) in ctx.inbox() {
            self.heard.push((*src, m.low, m.center));
        }
        Status::Idle
    }
}

/// Builds a danner in a fresh simulation.
pub fn build_danner(g: &Graph, params: DannerParams, seed: u64, cfg: crate::CongestConfig) -> Result<DannerResult> {
    let mut sim = Sim::new(g, cfg, seed);
    let mut res = build_danner_in(&mut sim, params)?;
    res.metrics = sim.into_metrics();
    Ok(res)
}

/// Builds a danner inside an existing simulation; phase labels start with `danner/`.
///
/// The returned `metrics` cover only this construction.
pub fn build_danner_in(sim: &mut Sim<'_>, params: DannerParams) -> Result<DannerResult> {
    params.validate()?;
    let g = sim.graph();
    let n = g.n();
    if n > 1 && !oracle::is_connected(g) {
        return Err(Error::Disconnected);
    }
    let before = sim.metrics().clone();
    let budget = params.round_budget(n);

    if params.delta >= 1.0 {
        sim.idle("danner/local", 1);
        let state = DannerState {
            is_center: vec![false; n],
            is_high: vec![false; n],
            in_hat: vec![false; n],
            h: vec![true; g.simple_m()],
            component: vec![None; n],
        };
        return Ok(DannerResult {
            params,
            snapshots: vec![state.h.clone()],
            component_count_trace: vec![0],
            state,
            metrics: sim.metrics().since(&before),
            overruns: 0,
            round_budget: budget,
        });
    }

    // Step 1 and the local part of Step 2.
    let p = params.center_probability(n);
    let threshold = params.degree_threshold(n);
    let quota = threshold.ceil() as usize;
    let is_center: Vec<bool> = {
        let mut coins = Vec::with_capacity(n);
        let programs: Vec<CoinNode> = sim.programs(|_, _| CoinNode { p, heads: false });
        for c in sim.run("danner/local", programs)? {
            coins.push(c.heads);
        }
        coins
    };
    let is_high: Vec<bool> = (0..n).map(|v| g.degree(v) as f64 >= threshold).collect();

    let programs: Vec<AnnounceNode> = sim.programs(|v, k| {
        let take = if is_high[v] { quota.min(k.degree()) } else { k.degree() };
        AnnounceNode {
            targets: k.neighbors()[..take].iter().map(|x| x.id).collect(),
            msg: AnnounceMsg {
                low: !is_high[v],
                center: is_center[v],
            },
            heard: Vec::new(),
            sent: false,
        }
    });
    let programs = sim.run("danner/announce", programs)?;

    let mut h = vec![false; g.simple_m()];
    // A neighbor that stayed silent is high-degree (low nodes message everyone).
    let mut nbr_in_hat: Vec<Vec<bool>> = (0..n).map(|v| vec![true; g.degree(v)]).collect();
    for (v, prog) in programs.iter().enumerate() {
        for &t in &prog.targets {
            h[g.edge_index(crate::EdgeId::new(g.id(v), t)).unwrap()] = true;
        }
        for &(src, low, center) in &prog.heard {
            let e = g.edge_index(crate::EdgeId::new(g.id(v), src)).unwrap();
            h[e] = true;
            let pos = g.adj(v).iter().position(|a| a.edge == e).unwrap();
            nbr_in_hat[v][pos] = !low || center;
        }
    }
    let in_hat: Vec<bool> = (0..n).map(|v| is_high[v] || is_center[v]).collect();
    debug_assert!((0..n).all(|v| g.adj(v).iter().enumerate().all(|(i, a)| nbr_in_hat[v][i] == in_hat[a.nbr])));

    // Step 4.
    let ghat = |e: usize| in_hat[g.edge(e).u] && in_hat[g.edge(e).v];
    let search_params = SearchParams::new(SearchMode::Any, n, params.a).with_probe(true);
    let mut snapshots = vec![h.clone()];
    let mut trace = vec![hat_components(g, &in_hat, &h)];
    let mut overruns = 0;
    let mut component = vec![None; n];

    for _ in 0..params.iterations(n) {
        let start = sim.metrics().rounds;
        let hhat = Subgraph::induced(g, &in_hat, |e| h[e]);
        let le = elect_leader(sim, "danner/leader", &hhat)?;
        component = le.component_min.clone();
        let inputs: Vec<SearchInput> = (0..n)
            .map(|v| SearchInput {
                tree: le.trees[v].clone(),
                label: le.component_min[v].unwrap_or(g.id(v)),
                incident: if in_hat[v] {
                    g.adj(v)
                        .iter()
                        .filter(|a| ghat(a.edge))
                        .map(|a| (g.edge(a.edge).id, g.edge(a.edge).weight))
                        .collect()
                } else {
                    Vec::new()
                },
            })
            .collect();
        let nodes = run_search(sim, "danner/search", inputs, search_params)?;
        for node in &nodes {
            for link in node.links() {
                h[g.edge_index(link.edge).unwrap()] = true;
            }
        }
        let used = sim.metrics().rounds - start;
        if used > budget {
            overruns += 1;
        } else {
            sim.idle("danner/pad", budget - used);
        }
        snapshots.push(h.clone());
        trace.push(hat_components(g, &in_hat, &h));
    }

    Ok(DannerResult {
        params,
        state: DannerState {
            is_center,
            is_high,
            in_hat,
            h,
            component,
        },
        metrics: sim.metrics().since(&before),
        snapshots,
        component_count_trace: trace,
        overruns,
        round_budget: budget,
    })
}

struct CoinNode {
    p: f64,
    heads: bool,
}

#[derive(Clone, Debug)]
enum Never {}

impl Payload for Never {
    fn bits(&self, _: &Widths) -> u64 {
        match *self {}
    }
}

impl NodeProgram for CoinNode {
    type Msg = Never;

    fn step(&mut self, ctx: &mut Ctx<'_, Never>) -> Status {
        use rand::Rng;
        self.heads = ctx.rng().gen_bool(self.p);
        Status::Idle
    }
}

/// Components of `H^` over the nodes of `V^`.
fn hat_components(g: &Graph, in_hat: &[bool], h: &[bool]) -> usize {
    let labels = oracle::components_where(g, |e| h[e] && in_hat[g.edge(e).u] && in_hat[g.edge(e).v]);
    let mut hat: Vec<NodeId> = (0..g.n()).filter(|&v| in_hat[v]).map(|v| labels[v]).collect();
    hat.sort();
    hat.dedup();
    hat.len()
}

/// Per `G^` component: counts of `H^` components inside it at each snapshot.
pub fn component_trace(g: &Graph, res: &DannerResult) -> Vec<Vec<usize>> {
    let st = &res.state;
    let glabels = oracle::components_where(g, |e| st.in_g_hat(g, e));
    let mut groups: Vec<NodeId> = (0..g.n()).filter(|&v| st.in_hat[v]).map(|v| glabels[v]).collect();
    groups.sort();
    groups.dedup();
    groups
        .iter()
        .map(|&k| {
            res.snapshots
                .iter()
                .map(|h| {
                    let labels = oracle::components_where(g, |e| h[e] && st.in_g_hat(g, e));
                    let mut inside: Vec<NodeId> = (0..g.n())
                        .filter(|&v| st.in_hat[v] && glabels[v] == k)
                        .map(|v| labels[v])
                        .collect();
                    inside.sort();
                    inside.dedup();
                    inside.len()
                })
                .collect()
        })
        .collect()
}

/// Each iteration at least halves the `H^` component count inside every
/// `G^` component until one is left.
pub fn component_trace_check(g: &Graph, res: &DannerResult) -> bool {
    component_trace(g, res)
        .iter()
        .all(|counts| counts.windows(2).all(|w| w[1] <= (w[0] / 2).max(1)))
}

/// At every snapshot, the centers of each `H^` component dominate it via `H^`
/// edges, and the component's diameter is below `3 * #centers`.
pub fn domination_audit(g: &Graph, res: &DannerResult) -> bool {
    let st = &res.state;
    for h in &res.snapshots {
        let keep = |e: usize| h[e] && st.in_g_hat(g, e);
        let labels = oracle::components_where(g, keep);
        let dominated = (0..g.n()).filter(|&v| st.in_hat[v]).all(|v| {
            st.is_center[v] || g.adj(v).iter().any(|a| keep(a.edge) && st.is_center[a.nbr])
        });
        if !dominated {
            return false;
        }
        let mut comps: Vec<NodeId> = (0..g.n()).filter(|&v| st.in_hat[v]).map(|v| labels[v]).collect();
        comps.sort();
        comps.dedup();
        for k in comps {
            let members: Vec<usize> = (0..g.n()).filter(|&v| st.in_hat[v] && labels[v] == k).collect();
            let centers = members.iter().filter(|&&v| st.is_center[v]).count();
            match oracle::induced_diameter(g, &members, keep) {
                Some(d) if (d as usize) < 3 * centers.max(1) || members.len() == 1 => {}
                _ => return false,
            }
        }
    }
    true
}
