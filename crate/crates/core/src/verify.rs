//! Graph verification problems reduced to connected components.
//!
//! Each problem runs one components computation on a marked subgraph
//! and aggregates a count or the labels of designated nodes at the
//! backbone root, which then broadcasts the verdict.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::congest::{CongestConfig, Metrics, Sim, Word};
use crate::danner::{DannerParams, DannerResult, DannerState};
use crate::error::{Error, Result};
use crate::graph::{oracle, EdgeId, Graph, NodeId};
use crate::mst::{components_on, sum_at_root, Backbone, Components};
use crate::primitives::{broadcast, pipelined_convergecast};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    SpanningConnectedSubgraph,
    CycleContainment,
    ECycleContainment,
    Cut,
    StConnectivity,
    EdgeOnAllPaths,
    StCut,
    Bipartiteness,
}

impl Problem {
    pub const ALL: [Problem; 8] = [
        Problem::SpanningConnectedSubgraph,
        Problem::CycleContainment,
        Problem::ECycleContainment,
        Problem::Cut,
        Problem::StConnectivity,
        Problem::EdgeOnAllPaths,
        Problem::StCut,
        Problem::Bipartiteness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::SpanningConnectedSubgraph => "spanning_connected_subgraph",
            Problem::CycleContainment => "cycle_containment",
            Problem::ECycleContainment => "e_cycle_containment",
            Problem::Cut => "cut",
            Problem::StConnectivity => "s_t_connectivity",
            Problem::EdgeOnAllPaths => "edge_on_all_paths",
            Problem::StCut => "s_t_cut",
            Problem::Bipartiteness => "bipartiteness",
        }
    }

    fn needs_pair(self) -> bool {
        matches!(self, Problem::StConnectivity | Problem::EdgeOnAllPaths | Problem::StCut)
    }

    fn needs_edge(self) -> bool {
        matches!(self, Problem::ECycleContainment | Problem::EdgeOnAllPaths)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("problem", format!("unknown problem `{s}`")))
    }
}

/// A problem together with its input. `marks` is the subgraph `H` (or the
/// edge set `E'` for the cut problems), one flag per edge of the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub problem: Problem,
    pub marks: Vec<bool>,
    /// Node indices `s`, `t` (or `u`, `v`).
    pub pair: Option<(usize, usize)>,
    /// Edge index `e`.
    pub edge: Option<usize>,
}

impl Instance {
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.marks.len() != g.edges().len() {
            return Err(Error::param("marks", "one mark per edge expected"));
        }
        if self.problem.needs_pair() {
            match self.pair {
                Some((s, t)) if s < g.n() && t < g.n() => {}
                Some(_) => return Err(Error::param("pair", "node out of range")),
                None => return Err(Error::param("pair", format!("{} needs two nodes", self.problem))),
            }
        }
        if self.problem.needs_edge() {
            match self.edge {
                Some(e) if e < g.edges().len() => {}
                Some(_) => return Err(Error::param("edge", "edge out of range")),
                None => return Err(Error::param("edge", format!("{} needs an edge", self.problem))),
            }
        }
        Ok(())
    }

    /// `H` without the designated edge.
    fn marks_without_edge(&self) -> Vec<bool> {
        let mut m = self.marks.clone();
        if let Some(e) = self.edge {
            m[e] = false;
        }
        m
    }

    /// `G` without the marked edges.
    fn complement(&self) -> Vec<bool> {
        self.marks.iter().map(|b| !b).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub holds: bool,
    pub metrics: Metrics,
}

/// Decides the instance distributively.
pub fn verify(g: &Graph, inst: &Instance, params: DannerParams, seed: u64, cfg: CongestConfig) -> Result<Verdict> {
    params.validate()?;
    if params.delta > 0.5 {
        return Err(Error::param("delta", "must be in [0, 0.5]"));
    }
    inst.validate(g)?;
    if !oracle::is_connected(g) {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let mut sim = Sim::new(g, cfg, seed);
    let backbone = Backbone::build(&mut sim, params)?;
    let a = params.a;
    let mut extra = Metrics::default();

    let holds = match inst.problem {
        Problem::SpanningConnectedSubgraph => {
            let cc = components_on(&mut sim, &backbone, &inst.marks, a)?;
            count_components(&mut sim, &backbone, &cc)? == 1
        }
        Problem::Cut => {
            let cc = components_on(&mut sim, &backbone, &inst.complement(), a)?;
            count_components(&mut sim, &backbone, &cc)? > 1
        }
        Problem::CycleContainment => {
            let cc = components_on(&mut sim, &backbone, &inst.marks, a)?;
            let c = count_components(&mut sim, &backbone, &cc)?;
            let ends: Vec<u64> = (0..n)
                .map(|v| g.adj(v).iter().filter(|x| inst.marks[x.edge]).count() as u64)
                .collect();
            let m_h = sum_at_root(&mut sim, "verify/edges", &backbone, &ends)? / 2;
            m_h + c > n as u64
        }
        Problem::StConnectivity => {
            let (s, t) = inst.pair.unwrap();
            let cc = components_on(&mut sim, &backbone, &inst.marks, a)?;
            let (ls, lt) = labels_at_root(&mut sim, &backbone, &cc, s, t)?;
            ls == lt
        }
        Problem::StCut => {
            let (s, t) = inst.pair.unwrap();
            let cc = components_on(&mut sim, &backbone, &inst.complement(), a)?;
            let (ls, lt) = labels_at_root(&mut sim, &backbone, &cc, s, t)?;
            ls != lt
        }
        Problem::EdgeOnAllPaths => {
            let (u, v) = inst.pair.unwrap();
            let cc = components_on(&mut sim, &backbone, &inst.marks_without_edge(), a)?;
            let (lu, lv) = labels_at_root(&mut sim, &backbone, &cc, u, v)?;
            lu != lv
        }
        Problem::ECycleContainment => {
            let e = inst.edge.unwrap();
            let (u, v) = (g.edge(e).u, g.edge(e).v);
            let cc = components_on(&mut sim, &backbone, &inst.marks_without_edge(), a)?;
            let (lu, lv) = labels_at_root(&mut sim, &backbone, &cc, u, v)?;
            // the endpoints know whether e itself is marked
            inst.marks[e] && lu == lv
        }
        Problem::Bipartiteness => {
            let cc = components_on(&mut sim, &backbone, &inst.marks, a)?;
            let c = count_components(&mut sim, &backbone, &cc)?;
            let (cover, marks) = double_cover(g, &inst.marks)?;
            let mut csim = Sim::new(&cover, cfg, crate::congest::derive_seed(seed, 2));
            let cbackbone = Backbone::on_danner(&mut csim, lift_danner(g, &backbone.danner, &cover))?;
            let ccc = components_on(&mut csim, &cbackbone, &marks, a)?;
            let cc2 = count_components(&mut csim, &cbackbone, &ccc)?;
            extra.absorb("cover", csim.metrics());
            cc2 == 2 * c
        }
    };
    let mut root_values = vec![None; n];
    root_values[backbone.root] = Some(Word::new(u64::from(holds), 1));
    broadcast(&mut sim, "verify/verdict", &backbone.tree, root_values)?;
    let mut metrics = sim.into_metrics();
    metrics.absorb("", &extra);
    Ok(Verdict { holds, metrics })
}

/// Number of distinct labels, counted at the root as nodes holding their own id.
fn count_components(sim: &mut Sim<'_>, backbone: &Backbone, cc: &Components) -> Result<u64> {
    let g = sim.graph();
    let own: Vec<u64> = (0..g.n()).map(|v| u64::from(cc.label[v] == g.id(v))).collect();
    sum_at_root(sim, "verify/count", backbone, &own)
}

fn keep_first(a: &Word, _: &Word) -> Word {
    *a
}

/// The two designated nodes send their labels to the root.
fn labels_at_root(sim: &mut Sim<'_>, backbone: &Backbone, cc: &Components, s: usize, t: usize) -> Result<(NodeId, NodeId)> {
    let g = sim.graph();
    let bits = sim.widths().id;
    let items: Vec<Vec<(u64, Word)>> = (0..g.n())
        .map(|v| {
            let mut out = Vec::new();
            if v == s {
                out.push((0, Word::new(cc.label[v].0, bits)));
            }
            if v == t {
                out.push((1, Word::new(cc.label[v].0, bits)));
            }
            out
        })
        .collect();
    let got = pipelined_convergecast(sim, "verify/labels", &backbone.tree, items, keep_first, 1, Some(2))?;
    let at = &got[backbone.root];
    Ok((NodeId(at[&0].value), NodeId(at[&1].value)))
}

/// The bipartite double cover: node `v` becomes `v0` (id `2 id - 1`) and
/// `v1` (id `2 id`); an edge `{u, v}` becomes `{u0, v1}` and `{u1, v0}`.
/// Each `{v0, v1}` pair is joined by an unmarked edge standing for the
/// node itself, so the cover is connected whenever `g` is. Returns the
/// cover and its marks (the images of marked edges).
pub fn double_cover(g: &Graph, marks: &[bool]) -> Result<(Graph, Vec<bool>)> {
    let n = g.n();
    let ids: Vec<NodeId> = (0..2 * n)
        .map(|x| {
            let id = g.id(x / 2).0;
            NodeId(2 * id - 1 + (x % 2) as u64)
        })
        .collect();
    let mut edges = Vec::new();
    let mut flag = Vec::new();
    for v in 0..n {
        edges.push((2 * v, 2 * v + 1, 1, 1));
        flag.push(false);
    }
    for (i, e) in g.edges().iter().enumerate() {
        edges.push((2 * e.u, 2 * e.v + 1, 1, 1));
        edges.push((2 * e.u + 1, 2 * e.v, 1, 1));
        flag.extend([marks[i], marks[i]]);
    }
    let cover = Graph::with_id_space(ids, edges.iter().copied(), 2 * g.id_space())?;
    // map flags onto the cover's edge order
    let mut cover_marks = vec![false; cover.edges().len()];
    for (k, &(a, b, _, _)) in edges.iter().enumerate() {
        let id = crate::graph::EdgeId::new(cover.id(a), cover.id(b));
        cover_marks[cover.edge_index(id).unwrap()] = flag[k];
    }
    Ok((cover, cover_marks))
}

/// Lifts a danner of `g` to its double cover: both images of every `H`
/// edge plus every vertical edge. Each node derives its part locally, and
/// the lift has diameter at most `diam(H) + 1`.
fn lift_danner(g: &Graph, danner: &DannerResult, cover: &Graph) -> DannerResult {
    let h = cover
        .edges()
        .iter()
        .map(|e| {
            let (u, v) = (e.u / 2, e.v / 2);
            u == v || danner.state.h[g.edge_index(EdgeId::new(g.id(u), g.id(v))).expect("image of an edge")]
        })
        .collect();
    let twice = |x: &[bool]| x.iter().flat_map(|&b| [b, b]).collect::<Vec<bool>>();
    DannerResult {
        params: danner.params,
        state: DannerState {
            is_center: twice(&danner.state.is_center),
            is_high: twice(&danner.state.is_high),
            in_hat: twice(&danner.state.in_hat),
            h,
            component: vec![None; cover.n()],
        },
        metrics: Metrics::default(),
        snapshots: Vec::new(),
        component_count_trace: Vec::new(),
        overruns: 0,
        round_budget: 0,
    }
}

/// Centralized answer used as the reference.
pub fn oracle_verdict(g: &Graph, inst: &Instance) -> Result<bool> {
    inst.validate(g)?;
    let marks = &inst.marks;
    let count = |keep: &[bool]| oracle::component_count(&oracle::components_where(g, |e| keep[e]));
    let same = |keep: &[bool], a: usize, b: usize| {
        let l = oracle::components_where(g, |e| keep[e]);
        l[a] == l[b]
    };
    Ok(match inst.problem {
        Problem::SpanningConnectedSubgraph => count(marks) == 1,
        Problem::Cut => count(&inst.complement()) > count(&vec![true; marks.len()]),
        Problem::CycleContainment => {
            // a marked edge closing a cycle joins two already connected nodes
            let mut dsu = oracle::Dsu::new(g.n());
            g.edges()
                .iter()
                .enumerate()
                .any(|(i, e)| marks[i] && !dsu.union(e.u, e.v))
        }
        Problem::StConnectivity => {
            let (s, t) = inst.pair.unwrap();
            same(marks, s, t)
        }
        Problem::StCut => {
            let (s, t) = inst.pair.unwrap();
            !same(&inst.complement(), s, t)
        }
        Problem::EdgeOnAllPaths => {
            let (u, v) = inst.pair.unwrap();
            !same(&inst.marks_without_edge(), u, v)
        }
        Problem::ECycleContainment => {
            let e = inst.edge.unwrap();
            marks[e] && same(&inst.marks_without_edge(), g.edge(e).u, g.edge(e).v)
        }
        Problem::Bipartiteness => oracle::bipartite_where(g, |e| marks[e]).bipartite,
    })
}
