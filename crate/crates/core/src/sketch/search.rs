//! Distributed TestOut / FindAny / FindMin over rooted component trees.
//!
//! The root of each tree drives a sequence of waves. A wave tells every node
//! which query is current; each node XORs the hash bits of its admitted
//! incident edges, and the XOR is convergecast back to the root.
//!
//! * Detect: `r` independent specs, no restriction (an `r`-bit answer).
//! * Weight search (FindMin): binary search for the smallest `w` such that
//!   some spec detects a leaving edge of weight `<= w`.
//! * Id search: with one spec `j` whose parity is 1 on the current range,
//!   halve the range of edge encodings. The parity of the upper half equals
//!   `1 xor` the lower half's, so the lower half alone decides the
//!   direction, and a single-encoding range with parity 1 is certainly a
//!   leaving edge.
//!
//! Nodes replay the root's decisions, so a wave's downward message is only
//! the previous answer bit.

use rand::Rng;

use super::{HashSpec, Restriction};
use crate::congest::{Ctx, NodeProgram, Payload, Sim, Status, Widths};
use crate::error::{Error, Result};
use crate::graph::{log2_ceil, EdgeId, NodeId};
use crate::primitives::LocalTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Only report whether a leaving edge exists.
    Test,
    /// Find some leaving edge.
    Any,
    /// Find the lightest leaving edge.
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchParams {
    pub mode: SearchMode,
    /// Independent specs per detection test (at most 64).
    pub repetitions: usize,
    /// Hash independence of each spec.
    pub independence: usize,
    /// After a find, the inside endpoint exchanges component labels with the
    /// outside endpoint.
    pub probe: bool,
}

impl SearchParams {
    /// `max(ceil(a * log2 n), MIN_REPETITIONS)` repetitions of
    /// pairwise-independent specs.
    pub fn new(mode: SearchMode, n: usize, a: f64) -> Self {
        let r = (a * log2_ceil(n) as f64).ceil() as usize;
        SearchParams {
            mode,
            repetitions: r.clamp(super::MIN_REPETITIONS, 64),
            independence: 2,
            probe: false,
        }
    }

    pub fn with_probe(mut self, probe: bool) -> Self {
        self.probe = probe;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(1..=64).contains(&self.repetitions) {
            return Err(Error::param("repetitions", "must be in 1..=64"));
        }
        if self.independence == 0 {
            return Err(Error::param("independence", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// No leaving edge was detected.
    Nothing,
    /// A leaving edge exists (test mode).
    Detected,
    Edge(EdgeId),
}

/// An edge chosen by a search and confirmed across by a probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Link {
    pub edge: EdgeId,
    /// Label of the component on the far side.
    pub far_label: NodeId,
    /// This endpoint's component chose the edge.
    pub chosen_here: bool,
}

#[derive(Clone, Debug)]
pub enum SearchMsg {
    Start { specs: Vec<HashSpec> },
    Next { bit: bool, spec: Option<u8> },
    Finish { outcome: SearchOutcome },
    Parity { value: u64, width: u32 },
    Probe { label: NodeId },
    ProbeAck { label: NodeId },
}

impl Payload for SearchMsg {
    fn bits(&self, w: &Widths) -> u64 {
        3 + match self {
            SearchMsg::Start { specs } => specs.iter().map(HashSpec::bits).sum(),
            SearchMsg::Next { spec, .. } => 1 + spec.map_or(0, |_| 6),
            SearchMsg::Finish { outcome } => {
                2 + match outcome {
                    SearchOutcome::Edge(_) => w.edge(),
                    _ => 0,
                }
            }
            SearchMsg::Parity { width, .. } => *width as u64,
            SearchMsg::Probe { .. } | SearchMsg::ProbeAck { .. } => w.id as u64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Detect,
    Weight { lo: u64, hi: u64 },
    Id { spec: u32, lo: u64, hi: u64, max_w: Option<u64> },
    Done,
}

fn mid(lo: u64, hi: u64) -> u64 {
    lo + (hi - lo) / 2
}

/// What the controller does after a wave's answer is complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Finish(SearchOutcome),
    /// Broadcast the answer bit (and, when the id search starts, the spec
    /// index) to open the next wave.
    Next { bit: bool, spec: Option<u8> },
}

/// The search state of one component, replayed identically by every member
/// and by the controller.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cursor {
    mode: SearchMode,
    stage: Stage,
    id_bits: u32,
    max_code: u64,
    max_weight: u64,
    mask_hi: u64,
    repetitions: u32,
}

impl Cursor {
    pub fn new(mode: SearchMode, widths: &Widths, repetitions: usize) -> Self {
        let id_bits = widths.id;
        Cursor {
            mode,
            stage: Stage::Detect,
            id_bits,
            max_code: if 2 * id_bits >= 64 { u64::MAX } else { (1u64 << (2 * id_bits)) - 1 },
            max_weight: if widths.weight >= 64 { u64::MAX } else { (1u64 << widths.weight) - 1 },
            mask_hi: 0,
            repetitions: repetitions as u32,
        }
    }

    pub fn is_done(&self) -> bool {
        self.stage == Stage::Done
    }

    pub fn finish(&mut self) {
        self.stage = Stage::Done;
    }

    fn restriction(&self) -> (Restriction, Option<u32>) {
        match self.stage {
            Stage::Detect | Stage::Done => (Restriction::default(), None),
            Stage::Weight { lo, hi } => (
                Restriction {
                    id_range: None,
                    max_weight: Some(mid(lo, hi)),
                },
                None,
            ),
            Stage::Id { spec, lo, hi, max_w } => (
                Restriction {
                    id_range: Some((lo, mid(lo, hi))),
                    max_weight: max_w,
                },
                Some(spec),
            ),
        }
    }

    /// This node's contribution to the current query: XOR of the spec masks
    /// of admitted edges, given as `(code, weight, mask)`.
    pub fn parity(&self, edges: impl IntoIterator<Item = (u64, u64, u64)>) -> u64 {
        let (r, spec) = self.restriction();
        let acc = edges
            .into_iter()
            .filter(|&(code, w, _)| r.admits(code, w))
            .fold(0u64, |acc, (_, _, m)| acc ^ m);
        match spec {
            Some(j) => (acc >> j) & 1,
            None => acc,
        }
    }

    /// Bits in the current answer.
    pub fn answer_width(&self) -> u32 {
        match self.stage {
            Stage::Id { .. } => 1,
            _ => self.repetitions,
        }
    }

    /// Applies a broadcast decision (members).
    pub fn advance(&mut self, bit: bool, spec: Option<u8>) {
        let max_code = self.max_code;
        let id_stage = |spec: Option<u8>, max_w| Stage::Id {
            spec: spec.expect("id search needs a spec") as u32,
            lo: 0,
            hi: max_code,
            max_w,
        };
        let weight_stage = |lo: u64, hi: u64, spec| {
            if lo == hi {
                id_stage(spec, Some(lo))
            } else {
                Stage::Weight { lo, hi }
            }
        };
        self.stage = match self.stage {
            Stage::Detect => match self.mode {
                SearchMode::Min => weight_stage(0, self.max_weight, spec),
                _ => id_stage(spec, None),
            },
            Stage::Weight { lo, hi } => {
                let m = mid(lo, hi);
                if bit {
                    weight_stage(lo, m, spec)
                } else {
                    weight_stage(m + 1, hi, spec)
                }
            }
            Stage::Id { spec, lo, hi, max_w } => {
                let m = mid(lo, hi);
                let (lo, hi) = if bit { (lo, m) } else { (m + 1, hi) };
                Stage::Id { spec, lo, hi, max_w }
            }
            Stage::Done => Stage::Done,
        };
    }

    /// Controller: consumes the complete answer `v` of the current wave.
    pub fn decide(&mut self, v: u64) -> Decision {
        let first = |m: u64| Some(m.trailing_zeros() as u8);
        let (bit, spec) = match self.stage {
            Stage::Detect => {
                if v == 0 {
                    self.stage = Stage::Done;
                    return Decision::Finish(SearchOutcome::Nothing);
                }
                if self.mode == SearchMode::Test {
                    self.stage = Stage::Done;
                    return Decision::Finish(SearchOutcome::Detected);
                }
                self.mask_hi = v;
                (true, first(v))
            }
            Stage::Weight { .. } => {
                if v != 0 {
                    self.mask_hi = v;
                }
                (v != 0, first(self.mask_hi))
            }
            Stage::Id { .. } => (v & 1 == 1, None),
            Stage::Done => return Decision::Finish(SearchOutcome::Nothing),
        };
        let was_id = matches!(self.stage, Stage::Id { .. });
        self.advance(bit, spec);
        if let Stage::Id { lo, hi, .. } = self.stage {
            if lo == hi {
                self.stage = Stage::Done;
                return Decision::Finish(SearchOutcome::Edge(EdgeId::decode(lo, self.id_bits)));
            }
        }
        let spec = if !was_id && matches!(self.stage, Stage::Id { .. }) { spec } else { None };
        Decision::Next { bit, spec }
    }
}

/// Hash bits of `code` under each spec, packed LSB first.
pub fn spec_mask(specs: &[HashSpec], code: u64) -> u64 {
    specs
        .iter()
        .enumerate()
        .fold(0u64, |m, (j, s)| m | (u64::from(s.bit(code)) << j))
}

/// Per-node input to a search.
#[derive(Clone, Debug)]
pub struct SearchInput {
    pub tree: Option<LocalTree>,
    /// Component label carried by probes.
    pub label: NodeId,
    /// Ambient incident edges with their weights.
    pub incident: Vec<(EdgeId, u64)>,
}

#[derive(Clone, Debug)]
pub struct SearchNode {
    me: NodeId,
    input: SearchInput,
    params: SearchParams,
    preset: Option<Vec<HashSpec>>,
    codes: Vec<u64>,
    masks: Vec<u64>,
    cursor: Cursor,
    waiting: usize,
    acc: u64,
    started: bool,
    outcome: Option<SearchOutcome>,
    links: Vec<Link>,
}

impl SearchNode {
    pub fn new(me: NodeId, widths: &Widths, input: SearchInput, params: SearchParams) -> Self {
        let codes = input.incident.iter().map(|(e, _)| e.encode(widths.id)).collect();
        SearchNode {
            me,
            params,
            preset: None,
            codes,
            masks: Vec::new(),
            cursor: Cursor::new(params.mode, widths, params.repetitions),
            waiting: 0,
            acc: 0,
            started: false,
            outcome: None,
            links: Vec::new(),
            input,
        }
    }

    /// Use these specs at the root instead of drawing fresh ones.
    pub fn with_specs(mut self, specs: Vec<HashSpec>) -> Self {
        self.preset = Some(specs);
        self
    }

    pub fn outcome(&self) -> Option<SearchOutcome> {
        self.outcome
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    fn install(&mut self, specs: &[HashSpec]) {
        self.masks = self.codes.iter().map(|&c| spec_mask(specs, c)).collect();
    }

    fn local_parity(&self) -> u64 {
        let edges = (0..self.codes.len()).map(|i| (self.codes[i], self.input.incident[i].1, self.masks[i]));
        self.cursor.parity(edges)
    }

    fn children(&self) -> &[NodeId] {
        self.input.tree.as_ref().map_or(&[], |t| &t.children)
    }

    fn to_children(&self, msg: &SearchMsg, ctx: &mut Ctx<'_, SearchMsg>) {
        for &c in self.children() {
            ctx.send(c, msg.clone());
        }
    }

    /// Starts the current wave locally: own parity, wait for children.
    fn open_wave(&mut self) {
        self.acc = self.local_parity();
        self.waiting = self.children().len();
    }

    fn finish(&mut self, outcome: SearchOutcome, ctx: &mut Ctx<'_, SearchMsg>) {
        self.outcome = Some(outcome);
        self.cursor.finish();
        self.to_children(&SearchMsg::Finish { outcome }, ctx);
        self.probe(ctx);
    }

    fn probe(&mut self, ctx: &mut Ctx<'_, SearchMsg>) {
        if let (true, Some(SearchOutcome::Edge(e))) = (self.params.probe, self.outcome) {
            if e.contains(self.me) {
                ctx.send(e.other(self.me), SearchMsg::Probe { label: self.input.label });
            }
        }
    }

    /// Root: the current wave's answer is complete. Decides and opens the
    /// next wave; loops without communication when the tree is a single node.
    fn decide(&mut self, ctx: &mut Ctx<'_, SearchMsg>) {
        loop {
            match self.cursor.decide(self.acc) {
                Decision::Finish(outcome) => return self.finish(outcome, ctx),
                Decision::Next { bit, spec } => {
                    self.to_children(&SearchMsg::Next { bit, spec }, ctx);
                    self.open_wave();
                    if self.waiting > 0 {
                        return;
                    }
                }
            }
        }
    }

    fn report(&mut self, ctx: &mut Ctx<'_, SearchMsg>) {
        let Some(parent) = self.input.tree.as_ref().and_then(|t| t.parent) else {
            return self.decide(ctx);
        };
        let width = self.cursor.answer_width();
        ctx.send(parent, SearchMsg::Parity { value: self.acc, width });
    }
}

impl NodeProgram for SearchNode {
    type Msg = SearchMsg;

    fn step(&mut self, ctx: &mut Ctx<'_, SearchMsg>) -> Status {
        let is_root = self.input.tree.as_ref().is_some_and(|t| t.is_root());
        if is_root && !self.started {
            self.started = true;
            let specs = match self.preset.take() {
                Some(s) => s,
                None => {
                    let k = self.params.independence;
                    (0..self.params.repetitions).map(|_| HashSpec::random(ctx.rng(), k)).collect()
                }
            };
            self.install(&specs);
            self.to_children(&SearchMsg::Start { specs }, ctx);
            self.open_wave();
            if self.waiting == 0 {
                self.decide(ctx);
            }
        }
        for (src, msg) in ctx.inbox() {
            match msg {
                SearchMsg::Start { specs } => {
                    self.install(specs);
                    self.to_children(msg, ctx);
                    self.open_wave();
                    if self.waiting == 0 {
                        self.report(ctx);
                    }
                }
                SearchMsg::Next { bit, spec } => {
                    self.cursor.advance(*bit, *spec);
                    self.to_children(msg, ctx);
                    self.open_wave();
                    if self.waiting == 0 {
                        self.report(ctx);
                    }
                }
                SearchMsg::Parity { value, .. } => {
                    self.acc ^= value;
                    self.waiting -= 1;
                    if self.waiting == 0 {
                        self.report(ctx);
                    }
                }
                SearchMsg::Finish { outcome } => {
                    self.outcome = Some(*outcome);
                    self.cursor.finish();
                    self.to_children(msg, ctx);
                    self.probe(ctx);
                }
                SearchMsg::Probe { label } => {
                    self.links.push(Link {
                        edge: EdgeId::new(self.me, *src),
                        far_label: *label,
                        chosen_here: false,
                    });
                    ctx.send(*src, SearchMsg::ProbeAck { label: self.input.label });
                }
                SearchMsg::ProbeAck { label } => {
                    self.links.push(Link {
                        edge: EdgeId::new(self.me, *src),
                        far_label: *label,
                        chosen_here: true,
                    });
                }
            }
        }
        Status::Idle
    }
}

/// Runs one search per tree in parallel. `inputs` is indexed like the graph's nodes.
pub fn run_search(
    sim: &mut Sim<'_>,
    phase: &str,
    inputs: Vec<SearchInput>,
    params: SearchParams,
) -> Result<Vec<SearchNode>> {
    params.validate()?;
    let widths = sim.widths();
    let ids = sim.graph().ids().to_vec();
    let programs = inputs
        .into_iter()
        .enumerate()
        .map(|(v, input)| SearchNode::new(ids[v], &widths, input, params))
        .collect();
    sim.run(phase, programs)
}

fn root_outcomes(nodes: &[SearchNode]) -> Vec<(NodeId, SearchOutcome)> {
    nodes
        .iter()
        .filter(|p| p.input.tree.as_ref().is_some_and(|t| t.is_root()))
        .map(|p| (p.me, p.outcome.unwrap_or(SearchOutcome::Nothing)))
        .collect()
}

/// Parity of `spec` over edges leaving each tree, as learnt by each root.
pub fn test_out(
    sim: &mut Sim<'_>,
    phase: &str,
    inputs: Vec<SearchInput>,
    spec: &HashSpec,
) -> Result<Vec<(NodeId, bool)>> {
    let params = SearchParams {
        mode: SearchMode::Test,
        repetitions: 1,
        independence: spec.independence(),
        probe: false,
    };
    let widths = sim.widths();
    let ids = sim.graph().ids().to_vec();
    let programs = inputs
        .into_iter()
        .enumerate()
        .map(|(v, input)| SearchNode::new(ids[v], &widths, input, params).with_specs(vec![spec.clone()]))
        .collect();
    let nodes = sim.run(phase, programs)?;
    Ok(root_outcomes(&nodes)
        .into_iter()
        .map(|(r, o)| (r, o == SearchOutcome::Detected))
        .collect())
}

/// Some leaving edge per tree (keyed by root), `None` when none is detected.
pub fn find_any(
    sim: &mut Sim<'_>,
    phase: &str,
    inputs: Vec<SearchInput>,
    repetition: f64,
) -> Result<Vec<(NodeId, Option<EdgeId>)>> {
    let params = SearchParams::new(SearchMode::Any, sim.graph().n(), repetition);
    let nodes = run_search(sim, phase, inputs, params)?;
    Ok(edges_of(&nodes))
}

/// The lightest leaving edge per tree (keyed by root), w.h.p.
pub fn find_min(
    sim: &mut Sim<'_>,
    phase: &str,
    inputs: Vec<SearchInput>,
    repetition: f64,
) -> Result<Vec<(NodeId, Option<EdgeId>)>> {
    let params = SearchParams::new(SearchMode::Min, sim.graph().n(), repetition);
    let nodes = run_search(sim, phase, inputs, params)?;
    Ok(edges_of(&nodes))
}

fn edges_of(nodes: &[SearchNode]) -> Vec<(NodeId, Option<EdgeId>)> {
    root_outcomes(nodes)
        .into_iter()
        .map(|(r, o)| {
            (
                r,
                match o {
                    SearchOutcome::Edge(e) => Some(e),
                    _ => None,
                },
            )
        })
        .collect()
}

/// Draws `r` specs of independence `k`; used by callers that share specs.
pub fn random_specs<R: Rng + ?Sized>(rng: &mut R, r: usize, k: usize) -> Vec<HashSpec> {
    (0..r).map(|_| HashSpec::random(rng, k)).collect()
}
