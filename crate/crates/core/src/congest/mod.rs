//! Synchronous CONGEST round engine with KT1 initial knowledge.
//!
//! Every node runs a [`NodeProgram`]. In round `r` a node sees the messages
//! its neighbors sent in round `r - 1` (sorted by sender id) and may send at
//! most what it likes to each neighbor; each message is metered as
//! `ceil(bits / B)` CONGEST messages with `B = kappa * ceil(log2 n)`.
//!
//! A node that returns [`Status::Idle`] is only stepped again when mail
//! arrives. A run ends once nobody is active and nothing is in flight.

mod metrics;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use metrics::{Metrics, PhaseCost};

use crate::error::{Error, Result};
use crate::graph::{bits_for, log2_ceil, EdgeId, Graph, NodeId};

pub const DEFAULT_KAPPA: u32 = 4;
pub const DEFAULT_ROUND_LIMIT: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongestConfig {
    /// Blocks of `ceil(log2 n)` bits per metered message.
    pub kappa: u32,
    /// Per-phase cap on simulated rounds.
    pub round_limit: u64,
}

impl Default for CongestConfig {
    fn default() -> Self {
        CongestConfig {
            kappa: DEFAULT_KAPPA,
            round_limit: DEFAULT_ROUND_LIMIT,
        }
    }
}

/// `ceil(bits / (kappa * ceil(log2 n)))`.
pub fn meter_payload(bits: u64, n: usize, kappa: u32) -> u64 {
    let block = kappa as u64 * log2_ceil(n) as u64;
    bits.div_ceil(block)
}

/// Field widths every node can compute from public knowledge (`n` and the id space).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Widths {
    /// Bits per node id.
    pub id: u32,
    /// `ceil(log2 n)`.
    pub log_n: u32,
    /// Bits per edge weight (weights are bounded by the id space, i.e. poly(n)).
    pub weight: u32,
    /// Bits per metered message.
    pub block: u64,
}

impl Widths {
    pub fn for_graph(g: &Graph, kappa: u32) -> Self {
        let log_n = log2_ceil(g.n());
        Widths {
            id: g.id_bits(),
            log_n,
            weight: bits_for(g.id_space().max(g.max_weight())),
            block: kappa as u64 * log_n as u64,
        }
    }

    pub fn edge(&self) -> u64 {
        2 * self.id as u64
    }
}

/// Anything that can travel over an edge; `bits` is its exact encoded size.
pub trait Payload {
    fn bits(&self, w: &Widths) -> u64;
}

/// An opaque value of a declared width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Word {
    pub value: u64,
    pub bits: u32,
}

impl Word {
    pub fn new(value: u64, bits: u32) -> Self {
        Word { value, bits }
    }
}

impl Payload for Word {
    fn bits(&self, _: &Widths) -> u64 {
        self.bits as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub id: NodeId,
    pub weight: u64,
    pub mult: u32,
}

/// What a node knows before any communication: its id, its neighbors' ids
/// and the weights of its incident edges.
#[derive(Clone, Debug)]
pub struct Kt1Knowledge {
    id: NodeId,
    n: usize,
    neighbors: Vec<Neighbor>,
    widths: Widths,
    // engine-private: neighbor position -> node index
    nbr_index: Vec<usize>,
}

impl Kt1Knowledge {
    pub fn id(&self) -> NodeId {
        self.id
    }

    /// Network size, known to all nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted by neighbor id.
    pub fn neighbors(&self) -> &[Neighbor] {
        &self.neighbors
    }

    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }

    pub fn widths(&self) -> &Widths {
        &self.widths
    }

    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.neighbors.binary_search_by_key(&id, |x| x.id).ok()
    }

    pub fn is_neighbor(&self, id: NodeId) -> bool {
        self.position(id).is_some()
    }

    pub fn edge_to(&self, nbr: NodeId) -> EdgeId {
        EdgeId::new(self.id, nbr)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Step again next round even without mail.
    Active,
    /// Sleep until a message arrives.
    Idle,
}

pub struct Ctx<'a, M> {
    round: u64,
    me: &'a Kt1Knowledge,
    inbox: &'a [(NodeId, M)],
    outbox: &'a mut Vec<(NodeId, M)>,
    rng: &'a mut ChaCha8Rng,
}

impl<'a, M> Ctx<'a, M> {
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn me(&self) -> &Kt1Knowledge {
        self.me
    }

    pub fn id(&self) -> NodeId {
        self.me.id
    }

    /// Messages sent to this node last round, sorted by sender id.
    pub fn inbox(&self) -> &'a [(NodeId, M)] {
        self.inbox
    }

    /// The node's private random stream.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        self.rng
    }

    pub fn send(&mut self, dst: NodeId, msg: M) {
        self.outbox.push((dst, msg));
    }
}

pub trait NodeProgram {
    type Msg: Payload + Clone;

    fn step(&mut self, ctx: &mut Ctx<'_, Self::Msg>) -> Status;
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives an independent stream seed from a run seed and a label.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    splitmix(seed ^ splitmix(label))
}

/// A simulation over one graph that can run several phases back to back.
///
/// Node random streams persist across phases; metrics accumulate.
pub struct Sim<'g> {
    graph: &'g Graph,
    cfg: CongestConfig,
    know: Vec<Kt1Knowledge>,
    rngs: Vec<ChaCha8Rng>,
    metrics: Metrics,
}

impl<'g> Sim<'g> {
    pub fn new(graph: &'g Graph, cfg: CongestConfig, seed: u64) -> Self {
        let widths = Widths::for_graph(graph, cfg.kappa);
        let know = (0..graph.n())
            .map(|v| {
                let adj = graph.adj(v);
                Kt1Knowledge {
                    id: graph.id(v),
                    n: graph.n(),
                    neighbors: adj
                        .iter()
                        .map(|a| {
                            let e = graph.edge(a.edge);
                            Neighbor {
                                id: graph.id(a.nbr),
                                weight: e.weight,
                                mult: e.mult,
                            }
                        })
                        .collect(),
                    widths,
                    nbr_index: adj.iter().map(|a| a.nbr).collect(),
                }
            })
            .collect();
        let rngs = graph
            .ids()
            .iter()
            .map(|id| ChaCha8Rng::seed_from_u64(derive_seed(seed, id.0)))
            .collect();
        Sim {
            graph,
            cfg,
            know,
            rngs,
            metrics: Metrics::default(),
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn config(&self) -> &CongestConfig {
        &self.cfg
    }

    pub fn knowledge(&self) -> &[Kt1Knowledge] {
        &self.know
    }

    pub fn widths(&self) -> Widths {
        Widths::for_graph(self.graph, self.cfg.kappa)
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    /// Node `v`'s random stream, for local computation between phases.
    pub fn rng_of(&mut self, v: usize) -> &mut ChaCha8Rng {
        &mut self.rngs[v]
    }

    pub fn into_metrics(self) -> Metrics {
        self.metrics
    }

    /// Accounts `rounds` silent rounds (synchronization padding).
    pub fn idle(&mut self, phase: &str, rounds: u64) {
        if rounds > 0 {
            self.metrics.record(phase, rounds, 0);
        }
    }

    /// Builds one program per node from its knowledge.
    pub fn programs<P>(&self, mut factory: impl FnMut(usize, &Kt1Knowledge) -> P) -> Vec<P> {
        self.know.iter().enumerate().map(|(v, k)| factory(v, k)).collect()
    }

    /// Runs `programs` (indexed like the graph's nodes) to quiescence and
    /// returns their final states. The phase's cost is recorded under `phase`.
    pub fn run<P: NodeProgram>(&mut self, phase: &str, mut programs: Vec<P>) -> Result<Vec<P>> {
        let n = self.graph.n();
        assert_eq!(programs.len(), n, "one program per node");
        let widths = self.know.first().map(|k| k.widths).unwrap_or(Widths::for_graph(self.graph, self.cfg.kappa));

        let mut inboxes: Vec<Vec<(NodeId, P::Msg)>> = (0..n).map(|_| Vec::new()).collect();
        let mut next: Vec<Vec<(NodeId, P::Msg)>> = (0..n).map(|_| Vec::new()).collect();
        let mut outbox = Vec::new();
        let mut to_step: Vec<usize> = (0..n).collect();
        let mut has_mail = vec![false; n];
        let mut active = vec![false; n];
        let mut round = 0u64;
        let mut last_active = 0u64;
        let mut messages = 0u64;

        while !to_step.is_empty() {
            round += 1;
            if round > self.cfg.round_limit {
                let mut partial = self.metrics.clone();
                partial.record(phase, last_active.max(1), messages);
                return Err(Error::Timeout {
                    limit: self.cfg.round_limit,
                    phase: phase.to_string(),
                    partial: Box::new(partial),
                });
            }
            let mut busy = false;
            for &v in &to_step {
                let inbox = &mut inboxes[v];
                inbox.sort_by_key(|(src, _)| *src);
                let me = &self.know[v];
                let mut ctx = Ctx {
                    round,
                    me,
                    inbox,
                    outbox: &mut outbox,
                    rng: &mut self.rngs[v],
                };
                let status = programs[v].step(&mut ctx);
                active[v] = status == Status::Active;
                busy |= active[v];
                for (dst, msg) in outbox.drain(..) {
                    let Some(pos) = me.position(dst) else {
                        return Err(Error::NonNeighbor { src: me.id, dst, round });
                    };
                    let blocks = msg.bits(&widths).div_ceil(widths.block);
                    messages += blocks;
                    busy = true;
                    let w = me.nbr_index[pos];
                    next[w].push((me.id, msg));
                    has_mail[w] = true;
                }
                inbox.clear();
            }
            if busy {
                last_active = round;
            }
            std::mem::swap(&mut inboxes, &mut next);
            to_step.clear();
            for v in 0..n {
                if has_mail[v] || active[v] {
                    to_step.push(v);
                }
                has_mail[v] = false;
            }
        }
        self.metrics.record(phase, last_active.max(1), messages);
        Ok(programs)
    }
}

/// Result of a single-phase [`run`].
pub struct RunOutput<P> {
    pub programs: Vec<P>,
    pub metrics: Metrics,
}

/// Runs one program per node, built from its KT1 knowledge, to quiescence.
pub fn run<P: NodeProgram>(
    g: &Graph,
    factory: impl FnMut(usize, &Kt1Knowledge) -> P,
    seed: u64,
    cfg: CongestConfig,
) -> Result<RunOutput<P>> {
    let mut sim = Sim::new(g, cfg, seed);
    let programs = sim.programs(factory);
    let programs = sim.run("run", programs)?;
    Ok(RunOutput {
        programs,
        metrics: sim.into_metrics(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meter_examples() {
        assert_eq!(meter_payload(0, 64, 4), 0);
        assert_eq!(meter_payload(24, 64, 4), 1);
        assert_eq!(meter_payload(25, 64, 4), 2);
        assert_eq!(meter_payload(1000, 256, 4), 32);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 2), derive_seed(1, 3));
        assert_ne!(derive_seed(1, 2), derive_seed(2, 2));
    }
}
