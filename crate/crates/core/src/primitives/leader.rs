//! Leader election by extinction: every node starts an echo wave keyed by a
//! random rank, nodes only relay the best wave they have seen, and the one
//! wave that completes its echo names the leader. The winning wave's join
//! edges form a BFS-like spanning tree of the component, and the echo also
//! aggregates the component's minimum id.

use rand::Rng;

use super::{LocalTree, Subgraph};
use crate::congest::{Ctx, NodeProgram, Payload, Sim, Status, Widths};
use crate::error::Result;
use crate::graph::NodeId;

type Wave = (u64, NodeId);

/// Higher rank wins; equal ranks fall back to the smaller origin id.
fn beats(a: Wave, b: Wave) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 < b.1)
}

fn rank_bits(w: &Widths) -> u32 {
    (2 * w.log_n).min(62)
}

#[derive(Clone, Debug)]
pub enum LeaderMsg {
    Join { rank: u64, origin: NodeId, depth: u32 },
    Echo { rank: u64, origin: NodeId, min: NodeId },
    Announce { leader: NodeId, min: NodeId },
}

impl Payload for LeaderMsg {
    fn bits(&self, w: &Widths) -> u64 {
        let id = w.id as u64;
        2 + match self {
            LeaderMsg::Join { .. } => rank_bits(w) as u64 + id + w.log_n as u64,
            LeaderMsg::Echo { .. } => rank_bits(w) as u64 + 2 * id,
            LeaderMsg::Announce { .. } => 2 * id,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LeaderNode {
    me: NodeId,
    nbrs: Vec<NodeId>,
    member: bool,
    wave: Option<Wave>,
    parent: Option<NodeId>,
    depth: u32,
    pending: Vec<bool>,
    waiting: usize,
    children: Vec<NodeId>,
    sub_min: NodeId,
    echoed: bool,
    result: Option<(NodeId, NodeId)>,
}

impl LeaderNode {
    pub fn new(me: NodeId, member: bool, mut nbrs: Vec<NodeId>) -> Self {
        nbrs.sort();
        LeaderNode {
            me,
            pending: vec![false; nbrs.len()],
            nbrs,
            member,
            wave: None,
            parent: None,
            depth: 0,
            waiting: 0,
            children: Vec::new(),
            sub_min: me,
            echoed: false,
            result: None,
        }
    }

    pub fn leader(&self) -> Option<NodeId> {
        self.result.map(|r| r.0)
    }

    /// Minimum id in this node's component.
    pub fn component_min(&self) -> Option<NodeId> {
        self.result.map(|r| r.1)
    }

    pub fn tree(&self) -> Option<LocalTree> {
        let (leader, _) = self.result?;
        Some(LocalTree {
            root: leader,
            parent: self.parent,
            children: self.children.clone(),
            depth: self.depth,
        })
    }

    fn adopt(&mut self, wave: Wave, parent: Option<NodeId>, depth: u32, ctx: &mut Ctx<'_, LeaderMsg>) {
        self.wave = Some(wave);
        self.parent = parent;
        self.depth = depth;
        self.children.clear();
        self.sub_min = self.me;
        self.echoed = false;
        self.waiting = 0;
        for (i, &x) in self.nbrs.iter().enumerate() {
            let wait = Some(x) != parent;
            self.pending[i] = wait;
            if wait {
                self.waiting += 1;
                ctx.send(
                    x,
                    LeaderMsg::Join {
                        rank: wave.0,
                        origin: wave.1,
                        depth,
                    },
                );
            }
        }
    }

    fn replied(&mut self, src: NodeId) {
        if let Ok(i) = self.nbrs.binary_search(&src) {
            if self.pending[i] {
                self.pending[i] = false;
                self.waiting -= 1;
            }
        }
    }

    fn announce(&mut self, leader: NodeId, min: NodeId, ctx: &mut Ctx<'_, LeaderMsg>) {
        self.result = Some((leader, min));
        for &c in &self.children {
            ctx.send(c, LeaderMsg::Announce { leader, min });
        }
    }
}

impl NodeProgram for LeaderNode {
    type Msg = LeaderMsg;

    fn step(&mut self, ctx: &mut Ctx<'_, LeaderMsg>) -> Status {
        if !self.member || self.result.is_some() {
            return Status::Idle;
        }
        if self.wave.is_none() {
            let bits = rank_bits(ctx.me().widths());
            let rank = ctx.rng().gen_range(0..1u64 << bits);
            self.adopt((rank, self.me), None, 0, ctx);
        }

        let inbox = ctx.inbox();
        let mut best: Option<(Wave, NodeId, u32)> = None;
        for (src, msg) in inbox {
            if let LeaderMsg::Join { rank, origin, depth } = *msg {
                let w = (rank, origin);
                let cur = best.map(|b| b.0).or(self.wave).unwrap();
                if beats(w, cur) {
                    best = Some((w, *src, depth));
                }
            }
        }
        if let Some((w, parent, depth)) = best {
            self.adopt(w, Some(parent), depth + 1, ctx);
        }

        let cur = self.wave.unwrap();
        for (src, msg) in inbox {
            match *msg {
                LeaderMsg::Join { rank, origin, .. } if (rank, origin) == cur && Some(*src) != self.parent => {
                    self.replied(*src);
                }
                LeaderMsg::Echo { rank, origin, min } if (rank, origin) == cur => {
                    self.replied(*src);
                    self.children.push(*src);
                    self.sub_min = self.sub_min.min(min);
                }
                LeaderMsg::Announce { leader, min } => {
                    self.announce(leader, min, ctx);
                    return Status::Idle;
                }
                _ => {}
            }
        }

        if !self.echoed && self.waiting == 0 {
            self.echoed = true;
            match self.parent {
                Some(p) => ctx.send(
                    p,
                    LeaderMsg::Echo {
                        rank: cur.0,
                        origin: cur.1,
                        min: self.sub_min,
                    },
                ),
                None => self.announce(self.me, self.sub_min, ctx),
            }
        }
        Status::Idle
    }
}

/// Outcome per node; `None` for non-members.
#[derive(Clone, Debug, Default)]
pub struct LeaderResult {
    pub leader: Vec<Option<NodeId>>,
    pub component_min: Vec<Option<NodeId>>,
    pub trees: Vec<Option<LocalTree>>,
}

impl LeaderResult {
    pub fn leaders(&self) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.leader.iter().flatten().copied().collect();
        out.sort();
        out.dedup();
        out
    }
}

pub fn leader_programs(sim: &Sim<'_>, sub: &Subgraph) -> Vec<LeaderNode> {
    sim.programs(|v, k| LeaderNode::new(k.id(), sub.members[v], sub.nbrs[v].clone()))
}

/// Elects one leader per connected component of `sub`.
pub fn elect_leader(sim: &mut Sim<'_>, phase: &str, sub: &Subgraph) -> Result<LeaderResult> {
    let programs = leader_programs(sim, sub);
    let programs = sim.run(phase, programs)?;
    Ok(LeaderResult {
        leader: programs.iter().map(|p| p.leader()).collect(),
        component_min: programs.iter().map(|p| p.component_min()).collect(),
        trees: programs.iter().map(|p| p.tree()).collect(),
    })
}
