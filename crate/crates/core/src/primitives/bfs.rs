use super::{LocalTree, Subgraph};
use crate::congest::{Ctx, NodeProgram, Payload, Sim, Status, Widths};
use crate::error::Result;
use crate::graph::NodeId;

#[derive(Clone, Debug)]
pub enum BfsMsg {
    Explore { depth: u32 },
    Ack,
}

impl Payload for BfsMsg {
    fn bits(&self, w: &Widths) -> u64 {
        match self {
            BfsMsg::Explore { .. } => 1 + w.log_n as u64,
            BfsMsg::Ack => 1,
        }
    }
}

/// Flooding BFS from a root whose id every member already knows (e.g. an
/// elected leader); each joining node acknowledges its parent.
#[derive(Clone, Debug)]
pub struct BfsNode {
    me: NodeId,
    root: NodeId,
    nbrs: Vec<NodeId>,
    is_root: bool,
    tree: Option<LocalTree>,
}

impl BfsNode {
    pub fn new(me: NodeId, root: NodeId, nbrs: Vec<NodeId>) -> Self {
        BfsNode {
            me,
            root,
            nbrs,
            is_root: me == root,
            tree: None,
        }
    }

    pub fn tree(&self) -> Option<&LocalTree> {
        self.tree.as_ref()
    }

    pub fn into_tree(self) -> Option<LocalTree> {
        self.tree
    }

    fn explore(&self, depth: u32, skip: &[NodeId], ctx: &mut Ctx<'_, BfsMsg>) {
        for &x in &self.nbrs {
            if !skip.contains(&x) {
                ctx.send(x, BfsMsg::Explore { depth });
            }
        }
    }
}

impl NodeProgram for BfsNode {
    type Msg = BfsMsg;

    fn step(&mut self, ctx: &mut Ctx<'_, BfsMsg>) -> Status {
        if self.is_root && self.tree.is_none() {
            self.tree = Some(LocalTree::singleton(self.me));
            self.explore(1, &[], ctx);
            return Status::Idle;
        }
        let inbox = ctx.inbox();
        for (src, msg) in inbox {
            if let BfsMsg::Ack = msg {
                if let Some(t) = self.tree.as_mut() {
                    t.children.push(*src);
                }
            }
        }
        if self.tree.is_none() {
            let senders: Vec<NodeId> = inbox
                .iter()
                .filter(|(_, m)| matches!(m, BfsMsg::Explore { .. }))
                .map(|(s, _)| *s)
                .collect();
            if let Some((parent, BfsMsg::Explore { depth })) = inbox.iter().find(|(_, m)| matches!(m, BfsMsg::Explore { .. })) {
                let (depth, parent) = (*depth, *parent);
                self.tree = Some(LocalTree {
                    root: self.root,
                    parent: Some(parent),
                    children: Vec::new(),
                    depth,
                });
                ctx.send(parent, BfsMsg::Ack);
                self.explore(depth + 1, &senders, ctx);
            }
        }
        Status::Idle
    }
}

pub fn bfs_programs(sim: &Sim<'_>, sub: &Subgraph, root: usize) -> Vec<BfsNode> {
    let root_id = sim.graph().id(root);
    sim.programs(|v, k| {
        let nbrs = if sub.members[v] { sub.nbrs[v].clone() } else { Vec::new() };
        BfsNode::new(k.id(), root_id, nbrs)
    })
}

/// BFS tree of `root`'s component in `sub`; `None` for nodes outside it.
pub fn build_bfs_tree(sim: &mut Sim<'_>, phase: &str, sub: &Subgraph, root: usize) -> Result<Vec<Option<LocalTree>>> {
    let programs = bfs_programs(sim, sub, root);
    let programs = sim.run(phase, programs)?;
    Ok(programs.into_iter().map(BfsNode::into_tree).collect())
}
