//! Leader election, BFS trees and (pipelined) broadcast / convergecast over
//! connected subgraphs.

mod bfs;
mod leader;
mod pipeline;

use serde::{Deserialize, Serialize};

pub use bfs::{bfs_programs, build_bfs_tree, BfsMsg, BfsNode};
pub use leader::{elect_leader, leader_programs, LeaderMsg, LeaderNode, LeaderResult};
pub use pipeline::{
    broadcast, pipelined_broadcast, pipelined_convergecast, BroadcastNode, CastMsg, ConvergecastNode, Item,
    PipeBroadcastNode,
};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// A node's own view of a rooted tree: what it can act on locally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalTree {
    pub root: NodeId,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub depth: u32,
}

impl LocalTree {
    pub fn singleton(me: NodeId) -> Self {
        LocalTree {
            root: me,
            parent: None,
            children: Vec::new(),
            depth: 0,
        }
    }

    pub fn is_root(&self) -> bool {
        self.parent.is_none()
    }
}

/// Per-node neighbor lists of a subgraph; both endpoints of every kept edge
/// list each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub members: Vec<bool>,
    pub nbrs: Vec<Vec<NodeId>>,
}

impl Subgraph {
    /// All nodes, edges accepted by `keep`.
    pub fn from_edges(g: &Graph, keep: impl Fn(usize) -> bool) -> Self {
        Self::induced(g, &vec![true; g.n()], keep)
    }

    /// Nodes flagged in `members`, kept edges between two members.
    pub fn induced(g: &Graph, members: &[bool], keep: impl Fn(usize) -> bool) -> Self {
        let nbrs = (0..g.n())
            .map(|v| {
                if !members[v] {
                    return Vec::new();
                }
                g.adj(v)
                    .iter()
                    .filter(|a| members[a.nbr] && keep(a.edge))
                    .map(|a| g.id(a.nbr))
                    .collect()
            })
            .collect();
        Subgraph {
            members: members.to_vec(),
            nbrs,
        }
    }

    pub fn whole(g: &Graph) -> Self {
        Self::from_edges(g, |_| true)
    }
}

/// A rooted tree assembled from the nodes' local views (for auditing).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsTree {
    pub root: usize,
    /// Parent index per node; `None` for the root and for non-members.
    pub parent: Vec<Option<usize>>,
    /// Depth per member node.
    pub depth: Vec<Option<u32>>,
}

impl BfsTree {
    /// Assembles the tree containing `root` from per-node local views.
    pub fn assemble(g: &Graph, views: &[Option<LocalTree>], root: usize) -> Result<Self> {
        let root_id = g.id(root);
        let mut parent = vec![None; g.n()];
        let mut depth = vec![None; g.n()];
        for (v, view) in views.iter().enumerate() {
            let Some(view) = view else { continue };
            if view.root != root_id {
                continue;
            }
            depth[v] = Some(view.depth);
            if let Some(p) = view.parent {
                parent[v] = Some(g.index_of(p).ok_or_else(|| Error::InvalidGraph(format!("unknown parent {p}")))?);
            }
        }
        Ok(BfsTree { root, parent, depth })
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.depth.len()).filter(|&v| self.depth[v].is_some()).collect()
    }

    pub fn max_depth(&self) -> u32 {
        self.depth.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Parent pointers reach the root without cycles and depths are consistent.
    pub fn is_valid(&self) -> bool {
        for v in self.members() {
            let mut x = v;
            let mut steps = 0;
            while let Some(p) = self.parent[x] {
                if self.depth[p].map(|d| d + 1) != self.depth[x] {
                    return false;
                }
                x = p;
                steps += 1;
                if steps > self.depth.len() {
                    return false;
                }
            }
            if x != self.root {
                return false;
            }
        }
        self.depth[self.root] == Some(0)
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().filter(|p| p.is_some()).count()
    }
}
