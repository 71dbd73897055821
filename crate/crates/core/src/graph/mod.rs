//! Weighted undirected multigraphs with canonical KT1 edge identifiers.
//!
//! Nodes are addressed internally by a dense index (`usize`) and externally
//! by their [`NodeId`]. Parallel edges are folded into a single [`Edge`] with
//! a multiplicity, so every unordered pair of nodes has at most one entry.

mod generate;
mod io;
pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{generate, GenOptions, GeneratorKind, IdMode, WeightMode};
pub use io::{read_graph, write_graph};

/// Unique node identifier drawn from `{1, ..., id_space}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Common edge identifier: the two endpoint ids, lowest first.
///
/// The derived ordering compares `lo` then `hi`, which coincides with the
/// numeric order of [`EdgeId::encode`] for any fixed id width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId {
    lo: NodeId,
    hi: NodeId,
}

impl EdgeId {
    /// Builds the canonical identifier of the edge `{a, b}`.
    ///
    /// Panics on a self-loop.
    pub fn new(a: NodeId, b: NodeId) -> Self {
        assert_ne!(a, b, "self-loops have no edge identifier");
        if a < b {
            EdgeId { lo: a, hi: b }
        } else {
            EdgeId { lo: b, hi: a }
        }
    }

    pub fn lo(&self) -> NodeId {
        self.lo
    }

    pub fn hi(&self) -> NodeId {
        self.hi
    }

    /// The endpoint opposite to `end`.
    pub fn other(&self, end: NodeId) -> NodeId {
        if end == self.lo {
            self.hi
        } else {
            self.lo
        }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.lo == v || self.hi == v
    }

    /// Bit-string encoding: `lo` in the high `id_bits`, `hi` in the low `id_bits`.
    pub fn encode(&self, id_bits: u32) -> u64 {
        debug_assert!(2 * id_bits <= 64);
        (self.lo.0 << id_bits) | self.hi.0
    }

    pub fn decode(code: u64, id_bits: u32) -> Self {
        let mask = (1u64 << id_bits) - 1;
        EdgeId {
            lo: NodeId(code >> id_bits),
            hi: NodeId(code & mask),
        }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

/// One undirected edge (with multiplicity) between node indices `u < v` by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    /// Index of the endpoint with the smaller id.
    pub u: usize,
    /// Index of the endpoint with the larger id.
    pub v: usize,
    pub id: EdgeId,
    pub weight: u64,
    pub mult: u32,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Adjacency entry: neighbor index and the index of the connecting edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Adj {
    pub nbr: usize,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<NodeId>,
    edges: Vec<Edge>,
    /// Per node, sorted by neighbor id.
    adj: Vec<Vec<Adj>>,
    index: BTreeMap<NodeId, usize>,
    id_space: u64,
}

/// `n`, `m` (with multiplicity) and hop diameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: u64,
    pub diameter: Option<u32>,
}

impl Graph {
    /// Builds a graph from node ids and `(a, b, weight, multiplicity)` tuples over node indices.
    ///
    /// The id space defaults to `max(n^3, max id)`.
    pub fn new(ids: Vec<NodeId>, edges: impl IntoIterator<Item = (usize, usize, u64, u32)>) -> Result<Self> {
        let n = ids.len() as u64;
        let max_id = ids.iter().map(|v| v.0).max().unwrap_or(1);
        Self::with_id_space(ids, edges, n.saturating_pow(3).max(max_id).max(1))
    }

    pub fn with_id_space(
        ids: Vec<NodeId>,
        edges: impl IntoIterator<Item = (usize, usize, u64, u32)>,
        id_space: u64,
    ) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, &id) in ids.iter().enumerate() {
            if id.0 == 0 || id.0 > id_space {
                return Err(Error::InvalidGraph(format!("node id {id} outside 1..={id_space}")));
            }
            if index.insert(id, i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node id {id}")));
            }
        }
        let n = ids.len();
        let mut out: Vec<Edge> = Vec::new();
        let mut seen = BTreeMap::new();
        for (a, b, weight, mult) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) references a missing node")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {}", ids[a])));
            }
            if mult == 0 {
                return Err(Error::InvalidGraph("multiplicity must be positive".into()));
            }
            let id = EdgeId::new(ids[a], ids[b]);
            if seen.insert(id, out.len()).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge {id}; use multiplicity")));
            }
            let (u, v) = if ids[a] < ids[b] { (a, b) } else { (b, a) };
            out.push(Edge { u, v, id, weight, mult });
        }
        let mut adj = vec![Vec::new(); n];
        for (e, edge) in out.iter().enumerate() {
            adj[edge.u].push(Adj { nbr: edge.v, edge: e });
            adj[edge.v].push(Adj { nbr: edge.u, edge: e });
        }
        for list in &mut adj {
            list.sort_by_key(|a| ids[a.nbr]);
        }
        let g = Graph { ids, edges: out, adj, index, id_space };
        if 2 * g.id_bits() > 64 {
            return Err(Error::InvalidGraph("id space too large for 64-bit edge encodings".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    /// Edge count with multiplicity.
    pub fn m(&self) -> u64 {
        self.edges.iter().map(|e| e.mult as u64).sum()
    }

    /// Number of distinct adjacent pairs.
    pub fn simple_m(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> NodeId {
        self.ids[v]
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn adj(&self, v: usize) -> &[Adj] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        let u = self.index_of(id.lo)?;
        let v = self.index_of(id.hi)?;
        self.adj[u].iter().find(|a| a.nbr == v).map(|a| a.edge)
    }

    pub fn id_space(&self) -> u64 {
        self.id_space
    }

    /// Bits needed for one node id, `ceil(log2(id_space + 1))`.
    pub fn id_bits(&self) -> u32 {
        bits_for(self.id_space)
    }

    pub fn max_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).max().unwrap_or(0)
    }

    pub fn has_distinct_weights(&self) -> bool {
        let mut w: Vec<u64> = self.edges.iter().map(|e| e.weight).collect();
        w.sort_unstable();
        w.windows(2).all(|p| p[0] != p[1])
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            n: self.n(),
            m: self.m(),
            diameter: oracle::diameter(self),
        }
    }

    /// Same nodes, only the selected edges.
    pub fn subgraph(&self, keep: impl Fn(usize) -> bool) -> Graph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(e, _)| keep(*e))
            .map(|(_, e)| (e.u, e.v, e.weight, e.mult));
        Graph::with_id_space(self.ids.clone(), edges, self.id_space).expect("subgraph of a valid graph")
    }
}

/// `ceil(log2(x + 1))`, at least 1.
pub fn bits_for(x: u64) -> u32 {
    (64 - x.leading_zeros()).max(1)
}

/// `ceil(log2(n))`, at least 1.
pub fn log2_ceil(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_id_is_canonical() {
        let e = EdgeId::new(NodeId(9), NodeId(4));
        assert_eq!(e.lo(), NodeId(4));
        assert_eq!(e.hi(), NodeId(9));
        assert_eq!(e, EdgeId::new(NodeId(4), NodeId(9)));
        assert_eq!(EdgeId::decode(e.encode(5), 5), e);
        assert_eq!(e.other(NodeId(4)), NodeId(9));
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let ids = vec![NodeId(1), NodeId(2)];
        assert!(Graph::new(ids.clone(), [(0, 0, 1, 1)]).is_err());
        assert!(Graph::new(ids.clone(), [(0, 1, 1, 1), (1, 0, 2, 1)]).is_err());
        assert!(Graph::new(ids, [(0, 1, 1, 0)]).is_err());
    }

    #[test]
    fn adjacency_sorted_by_neighbor_id() {
        let ids = vec![NodeId(50), NodeId(3), NodeId(20)];
        let g = Graph::new(ids, [(0, 1, 1, 1), (0, 2, 2, 1)]).unwrap();
        let nbrs: Vec<NodeId> = g.adj(0).iter().map(|a| g.id(a.nbr)).collect();
        assert_eq!(nbrs, vec![NodeId(3), NodeId(20)]);
    }

    #[test]
    fn log_helpers() {
        assert_eq!(log2_ceil(1), 1);
        assert_eq!(log2_ceil(2), 1);
        assert_eq!(log2_ceil(3), 2);
        assert_eq!(log2_ceil(64), 6);
        assert_eq!(log2_ceil(65), 7);
        assert_eq!(bits_for(1), 1);
        assert_eq!(bits_for(64), 7);
        assert_eq!(bits_for(63), 6);
    }
}
