use crate::congest::Sim;
use crate::danner::{build_danner_in, DannerParams, DannerResult};
use crate::error::{Error, Result};
use crate::primitives::{elect_leader, LocalTree, Subgraph};

/// A danner together with a leader and a BFS tree of the danner rooted at
/// it: the communication backbone for global aggregation.
#[derive(Clone, Debug)]
pub struct Backbone {
    pub danner: DannerResult,
    /// Index of the leader (tree root).
    pub root: usize,
    pub tree: Vec<Option<LocalTree>>,
    pub depth: u32,
}

impl Backbone {
    /// Builds the danner, then elects a leader on it. The winning election
    /// wave spreads one hop per round, so its join edges already form a BFS
    /// tree of the danner rooted at the leader.
    pub fn build(sim: &mut Sim<'_>, params: DannerParams) -> Result<Self> {
        let danner = build_danner_in(sim, params)?;
        Self::on_danner(sim, danner)
    }

    /// Elects a leader on an already known danner.
    pub fn on_danner(sim: &mut Sim<'_>, danner: DannerResult) -> Result<Self> {
        let g = sim.graph();
        let sub = Subgraph::from_edges(g, |e| danner.state.h[e]);
        let le = elect_leader(sim, "backbone/leader", &sub)?;
        let leaders = le.leaders();
        if leaders.len() != 1 {
            return Err(Error::ProtocolFailure(format!(
                "danner has {} components",
                leaders.len()
            )));
        }
        let root = g.index_of(leaders[0]).expect("leader is a node");
        let depth = le.trees.iter().flatten().map(|t| t.depth).max().unwrap_or(0);
        Ok(Backbone {
            danner,
            root,
            tree: le.trees,
            depth,
        })
    }
}
