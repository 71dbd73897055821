//! Fragment growth where every fragment works over its own tree.

use super::{AdoptionLog, Ambient, Cand, FragmentMap};
use crate::congest::{Ctx, NodeProgram, Payload, Sim, Status, Widths, Word};
use crate::error::Result;
use crate::graph::{EdgeId, NodeId};
use crate::primitives::{broadcast, elect_leader, pipelined_convergecast, LocalTree, Subgraph};
use crate::sketch::{run_search, SearchInput, SearchMode, SearchOutcome, SearchParams};

/// How a fragment finds its outgoing edge.
#[derive(Clone, Copy, Debug)]
pub enum Growth<'a> {
    /// Hash-parity search over the ambient edges.
    Sketch { mode: SearchMode, ambient: Ambient<'a>, a: f64 },
    /// Neighbors exchange fragment labels; the fragment takes the minimum.
    Exchange,
}

/// Re-elects a leader in every active fragment; labels become the minimum id.
pub(crate) fn relabel(sim: &mut Sim<'_>, phase: &str, fm: &mut FragmentMap) -> Result<Vec<Option<LocalTree>>> {
    let g = sim.graph();
    let members: Vec<bool> = fm.retired.iter().map(|r| !r).collect();
    let sub = Subgraph::induced(g, &members, |e| fm.edges[e]);
    let le = elect_leader(sim, phase, &sub)?;
    for v in 0..g.n() {
        if let Some(min) = le.component_min[v] {
            fm.label[v] = min;
        }
    }
    Ok(le.trees)
}

/// Runs `iters` rounds of fragment merging; each active fragment adds one
/// outgoing edge per iteration. Labels are refreshed at the end.
pub fn controlled_ghs(
    sim: &mut Sim<'_>,
    prefix: &str,
    fm: &mut FragmentMap,
    iters: usize,
    growth: Growth<'_>,
    log: &mut AdoptionLog,
) -> Result<()> {
    if iters == 0 {
        return Ok(());
    }
    let g = sim.graph();
    for _ in 0..iters {
        let trees = relabel(sim, &format!("{prefix}/leader"), fm)?;
        let snap = log.snapshot(&fm.label);
        let chosen: Vec<(usize, NodeId)> = match growth {
            Growth::Sketch { mode, ambient, a } => {
                let inputs = (0..g.n())
                    .map(|v| SearchInput {
                        tree: trees[v].clone(),
                        label: fm.label[v],
                        incident: if fm.retired[v] {
                            Vec::new()
                        } else {
                            g.adj(v)
                                .iter()
                                .filter(|x| ambient.admits(x.edge))
                                .map(|x| (g.edge(x.edge).id, g.edge(x.edge).weight))
                                .collect()
                        },
                    })
                    .collect();
                let params = SearchParams::new(mode, g.n(), a).with_probe(true);
                let nodes = run_search(sim, &format!("{prefix}/search"), inputs, params)?;
                if mode == SearchMode::Any {
                    for (v, node) in nodes.iter().enumerate() {
                        if node.outcome() == Some(SearchOutcome::Nothing) {
                            fm.retired[v] = true;
                        }
                    }
                }
                let mut chosen = Vec::new();
                for (v, node) in nodes.iter().enumerate() {
                    for link in node.links() {
                        let e = g.edge_index(link.edge).expect("probe crosses an edge");
                        fm.edges[e] = true;
                        if link.chosen_here {
                            chosen.push((e, fm.label[v]));
                        }
                    }
                }
                chosen
            }
            Growth::Exchange => exchange_round(sim, prefix, fm, &trees)?,
        };
        if chosen.is_empty() {
            break;
        }
        for (e, frag) in chosen {
            log.adopt(e, frag, snap);
        }
    }
    relabel(sim, &format!("{prefix}/leader"), fm)?;
    Ok(())
}

/// Every node sends its label to all neighbors; returns neighbor labels per
/// adjacency position.
pub(crate) fn exchange_labels(sim: &mut Sim<'_>, phase: &str, fm: &FragmentMap) -> Result<Vec<Vec<NodeId>>> {
    let g = sim.graph();
    let bits = sim.widths().id;
    let programs = sim.programs(|v, k| SendAll {
        targets: k.neighbors().iter().map(|x| x.id).collect(),
        word: Word::new(fm.label[v].0, bits),
        heard: Vec::new(),
        sent: false,
    });
    let programs = sim.run(phase, programs)?;
    Ok(programs
        .into_iter()
        .enumerate()
        .map(|(v, p)| {
            debug_assert_eq!(p.heard.len(), g.degree(v));
            p.heard.into_iter().map(|(_, w)| NodeId(w.value)).collect()
        })
        .collect())
}

/// Lightest incident edge leading to another fragment.
pub(crate) fn local_candidate(sim: &Sim<'_>, v: usize, fm: &FragmentMap, nbr_labels: &[NodeId]) -> Option<Cand> {
    let g = sim.graph();
    g.adj(v)
        .iter()
        .zip(nbr_labels)
        .filter(|(_, l)| **l != fm.label[v])
        .map(|(a, l)| {
            let e = g.edge(a.edge);
            Cand {
                weight: e.weight,
                edge: e.id,
                far: *l,
            }
        })
        .min_by_key(|c| (c.weight, c.edge))
}

fn exchange_round(
    sim: &mut Sim<'_>,
    prefix: &str,
    fm: &mut FragmentMap,
    trees: &[Option<LocalTree>],
) -> Result<Vec<(usize, NodeId)>> {
    let g = sim.graph();
    let n = g.n();
    let labels = exchange_labels(sim, &format!("{prefix}/exchange"), fm)?;
    let items: Vec<Vec<(u64, Cand)>> = (0..n)
        .map(|v| local_candidate(sim, v, fm, &labels[v]).map(|c| (0, c)).into_iter().collect())
        .collect();
    let best = pipelined_convergecast(sim, &format!("{prefix}/convergecast"), trees, items, Cand::min, 0, Some(1))?;
    let root_values: Vec<Option<Cand>> = best.iter().map(|m| m.get(&0).copied()).collect();
    let choice = broadcast(sim, &format!("{prefix}/broadcast"), trees, root_values)?;

    // the inside endpoint marks the edge across
    let targets: Vec<Vec<NodeId>> = (0..n)
        .map(|v| match choice[v] {
            Some(c) if c.edge.contains(g.id(v)) => vec![c.edge.other(g.id(v))],
            _ => Vec::new(),
        })
        .collect();
    let programs = sim.programs(|v, _| SendAll {
        targets: targets[v].clone(),
        word: Word::new(0, 1),
        heard: Vec::new(),
        sent: false,
    });
    sim.run(&format!("{prefix}/mark"), programs)?;

    let mut chosen = Vec::new();
    for v in 0..n {
        for &t in &targets[v] {
            let e = g.edge_index(EdgeId::new(g.id(v), t)).unwrap();
            fm.edges[e] = true;
            chosen.push((e, fm.label[v]));
        }
    }
    Ok(chosen)
}

/// Sends one word to each target in the first round and records what arrives.
pub(crate) struct SendAll {
    pub targets: Vec<NodeId>,
    pub word: Word,
    pub heard: Vec<(NodeId, Word)>,
    pub sent: bool,
}

impl NodeProgram for SendAll {
    type Msg = Word;

    fn step(&mut self, ctx: &mut Ctx<'_, Word>) -> Status {
        if !self.sent {
            self.sent = true;
            for &t in &self.targets {
                ctx.send(t, self.word);
            }
        }
        self.heard.extend(ctx.inbox().iter().copied());
        Status::Idle
    }
}

impl Payload for Cand {
    fn bits(&self, w: &Widths) -> u64 {
        w.weight as u64 + w.edge() + w.id as u64
    }
}
