//! Global merging over the backbone tree.
//!
//! All fragments search in parallel. Each wave, every node convergecasts
//! its parity contribution tagged with its fragment label; the backbone
//! root runs one [`Cursor`] per fragment and pipelines the decisions back
//! down. When every search has finished, the outside endpoints of the
//! chosen edges report their own labels, the root merges fragments with a
//! union-find and broadcasts the relabeling.

use std::collections::BTreeMap;

use super::ghs::{exchange_labels, local_candidate, Growth};
use super::{AdoptionLog, Backbone, Cand, FragmentMap};
use crate::congest::{Payload, Sim, Widths, Word};
use crate::error::Result;
use crate::graph::oracle::Dsu;
use crate::graph::{log2_ceil, EdgeId, NodeId};
use crate::primitives::{pipelined_broadcast, pipelined_convergecast};
use crate::sketch::{random_specs, spec_mask, Cursor, Decision, SearchMode, SearchOutcome, SearchParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Down {
    Next { frag: NodeId, bit: bool, spec: Option<u8> },
    Finish { frag: NodeId, edge: Option<EdgeId> },
    Adopt { edge: EdgeId },
    Relabel { old: NodeId, new: NodeId },
}

impl Payload for Down {
    fn bits(&self, w: &Widths) -> u64 {
        2 + match self {
            Down::Next { spec, .. } => w.id as u64 + 1 + spec.map_or(0, |_| 6),
            Down::Finish { edge, .. } => w.id as u64 + 1 + edge.map_or(0, |_| w.edge()),
            Down::Adopt { .. } => w.edge(),
            Down::Relabel { .. } => 2 * w.id as u64,
        }
    }
}

fn xor(a: &Word, b: &Word) -> Word {
    Word::new(a.value ^ b.value, a.bits.max(b.bits))
}

fn first(a: &Word, _: &Word) -> Word {
    *a
}

/// Phase cap; each successful phase at least halves the fragment count.
pub fn phase_cap(n: usize) -> usize {
    2 * log2_ceil(n) as usize + 2
}

/// Runs merge phases until no fragment has an outgoing edge (or the cap is
/// hit). Returns the number of phases run.
pub fn merge_phases(
    sim: &mut Sim<'_>,
    backbone: &Backbone,
    fm: &mut FragmentMap,
    growth: Growth<'_>,
    log: &mut AdoptionLog,
) -> Result<usize> {
    let n = sim.graph().n();
    match growth {
        Growth::Sketch { mode, ambient, a } => {
            let params = SearchParams::new(mode, n, a);
            let drawn = random_specs(sim.rng_of(backbone.root), params.repetitions, params.independence);
            let mut root_items = vec![Vec::new(); n];
            root_items[backbone.root] = drawn;
            let got = pipelined_broadcast(sim, "merge/specs", &backbone.tree, root_items)?;
            let g = sim.graph();
            let masks: Vec<Vec<(usize, u64, u64, u64)>> = (0..n)
                .map(|v| {
                    g.adj(v)
                        .iter()
                        .filter(|x| ambient.admits(x.edge))
                        .map(|x| {
                            let e = g.edge(x.edge);
                            let code = e.id.encode(g.id_bits());
                            (x.edge, code, e.weight, spec_mask(&got[v], code))
                        })
                        .collect()
                })
                .collect();
            let mut phases = 0;
            while phases < phase_cap(n) {
                phases += 1;
                if !sketch_phase(sim, backbone, fm, mode, params.repetitions, &masks, log, phases)? {
                    break;
                }
            }
            Ok(phases)
        }
        Growth::Exchange => {
            let mut phases = 0;
            while phases < phase_cap(n) {
                phases += 1;
                if !exchange_phase(sim, backbone, fm, log, phases)? {
                    break;
                }
            }
            Ok(phases)
        }
    }
}

/// One phase of parallel hash searches. Returns false when no fragment
/// detected an outgoing edge.
#[allow(clippy::too_many_arguments)]
fn sketch_phase(
    sim: &mut Sim<'_>,
    backbone: &Backbone,
    fm: &mut FragmentMap,
    mode: SearchMode,
    repetitions: usize,
    masks: &[Vec<(usize, u64, u64, u64)>],
    log: &mut AdoptionLog,
    phase: usize,
) -> Result<bool> {
    let g = sim.graph();
    let n = g.n();
    let widths = sim.widths();
    let tag_bits = widths.id;
    let root = backbone.root;
    let snap = log.snapshot(&fm.label);

    // node side: a cursor for the node's own fragment
    let mut cursors: Vec<Option<Cursor>> = (0..n)
        .map(|v| (!fm.retired[v]).then(|| Cursor::new(mode, &widths, repetitions)))
        .collect();
    // root side
    let mut control: BTreeMap<NodeId, Cursor> = BTreeMap::new();
    let mut chosen: BTreeMap<NodeId, EdgeId> = BTreeMap::new();
    let mut wave = 0usize;
    loop {
        let items: Vec<Vec<(u64, Word)>> = (0..n)
            .map(|v| match &cursors[v] {
                Some(c) if !c.is_done() => {
                    let p = c.parity(masks[v].iter().map(|&(_, code, w, m)| (code, w, m)));
                    if p == 0 {
                        Vec::new()
                    } else {
                        vec![(fm.label[v].0, Word::new(p, c.answer_width()))]
                    }
                }
                _ => Vec::new(),
            })
            .collect();
        let collected = pipelined_convergecast(
            sim,
            &format!("merge/{phase}/up"),
            &backbone.tree,
            items,
            xor,
            tag_bits,
            None,
        )?;
        let answers = &collected[root];

        let mut down = Vec::new();
        if wave == 0 {
            for &label in answers.keys() {
                control.insert(NodeId(label), Cursor::new(mode, &widths, repetitions));
            }
        }
        for (&frag, cursor) in control.iter_mut() {
            if cursor.is_done() {
                continue;
            }
            let v = answers.get(&frag.0).map_or(0, |w| w.value);
            match cursor.decide(v) {
                Decision::Next { bit, spec } => down.push(Down::Next { frag, bit, spec }),
                Decision::Finish(out) => {
                    let edge = match out {
                        SearchOutcome::Edge(e) => Some(e),
                        _ => None,
                    };
                    down.push(Down::Finish { frag, edge });
                }
            }
        }
        let mut root_items = vec![Vec::new(); n];
        let all_done = control.values().all(Cursor::is_done);
        root_items[root] = down;
        let got = pipelined_broadcast(sim, &format!("merge/{phase}/down"), &backbone.tree, root_items)?;

        // members replay the decisions for their fragment
        for v in 0..n {
            let Some(c) = cursors[v].as_mut() else { continue };
            if c.is_done() {
                continue;
            }
            let mine = got[v].iter().find(|d| match d {
                Down::Next { frag, .. } | Down::Finish { frag, .. } => *frag == fm.label[v],
                _ => false,
            });
            match mine {
                Some(Down::Next { bit, spec, .. }) => c.advance(*bit, *spec),
                Some(Down::Finish { .. }) => c.finish(),
                _ => {
                    // nothing detected: the fragment has no outgoing edge
                    c.finish();
                    if wave == 0 && mode == SearchMode::Any {
                        fm.retired[v] = true;
                    }
                }
            }
            if wave == 0 {
                debug_assert!(mine.is_some() || !control.contains_key(&fm.label[v]));
            }
        }
        for d in &got[root] {
            if let Down::Finish { frag, edge: Some(e) } = d {
                chosen.insert(*frag, *e);
            }
        }
        wave += 1;
        if all_done {
            break;
        }
    }
    if chosen.is_empty() {
        return Ok(false);
    }

    // outside endpoints report their label; every node saw the Finish items
    let items: Vec<Vec<(u64, Word)>> = (0..n)
        .map(|v| {
            chosen
                .iter()
                .filter(|(f, e)| e.contains(g.id(v)) && fm.label[v] != **f)
                .map(|(f, _)| (f.0, Word::new(fm.label[v].0, widths.id)))
                .collect()
        })
        .collect();
    let far = pipelined_convergecast(
        sim,
        &format!("merge/{phase}/far"),
        &backbone.tree,
        items,
        first,
        tag_bits,
        None,
    )?;
    let links: Vec<(NodeId, EdgeId, NodeId)> = chosen
        .iter()
        .filter_map(|(f, e)| far[root].get(&f.0).map(|w| (*f, *e, NodeId(w.value))))
        .collect();
    let mut down: Vec<Down> = links.iter().map(|&(_, edge, _)| Down::Adopt { edge }).collect();
    down.dedup();
    down.extend(merge_at_root(&links));
    finish_phase(sim, backbone, fm, log, snap, phase, down, &links)?;
    Ok(true)
}

/// One phase where nodes learn neighbor labels directly.
fn exchange_phase(
    sim: &mut Sim<'_>,
    backbone: &Backbone,
    fm: &mut FragmentMap,
    log: &mut AdoptionLog,
    phase: usize,
) -> Result<bool> {
    let n = sim.graph().n();
    let tag_bits = sim.widths().id;
    let snap = log.snapshot(&fm.label);
    let labels = exchange_labels(sim, &format!("merge/{phase}/exchange"), fm)?;
    let items: Vec<Vec<(u64, Cand)>> = (0..n)
        .map(|v| {
            local_candidate(sim, v, fm, &labels[v])
                .map(|c| (fm.label[v].0, c))
                .into_iter()
                .collect()
        })
        .collect();
    let best = pipelined_convergecast(
        sim,
        &format!("merge/{phase}/up"),
        &backbone.tree,
        items,
        Cand::min,
        tag_bits,
        None,
    )?;
    let links: Vec<(NodeId, EdgeId, NodeId)> = best[backbone.root]
        .iter()
        .map(|(&f, c)| (NodeId(f), c.edge, c.far))
        .collect();
    if links.is_empty() {
        return Ok(false);
    }
    let mut down: Vec<Down> = links.iter().map(|&(_, edge, _)| Down::Adopt { edge }).collect();
    down.dedup();
    down.extend(merge_at_root(&links));
    finish_phase(sim, backbone, fm, log, snap, phase, down, &links)?;
    Ok(true)
}

/// Root-local merge: union along chosen edges, new label is the minimum.
fn merge_at_root(links: &[(NodeId, EdgeId, NodeId)]) -> Vec<Down> {
    let mut labels: Vec<NodeId> = links.iter().flat_map(|&(f, _, t)| [f, t]).collect();
    labels.sort();
    labels.dedup();
    let index = |x: NodeId| labels.binary_search(&x).unwrap();
    let mut dsu = Dsu::new(labels.len());
    for &(f, _, t) in links {
        dsu.union(index(f), index(t));
    }
    let mut min_of: BTreeMap<usize, NodeId> = BTreeMap::new();
    for &l in &labels {
        let r = dsu.find(index(l));
        let e = min_of.entry(r).or_insert(l);
        *e = (*e).min(l);
    }
    labels
        .iter()
        .filter_map(|&l| {
            let new = min_of[&dsu.find(index(l))];
            (new != l).then_some(Down::Relabel { old: l, new })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn finish_phase(
    sim: &mut Sim<'_>,
    backbone: &Backbone,
    fm: &mut FragmentMap,
    log: &mut AdoptionLog,
    snap: usize,
    phase: usize,
    down: Vec<Down>,
    links: &[(NodeId, EdgeId, NodeId)],
) -> Result<()> {
    let g = sim.graph();
    let n = g.n();
    let mut root_items = vec![Vec::new(); n];
    root_items[backbone.root] = down;
    let got = pipelined_broadcast(sim, &format!("merge/{phase}/relabel"), &backbone.tree, root_items)?;
    for v in 0..n {
        let me = g.id(v);
        let mut relabel = None;
        for d in &got[v] {
            match *d {
                Down::Relabel { old, new } if old == fm.label[v] => relabel = Some(new),
                Down::Adopt { edge } if edge.contains(me) => fm.edges[g.edge_index(edge).unwrap()] = true,
                _ => {}
            }
        }
        if let Some(l) = relabel {
            fm.label[v] = l;
        }
    }
    for &(f, e, _) in links {
        log.adopt(g.edge_index(e).unwrap(), f, snap);
    }
    Ok(())
}
