//! Broadcast and convergecast over rooted trees (one or many at once).
//!
//! Pipelined convergecast: every node forwards its items in increasing tag
//! order, combining equal tags. Tag `t` leaves a node only once each child
//! has either reported a tag `>= t` or finished, so nothing with tag `<= t`
//! can arrive afterwards. With `k` distinct tags it takes at most
//! `depth + k` rounds.

use std::collections::BTreeMap;

use super::LocalTree;
use crate::congest::{Ctx, NodeProgram, Payload, Sim, Status, Widths};
use crate::error::{Error, Result};
use crate::graph::NodeId;

#[derive(Clone, Debug)]
pub struct Item<T> {
    pub tag: u64,
    pub value: T,
    /// No further items follow from this sender.
    pub last: bool,
    /// Public width of `tag` (known to all nodes, not transmitted).
    pub tag_bits: u32,
}

#[derive(Clone, Debug)]
pub enum CastMsg<T> {
    Item(Item<T>),
    /// The sender has nothing (more) to report.
    Done,
}

impl<T: Payload> Payload for CastMsg<T> {
    fn bits(&self, w: &Widths) -> u64 {
        match self {
            CastMsg::Item(it) => 2 + it.tag_bits as u64 + it.value.bits(w),
            CastMsg::Done => 1,
        }
    }
}

/// Sends the root's value down the tree; a message is the bare value.
#[derive(Clone, Debug)]
pub struct BroadcastNode<T> {
    children: Vec<NodeId>,
    value: Option<T>,
    is_root: bool,
    sent: bool,
}

impl<T> BroadcastNode<T> {
    pub fn new(tree: Option<&LocalTree>, root_value: Option<T>) -> Self {
        BroadcastNode {
            children: tree.map(|t| t.children.clone()).unwrap_or_default(),
            is_root: tree.is_some_and(|t| t.is_root()),
            value: root_value,
            sent: false,
        }
    }

    pub fn value(&self) -> Option<&T> {
        self.value.as_ref()
    }
}

impl<T: Payload + Clone> NodeProgram for BroadcastNode<T> {
    type Msg = T;

    fn step(&mut self, ctx: &mut Ctx<'_, T>) -> Status {
        if !self.is_root {
            if let Some((_, v)) = ctx.inbox().first() {
                self.value = Some(v.clone());
            }
        }
        if !self.sent {
            if let Some(v) = &self.value {
                self.sent = true;
                for &c in &self.children {
                    ctx.send(c, v.clone());
                }
            }
        }
        Status::Idle
    }
}

/// Every tree root sends its value to all nodes of its tree.
pub fn broadcast<T: Payload + Clone>(
    sim: &mut Sim<'_>,
    phase: &str,
    trees: &[Option<LocalTree>],
    mut root_values: Vec<Option<T>>,
) -> Result<Vec<Option<T>>> {
    let programs = (0..trees.len())
        .map(|v| {
            let val = if trees[v].as_ref().is_some_and(|t| t.is_root()) { root_values[v].take() } else { None };
            BroadcastNode::new(trees[v].as_ref(), val)
        })
        .collect();
    let programs = sim.run(phase, programs)?;
    Ok(programs.into_iter().map(|p| p.value).collect())
}

/// Streams the root's items down the tree, one per round.
#[derive(Clone, Debug)]
pub struct PipeBroadcastNode<T> {
    children: Vec<NodeId>,
    is_root: bool,
    outgoing: Vec<T>,
    cursor: usize,
    received: Vec<T>,
    complete: bool,
}

impl<T: Clone> PipeBroadcastNode<T> {
    pub fn new(tree: Option<&LocalTree>, root_items: Vec<T>) -> Self {
        let is_root = tree.is_some_and(|t| t.is_root());
        PipeBroadcastNode {
            children: tree.map(|t| t.children.clone()).unwrap_or_default(),
            is_root,
            received: if is_root { root_items.clone() } else { Vec::new() },
            outgoing: if is_root { root_items } else { Vec::new() },
            cursor: 0,
            complete: is_root,
        }
    }

    pub fn items(&self) -> &[T] {
        &self.received
    }

    /// The end-of-stream marker arrived.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    fn forward(&self, msg: CastMsg<T>, ctx: &mut Ctx<'_, CastMsg<T>>) {
        for &c in &self.children {
            ctx.send(c, msg.clone());
        }
    }
}

impl<T: Payload + Clone> NodeProgram for PipeBroadcastNode<T> {
    type Msg = CastMsg<T>;

    fn step(&mut self, ctx: &mut Ctx<'_, CastMsg<T>>) -> Status {
        if self.is_root {
            if self.cursor == 0 && self.outgoing.is_empty() {
                self.cursor = 1;
                self.forward(CastMsg::Done, ctx);
                return Status::Idle;
            }
            if self.cursor < self.outgoing.len() {
                let last = self.cursor + 1 == self.outgoing.len();
                let msg = CastMsg::Item(Item {
                    tag: self.cursor as u64,
                    value: self.outgoing[self.cursor].clone(),
                    last,
                    tag_bits: 0,
                });
                self.cursor += 1;
                self.forward(msg, ctx);
                if !last {
                    return Status::Active;
                }
            }
            return Status::Idle;
        }
        for (_, msg) in ctx.inbox() {
            match msg {
                CastMsg::Item(it) => {
                    self.received.push(it.value.clone());
                    self.complete = it.last;
                }
                CastMsg::Done => self.complete = true,
            }
            self.forward(msg.clone(), ctx);
        }
        Status::Idle
    }
}

/// Every tree root streams its item list to all nodes of its tree.
pub fn pipelined_broadcast<T: Payload + Clone>(
    sim: &mut Sim<'_>,
    phase: &str,
    trees: &[Option<LocalTree>],
    mut root_items: Vec<Vec<T>>,
) -> Result<Vec<Vec<T>>> {
    let programs = (0..trees.len())
        .map(|v| PipeBroadcastNode::new(trees[v].as_ref(), std::mem::take(&mut root_items[v])))
        .collect();
    let programs = sim.run(phase, programs)?;
    Ok(programs.into_iter().map(|p| p.received).collect())
}

/// Pipelined convergecast with per-tag combining.
#[derive(Clone, Debug)]
pub struct ConvergecastNode<T> {
    me: NodeId,
    member: bool,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    buffer: BTreeMap<u64, T>,
    child_last: Vec<Option<u64>>,
    child_done: Vec<bool>,
    sent: usize,
    finished: bool,
    combine: fn(&T, &T) -> T,
    tag_bits: u32,
    bound: Option<usize>,
    fault: bool,
}

impl<T: Clone> ConvergecastNode<T> {
    pub fn new(
        me: NodeId,
        tree: Option<&LocalTree>,
        items: Vec<(u64, T)>,
        combine: fn(&T, &T) -> T,
        tag_bits: u32,
        bound: Option<usize>,
    ) -> Self {
        let mut buffer: BTreeMap<u64, T> = BTreeMap::new();
        for (tag, v) in items {
            Self::merge(&mut buffer, combine, tag, v);
        }
        let children = tree.map(|t| t.children.clone()).unwrap_or_default();
        ConvergecastNode {
            me,
            member: tree.is_some(),
            parent: tree.and_then(|t| t.parent),
            child_last: vec![None; children.len()],
            child_done: vec![false; children.len()],
            children,
            buffer,
            sent: 0,
            finished: false,
            combine,
            tag_bits,
            bound,
            fault: false,
        }
    }

    fn merge(buffer: &mut BTreeMap<u64, T>, combine: fn(&T, &T) -> T, tag: u64, v: T) {
        match buffer.get_mut(&tag) {
            Some(cur) => *cur = combine(cur, &v),
            None => {
                buffer.insert(tag, v);
            }
        }
    }

    /// Combined items (meaningful at roots once the run has ended).
    pub fn collected(&self) -> &BTreeMap<u64, T> {
        &self.buffer
    }

    pub fn into_collected(self) -> BTreeMap<u64, T> {
        self.buffer
    }

    pub fn faulted(&self) -> bool {
        self.fault
    }

    fn all_done(&self) -> bool {
        self.child_done.iter().all(|&d| d)
    }

    fn ready(&self, tag: u64) -> bool {
        (0..self.children.len()).all(|i| self.child_done[i] || self.child_last[i].is_some_and(|l| l >= tag))
    }
}

impl<T: Payload + Clone> NodeProgram for ConvergecastNode<T> {
    type Msg = CastMsg<T>;

    fn step(&mut self, ctx: &mut Ctx<'_, CastMsg<T>>) -> Status {
        if !self.member || self.finished {
            return Status::Idle;
        }
        for (src, msg) in ctx.inbox() {
            let Some(i) = self.children.iter().position(|c| c == src) else {
                continue;
            };
            match msg {
                CastMsg::Item(it) => {
                    Self::merge(&mut self.buffer, self.combine, it.tag, it.value.clone());
                    self.child_last[i] = Some(it.tag);
                    self.child_done[i] |= it.last;
                }
                CastMsg::Done => self.child_done[i] = true,
            }
        }
        if self.bound.is_some_and(|b| self.sent + self.buffer.len() > b) {
            self.fault = true;
            self.finished = true;
            return Status::Idle;
        }
        let Some(parent) = self.parent else {
            self.finished = self.all_done();
            return Status::Idle;
        };
        match self.buffer.first_key_value().map(|(t, _)| *t) {
            Some(tag) if self.ready(tag) => {
                let value = self.buffer.remove(&tag).unwrap();
                let last = self.buffer.is_empty() && self.all_done();
                self.sent += 1;
                self.finished = last;
                ctx.send(
                    parent,
                    CastMsg::Item(Item {
                        tag,
                        value,
                        last,
                        tag_bits: self.tag_bits,
                    }),
                );
                match self.buffer.first_key_value() {
                    Some((&next, _)) if self.ready(next) => Status::Active,
                    _ => Status::Idle,
                }
            }
            None if self.all_done() => {
                self.finished = true;
                ctx.send(parent, CastMsg::Done);
                Status::Idle
            }
            _ => Status::Idle,
        }
    }
}

/// Collects every node's `(tag, value)` items at its tree root, combining
/// equal tags. Returns the combined map per node (empty except at roots).
///
/// With `bound = Some(b)`, a node that would handle more than `b` distinct
/// tags aborts the run with [`Error::TagBound`].
pub fn pipelined_convergecast<T: Payload + Clone>(
    sim: &mut Sim<'_>,
    phase: &str,
    trees: &[Option<LocalTree>],
    mut items: Vec<Vec<(u64, T)>>,
    combine: fn(&T, &T) -> T,
    tag_bits: u32,
    bound: Option<usize>,
) -> Result<Vec<BTreeMap<u64, T>>> {
    let ids: Vec<NodeId> = sim.graph().ids().to_vec();
    let programs = (0..trees.len())
        .map(|v| {
            let own = if trees[v].is_some() { std::mem::take(&mut items[v]) } else { Vec::new() };
            ConvergecastNode::new(ids[v], trees[v].as_ref(), own, combine, tag_bits, bound)
        })
        .collect();
    let programs = sim.run(phase, programs)?;
    if let Some(p) = programs.iter().find(|p| p.fault) {
        return Err(Error::TagBound {
            node: p.me,
            bound: bound.unwrap_or(0),
        });
    }
    Ok(programs
        .into_iter()
        .map(|p| if p.parent.is_none() { p.buffer } else { BTreeMap::new() })
        .collect())
}
