//! Exact centralized ground truth used to check the distributed algorithms.

use std::collections::VecDeque;

use super::{Graph, NodeId};
use crate::error::{Error, Result};

pub const DOMINATION_LIMIT: usize = 24;
pub const MINCUT_LIMIT: usize = 256;

/// Hop distances from `src` over edges accepted by `keep`; `u32::MAX` marks unreachable.
pub fn bfs_where(g: &Graph, src: usize, keep: impl Fn(usize) -> bool) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.n()];
    let mut queue = VecDeque::from([src]);
    dist[src] = 0;
    while let Some(x) = queue.pop_front() {
        for a in g.adj(x) {
            if dist[a.nbr] == u32::MAX && keep(a.edge) {
                dist[a.nbr] = dist[x] + 1;
                queue.push_back(a.nbr);
            }
        }
    }
    dist
}

pub fn bfs(g: &Graph, src: usize) -> Vec<u32> {
    bfs_where(g, src, |_| true)
}

/// Exact hop diameter over the kept edges; `None` if they do not connect all nodes.
pub fn diameter_where(g: &Graph, keep: impl Fn(usize) -> bool + Copy) -> Option<u32> {
    let mut best = 0;
    for s in 0..g.n() {
        let d = bfs_where(g, s, keep);
        let far = *d.iter().max()?;
        if far == u32::MAX {
            return None;
        }
        best = best.max(far);
    }
    Some(best)
}

pub fn diameter(g: &Graph) -> Option<u32> {
    diameter_where(g, |_| true)
}

/// Diameter of the subgraph induced on `members` using kept edges, `None` if it is split.
pub fn induced_diameter(g: &Graph, members: &[usize], keep: impl Fn(usize) -> bool + Copy) -> Option<u32> {
    let mut inside = vec![false; g.n()];
    for &v in members {
        inside[v] = true;
    }
    let keep_inside = |e: usize| {
        let edge = g.edge(e);
        keep(e) && inside[edge.u] && inside[edge.v]
    };
    let mut best = 0;
    for &s in members {
        let d = bfs_where(g, s, keep_inside);
        for &t in members {
            if d[t] == u32::MAX {
                return None;
            }
            best = best.max(d[t]);
        }
    }
    Some(best)
}

/// A shortest path from `s` to `t` as node indices.
pub fn shortest_path(g: &Graph, s: usize, t: usize) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; g.n()];
    parent[s] = s;
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        if x == t {
            break;
        }
        for a in g.adj(x) {
            if parent[a.nbr] == usize::MAX {
                parent[a.nbr] = x;
                queue.push_back(a.nbr);
            }
        }
    }
    if parent[t] == usize::MAX {
        return None;
    }
    let mut path = vec![t];
    while *path.last().unwrap() != s {
        path.push(parent[*path.last().unwrap()]);
    }
    path.reverse();
    Some(path)
}

/// Component label per node (the smallest `NodeId` in its component) over kept edges.
pub fn components_where(g: &Graph, keep: impl Fn(usize) -> bool + Copy) -> Vec<NodeId> {
    let mut label = vec![None; g.n()];
    for s in 0..g.n() {
        if label[s].is_some() {
            continue;
        }
        let d = bfs_where(g, s, keep);
        let members: Vec<usize> = (0..g.n()).filter(|&v| d[v] != u32::MAX).collect();
        let min = members.iter().map(|&v| g.id(v)).min().unwrap();
        for v in members {
            label[v] = Some(min);
        }
    }
    label.into_iter().map(Option::unwrap).collect()
}

pub fn components(g: &Graph) -> Vec<NodeId> {
    components_where(g, |_| true)
}

pub fn component_count(labels: &[NodeId]) -> usize {
    let mut l = labels.to_vec();
    l.sort_unstable();
    l.dedup();
    l.len()
}

pub fn is_connected(g: &Graph) -> bool {
    g.n() == 0 || bfs(g, 0).iter().all(|&d| d != u32::MAX)
}

/// Exact domination number by enumerating subsets in order of size.
pub fn domination_number(g: &Graph) -> Result<u32> {
    let n = g.n();
    if n > DOMINATION_LIMIT {
        return Err(Error::SizeGuard { n, limit: DOMINATION_LIMIT });
    }
    if n == 0 {
        return Ok(0);
    }
    let closed: Vec<u32> = (0..n)
        .map(|v| g.adj(v).iter().fold(1u32 << v, |acc, a| acc | (1 << a.nbr)))
        .collect();
    Ok(domination_number_masks(&closed))
}

/// Domination number from closed-neighborhood bitmasks (`n <= 32`).
pub fn domination_number_masks(closed: &[u32]) -> u32 {
    let n = closed.len();
    let full: u64 = (1u64 << n) - 1;
    for k in 1..=n as u32 {
        // Gosper's hack over all k-subsets.
        let mut set: u64 = (1u64 << k) - 1;
        while set <= full {
            let mut cover = 0u32;
            let mut rest = set;
            while rest != 0 {
                cover |= closed[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            if cover as u64 == full {
                return k;
            }
            let c = set & set.wrapping_neg();
            let r = set + c;
            set = (((r ^ set) >> 2) / c) | r;
        }
    }
    n as u32
}

/// The unique minimum spanning tree (edge indices, sorted) via Kruskal.
pub fn mst(g: &Graph) -> Result<Vec<usize>> {
    if !g.has_distinct_weights() {
        return Err(Error::DuplicateWeights);
    }
    let mut order: Vec<usize> = (0..g.simple_m()).collect();
    order.sort_by_key(|&e| g.edge(e).weight);
    let mut dsu = Dsu::new(g.n());
    let mut out = Vec::with_capacity(g.n().saturating_sub(1));
    for e in order {
        let edge = g.edge(e);
        if dsu.union(edge.u, edge.v) {
            out.push(e);
        }
    }
    if out.len() + 1 != g.n() && g.n() > 0 {
        return Err(Error::Disconnected);
    }
    out.sort_unstable();
    Ok(out)
}

/// Exact edge connectivity (multiplicity-weighted) via Stoer–Wagner.
pub fn mincut(g: &Graph) -> Result<u64> {
    let n = g.n();
    if n > MINCUT_LIMIT {
        return Err(Error::SizeGuard { n, limit: MINCUT_LIMIT });
    }
    if !is_connected(g) {
        return Ok(0);
    }
    if n < 2 {
        return Ok(0);
    }
    let mut w = vec![vec![0u64; n]; n];
    for e in g.edges() {
        w[e.u][e.v] += e.mult as u64;
        w[e.v][e.u] += e.mult as u64;
    }
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    while alive.len() > 1 {
        let mut used = vec![false; n];
        let mut key = vec![0u64; n];
        let mut prev = alive[0];
        let mut last = alive[0];
        for step in 0..alive.len() {
            let pick = *alive
                .iter()
                .filter(|&&v| !used[v])
                .max_by_key(|&&v| (key[v], std::cmp::Reverse(v)))
                .unwrap();
            used[pick] = true;
            if step == alive.len() - 1 {
                best = best.min(key[pick]);
                prev = last;
                last = pick;
                break;
            }
            last = pick;
            for &v in &alive {
                if !used[v] {
                    key[v] += w[pick][v];
                }
            }
        }
        // merge `last` into `prev`
        for &v in &alive {
            w[prev][v] += w[last][v];
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        alive.retain(|&v| v != last);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteVerdict {
    pub bipartite: bool,
    /// Node indices of an odd cycle (closed implicitly) when not bipartite.
    pub odd_cycle: Option<Vec<usize>>,
}

/// 2-colouring by BFS over kept edges.
pub fn bipartite_where(g: &Graph, keep: impl Fn(usize) -> bool) -> BipartiteVerdict {
    let n = g.n();
    let mut color = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for a in g.adj(x) {
                if !keep(a.edge) {
                    continue;
                }
                let y = a.nbr;
                if color[y] == u8::MAX {
                    color[y] = 1 - color[x];
                    parent[y] = x;
                    depth[y] = depth[x] + 1;
                    queue.push_back(y);
                } else if color[y] == color[x] {
                    return BipartiteVerdict {
                        bipartite: false,
                        odd_cycle: Some(odd_cycle(&parent, &depth, x, y)),
                    };
                }
            }
        }
    }
    BipartiteVerdict { bipartite: true, odd_cycle: None }
}

pub fn bipartite(g: &Graph) -> BipartiteVerdict {
    bipartite_where(g, |_| true)
}

fn odd_cycle(parent: &[usize], depth: &[usize], mut x: usize, mut y: usize) -> Vec<usize> {
    let mut left = vec![x];
    let mut right = vec![y];
    while depth[x] > depth[y] {
        x = parent[x];
        left.push(x);
    }
    while depth[y] > depth[x] {
        y = parent[y];
        right.push(y);
    }
    while x != y {
        x = parent[x];
        y = parent[y];
        left.push(x);
        right.push(y);
    }
    right.pop();
    right.reverse();
    left.extend(right);
    left
}

/// Union–find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GenOptions, GeneratorKind};

    fn gen(kind: GeneratorKind) -> Graph {
        generate(&kind, GenOptions::default(), 7).unwrap()
    }

    #[test]
    fn small_diameters_and_domination() {
        let p4 = gen(GeneratorKind::Path { n: 4 });
        assert_eq!(diameter(&p4), Some(3));
        assert_eq!(domination_number(&p4).unwrap(), 2);
        let star = gen(GeneratorKind::Star { n: 6 });
        assert_eq!(diameter(&star), Some(2));
        assert_eq!(domination_number(&star).unwrap(), 1);
    }

    #[test]
    fn disconnected_diameter_is_infinite() {
        let g = Graph::new(vec![NodeId(1), NodeId(2), NodeId(3)], [(0, 1, 1, 1)]).unwrap();
        assert_eq!(diameter(&g), None);
    }

    #[test]
    fn domination_size_guard() {
        let g = gen(GeneratorKind::Path { n: 25 });
        assert!(matches!(domination_number(&g), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn triangle_mst() {
        let g = Graph::new(vec![NodeId(1), NodeId(2), NodeId(3)], [(0, 1, 1, 1), (1, 2, 2, 1), (0, 2, 3, 1)]).unwrap();
        let t = mst(&g).unwrap();
        let w: Vec<u64> = t.iter().map(|&e| g.edge(e).weight).collect();
        assert_eq!(w, vec![1, 2]);
    }

    #[test]
    fn mst_rejects_duplicate_weights() {
        let g = Graph::new(vec![NodeId(1), NodeId(2), NodeId(3)], [(0, 1, 1, 1), (1, 2, 1, 1)]).unwrap();
        assert!(matches!(mst(&g), Err(Error::DuplicateWeights)));
    }

    #[test]
    fn mincut_small_cases() {
        assert_eq!(mincut(&gen(GeneratorKind::Cycle { n: 8 })).unwrap(), 2);
        assert_eq!(mincut(&gen(GeneratorKind::Complete { n: 6 })).unwrap(), 5);
        assert_eq!(mincut(&gen(GeneratorKind::Barbell { k: 5, bridges: 3 })).unwrap(), 3);
    }

    #[test]
    fn bipartite_cycles() {
        assert!(bipartite(&gen(GeneratorKind::Cycle { n: 4 })).bipartite);
        let c5 = gen(GeneratorKind::Cycle { n: 5 });
        let v = bipartite(&c5);
        assert!(!v.bipartite);
        let cyc = v.odd_cycle.unwrap();
        assert_eq!(cyc.len() % 2, 1);
        for i in 0..cyc.len() {
            let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
            assert!(c5.adj(a).iter().any(|x| x.nbr == b));
        }
    }
}
