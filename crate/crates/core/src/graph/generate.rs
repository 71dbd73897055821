use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{oracle, Graph, NodeId};
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    Path { n: usize },
    Cycle { n: usize },
    Star { n: usize },
    Complete { n: usize },
    /// Erdős–Rényi `G(n, p)`, resampled until connected.
    Gnp { n: usize, p: f64 },
    /// Two `k`-cliques joined by `bridges` disjoint edges.
    Barbell { k: usize, bridges: usize },
    /// Unit-square geometric graph, resampled until connected.
    Geometric { n: usize, radius: f64 },
    Torus { rows: usize, cols: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// A random permutation of `1..=m`.
    #[default]
    Distinct,
    /// Every edge has weight 1.
    Unit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdMode {
    /// Injective random ids from `1..=n^3`.
    #[default]
    Random,
    /// Ids `1..=n` in index order.
    Sequential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenOptions {
    pub weights: WeightMode,
    pub ids: IdMode,
    /// Multiplicity given to every edge.
    pub multiplicity: u32,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            weights: WeightMode::Distinct,
            ids: IdMode::Random,
            multiplicity: 1,
        }
    }
}

impl GeneratorKind {
    pub fn node_count(&self) -> usize {
        match *self {
            GeneratorKind::Path { n }
            | GeneratorKind::Cycle { n }
            | GeneratorKind::Star { n }
            | GeneratorKind::Complete { n }
            | GeneratorKind::Gnp { n, .. }
            | GeneratorKind::Geometric { n, .. } => n,
            GeneratorKind::Barbell { k, .. } => 2 * k,
            GeneratorKind::Torus { rows, cols } => rows * cols,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| Err(Error::param(field, reason));
        match *self {
            GeneratorKind::Path { n } | GeneratorKind::Star { n } | GeneratorKind::Complete { n } if n == 0 => {
                bad("n", "must be positive")
            }
            GeneratorKind::Cycle { n } if n < 3 => bad("n", "a cycle needs at least 3 nodes"),
            GeneratorKind::Gnp { n, p } if n == 0 || !(0.0..=1.0).contains(&p) => {
                bad("p", "need n > 0 and p in [0, 1]")
            }
            GeneratorKind::Geometric { n, radius } if n == 0 || radius <= 0.0 => {
                bad("radius", "need n > 0 and a positive radius")
            }
            GeneratorKind::Barbell { k, bridges } if k < 2 || bridges == 0 || bridges > k => {
                bad("bridges", "need k >= 2 and 1 <= bridges <= k")
            }
            GeneratorKind::Torus { rows, cols } if rows < 3 || cols < 3 => bad("rows", "torus sides must be >= 3"),
            _ => Ok(()),
        }
    }

    fn pairs(&self, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
        match *self {
            GeneratorKind::Path { n } => (1..n).map(|i| (i - 1, i)).collect(),
            GeneratorKind::Cycle { n } => (0..n).map(|i| (i, (i + 1) % n)).collect(),
            GeneratorKind::Star { n } => (1..n).map(|i| (0, i)).collect(),
            GeneratorKind::Complete { n } => complete(0, n),
            GeneratorKind::Gnp { n, p } => {
                let mut out = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        if rng.gen_bool(p) {
                            out.push((a, b));
                        }
                    }
                }
                out
            }
            GeneratorKind::Barbell { k, bridges } => {
                let mut out = complete(0, k);
                out.extend(complete(k, k));
                out.extend((0..bridges).map(|i| (i, k + i)));
                out
            }
            GeneratorKind::Geometric { n, radius } => {
                let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
                let mut out = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
                        if dx * dx + dy * dy <= radius * radius {
                            out.push((a, b));
                        }
                    }
                }
                out
            }
            GeneratorKind::Torus { rows, cols } => {
                let at = |r: usize, c: usize| r * cols + c;
                let mut out = Vec::new();
                for r in 0..rows {
                    for c in 0..cols {
                        out.push((at(r, c), at(r, (c + 1) % cols)));
                        out.push((at(r, c), at((r + 1) % rows, c)));
                    }
                }
                out
            }
        }
    }

    fn is_random(&self) -> bool {
        matches!(self, GeneratorKind::Gnp { .. } | GeneratorKind::Geometric { .. })
    }
}

fn complete(offset: usize, k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            out.push((offset + a, offset + b));
        }
    }
    out
}

/// Generates a connected graph; identical `(kind, opts, seed)` give identical graphs.
pub fn generate(kind: &GeneratorKind, opts: GenOptions, seed: u64) -> Result<Graph> {
    kind.validate()?;
    if opts.multiplicity == 0 {
        return Err(Error::param("multiplicity", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = kind.node_count();
    let attempts = if kind.is_random() { MAX_ATTEMPTS } else { 1 };
    for _ in 0..attempts {
        let pairs = kind.pairs(&mut rng);
        let ids = assign_ids(n, opts.ids, &mut rng);
        let mut weights: Vec<u64> = match opts.weights {
            WeightMode::Distinct => (1..=pairs.len() as u64).collect(),
            WeightMode::Unit => vec![1; pairs.len()],
        };
        weights.shuffle(&mut rng);
        let g = Graph::new(
            ids,
            pairs
                .iter()
                .zip(weights)
                .map(|(&(a, b), w)| (a, b, w, opts.multiplicity)),
        )?;
        if oracle::is_connected(&g) {
            return Ok(g);
        }
    }
    Err(Error::GeneratorExhausted {
        attempts,
        reason: format!("{kind:?} never produced a connected graph"),
    })
}

fn assign_ids(n: usize, mode: IdMode, rng: &mut ChaCha8Rng) -> Vec<NodeId> {
    match mode {
        IdMode::Sequential => (1..=n as u64).map(NodeId).collect(),
        IdMode::Random => {
            let space = (n as u64).pow(3).max(1) as usize;
            sample(rng, space, n).into_iter().map(|x| NodeId(x as u64 + 1)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_star_shapes() {
        let p4 = generate(&GeneratorKind::Path { n: 4 }, GenOptions::default(), 1).unwrap();
        assert_eq!(p4.m(), 3);
        assert_eq!(oracle::diameter(&p4), Some(3));
        let star = generate(&GeneratorKind::Star { n: 6 }, GenOptions::default(), 1).unwrap();
        assert_eq!(star.m(), 5);
        assert_eq!(oracle::diameter(&star), Some(2));
    }

    #[test]
    fn distinct_weights_are_a_permutation() {
        let g = generate(&GeneratorKind::Complete { n: 7 }, GenOptions::default(), 3).unwrap();
        let mut w: Vec<u64> = g.edges().iter().map(|e| e.weight).collect();
        w.sort_unstable();
        assert_eq!(w, (1..=21).collect::<Vec<_>>());
    }

    #[test]
    fn random_ids_are_injective_and_bounded() {
        let g = generate(&GeneratorKind::Cycle { n: 30 }, GenOptions::default(), 9).unwrap();
        let mut ids: Vec<u64> = g.ids().iter().map(|v| v.0).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 30);
        assert!(ids.iter().all(|&x| (1..=27_000).contains(&x)));
    }

    #[test]
    fn unsatisfiable_connectivity_is_rejected() {
        let err = generate(&GeneratorKind::Gnp { n: 10, p: 0.0 }, GenOptions::default(), 0);
        assert!(matches!(err, Err(Error::GeneratorExhausted { .. })));
    }

    #[test]
    fn bad_params_are_rejected() {
        assert!(generate(&GeneratorKind::Cycle { n: 2 }, GenOptions::default(), 0).is_err());
        assert!(generate(&GeneratorKind::Barbell { k: 3, bridges: 4 }, GenOptions::default(), 0).is_err());
    }
}
