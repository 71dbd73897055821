//! Edge-connectivity estimation by repeated edge sampling.
//!
//! The leader shares one hash function over the danner. For
//! `lambda = m, m/2, ..., 1` every edge copy is kept with probability
//! `p = min(1, c_s ln n / lambda)`, rounded up to a power of one half, and
//! the sampled subgraph is tested for connectivity. Both endpoints of an
//! edge evaluate the hash on the edge's id, so sampling costs no messages.
//! Because membership is a threshold on a fixed hash value, samples are
//! nested: an edge kept at `2^-t` is kept at `2^-(t-1)` as well.

use serde::{Deserialize, Serialize};

use crate::congest::{CongestConfig, Metrics, Sim, Word};
use crate::danner::DannerParams;
use crate::error::{Error, Result};
use crate::graph::{log2_ceil, oracle, EdgeId, Graph};
use crate::mst::{components_on, sum_at_root, Backbone};
use crate::primitives::{broadcast, pipelined_broadcast};
use crate::sketch::HashSpec;

/// Calibrated slack of the estimate: with `L = log2 n`, the estimate lies in
/// `[lambda / (C_APPROX L), C_APPROX L lambda]`.
pub const C_APPROX: f64 = 2.0;

/// The interval [`C_APPROX`] promises for a graph on `n` nodes.
pub fn bracket(lambda: u64, n: usize) -> (f64, f64) {
    let slack = C_APPROX * (n.max(2) as f64).log2();
    (lambda as f64 / slack, lambda as f64 * slack)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MincutParams {
    pub danner: DannerParams,
    /// Sampling constant in `p = c_s ln n / lambda`.
    pub c_s: f64,
    /// Hash independence `k = ceil(c_h log2 n)`.
    pub c_h: f64,
}

impl Default for MincutParams {
    fn default() -> Self {
        MincutParams {
            danner: DannerParams::default(),
            c_s: 2.0,
            c_h: 3.0,
        }
    }
}

impl MincutParams {
    pub fn with_delta(delta: f64) -> Self {
        MincutParams {
            danner: DannerParams::with_delta(delta),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.danner.validate()?;
        if self.danner.delta > 0.5 {
            return Err(Error::param("delta", "must be in [0, 0.5]"));
        }
        if !(self.c_s > 0.0) {
            return Err(Error::param("c_s", "must be positive"));
        }
        if !(self.c_h > 0.0) {
            return Err(Error::param("c_h", "must be positive"));
        }
        Ok(())
    }

    pub fn independence(&self, n: usize) -> usize {
        ((self.c_h * log2_ceil(n) as f64).ceil() as usize).max(2)
    }
}

/// Smallest `t` with `2^-t >= p`.
pub fn dyadic_level(p: f64) -> u32 {
    if p >= 1.0 {
        return 0;
    }
    let t = (-p.log2()).floor();
    t.clamp(0.0, 63.0) as u32
}

pub fn sampling_probability(c_s: f64, n: usize, lambda_hat: u64) -> f64 {
    (c_s * (n.max(2) as f64).ln() / lambda_hat.max(1) as f64).min(1.0)
}

/// Whether copy `copy` of edge `eid` is in the sample at level `t`
/// (probability `2^-t`).
pub fn sample_membership(spec: &HashSpec, eid: EdgeId, id_bits: u32, copy: u32, t: u32) -> bool {
    let key = eid.encode(id_bits) | ((copy as u64) << (2 * id_bits));
    spec.below_dyadic(key, t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub lambda_hat: u64,
    /// Sampling level: `p = 2^-level`.
    pub level: u32,
    pub sampled_copies: u64,
    pub connected: bool,
    pub rounds: u64,
    pub messages: u64,
}

#[derive(Clone, Debug)]
pub struct MincutResult {
    /// First `lambda_hat` whose sample was connected.
    pub estimate: Option<u64>,
    pub trials: Vec<Trial>,
    pub metrics: Metrics,
}

/// Estimates the edge connectivity of a connected multigraph.
pub fn approx_mincut(g: &Graph, params: MincutParams, seed: u64, cfg: CongestConfig) -> Result<MincutResult> {
    run(g, params, seed, cfg, true)
}

/// Every trial of the sweep, without stopping at the first connected sample.
pub fn sampling_connectivity_curve(
    g: &Graph,
    params: MincutParams,
    seed: u64,
    cfg: CongestConfig,
) -> Result<Vec<Trial>> {
    Ok(run(g, params, seed, cfg, false)?.trials)
}

fn run(g: &Graph, params: MincutParams, seed: u64, cfg: CongestConfig, stop: bool) -> Result<MincutResult> {
    params.validate()?;
    if !oracle::is_connected(g) {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let id_bits = g.id_bits();
    let mut sim = Sim::new(g, cfg, seed);
    let backbone = Backbone::build(&mut sim, params.danner)?;

    // share the hash, one 64-bit coefficient per item
    let k = params.independence(n);
    let coeffs: Vec<u64> = {
        use rand::Rng;
        let rng = sim.rng_of(backbone.root);
        (0..k).map(|_| rng.gen()).collect()
    };
    let mut items = vec![Vec::new(); n];
    items[backbone.root] = coeffs.iter().map(|&c| Word::new(c, 64)).collect();
    let got = pipelined_broadcast(&mut sim, "mincut/hash", &backbone.tree, items)?;
    let specs: Vec<HashSpec> = got
        .iter()
        .map(|words| HashSpec::new(words.iter().map(|w| w.value).collect()))
        .collect();

    // everyone learns m (with multiplicity)
    let degrees: Vec<u64> = (0..n)
        .map(|v| g.adj(v).iter().map(|a| g.edge(a.edge).mult as u64).sum())
        .collect();
    let m = sum_at_root(&mut sim, "mincut/count", &backbone, &degrees)? / 2;
    let mut root_values = vec![None; n];
    root_values[backbone.root] = Some(Word::new(m, 2 * sim.widths().log_n + 2));
    broadcast(&mut sim, "mincut/count", &backbone.tree, root_values)?;

    let mut trials = Vec::new();
    let mut estimate = None;
    let mut lambda_hat = m.max(1);
    loop {
        let level = dyadic_level(sampling_probability(params.c_s, n, lambda_hat));
        let mut marks = vec![false; g.edges().len()];
        let mut sampled_copies = 0;
        for (i, e) in g.edges().iter().enumerate() {
            let kept = |v: usize| (0..e.mult).filter(|&c| sample_membership(&specs[v], e.id, id_bits, c, level)).count();
            let (at_u, at_v) = (kept(e.u), kept(e.v));
            if at_u != at_v {
                return Err(Error::ProtocolFailure(format!("endpoints disagree on sampling {}", e.id)));
            }
            sampled_copies += at_u as u64;
            marks[i] = at_u > 0;
        }
        let before = sim.metrics().clone();
        let cc = components_on(&mut sim, &backbone, &marks, params.danner.a)?;
        let roots: Vec<u64> = (0..n).map(|v| u64::from(cc.label[v] == g.id(v))).collect();
        let count = sum_at_root(&mut sim, "mincut/test", &backbone, &roots)?;
        let connected = count == 1;
        let mut root_values = vec![None; n];
        root_values[backbone.root] = Some(Word::new(u64::from(connected), 1));
        broadcast(&mut sim, "mincut/test", &backbone.tree, root_values)?;
        let cost = sim.metrics().since(&before);
        trials.push(Trial {
            lambda_hat,
            level,
            sampled_copies,
            connected,
            rounds: cost.rounds,
            messages: cost.messages,
        });
        if connected && estimate.is_none() {
            estimate = Some(lambda_hat);
            if stop {
                break;
            }
        }
        if lambda_hat == 1 {
            break;
        }
        lambda_hat /= 2;
    }
    Ok(MincutResult {
        estimate,
        trials,
        metrics: sim.into_metrics(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn levels_round_probability_up() {
        assert_eq!(dyadic_level(1.0), 0);
        assert_eq!(dyadic_level(0.5), 1);
        assert_eq!(dyadic_level(0.3), 1);
        assert_eq!(dyadic_level(0.25), 2);
        assert_eq!(dyadic_level(0.01), 6);
    }

    #[test]
    fn half_sampling_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = EdgeId::new(crate::graph::NodeId(3), crate::graph::NodeId(9));
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| sample_membership(&HashSpec::random(&mut rng, 8), e, 8, 0, 1))
            .count();
        let f = hits as f64 / trials as f64;
        assert!((0.495..=0.505).contains(&f), "{f}");
    }

    #[test]
    fn two_edges_are_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = EdgeId::new(crate::graph::NodeId(1), crate::graph::NodeId(2));
        let b = EdgeId::new(crate::graph::NodeId(2), crate::graph::NodeId(3));
        let trials = 40_000;
        let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
        for _ in 0..trials {
            let spec = HashSpec::random(&mut rng, 8);
            let x = sample_membership(&spec, a, 8, 0, 1) as u8 as f64;
            let y = sample_membership(&spec, b, 8, 0, 1) as u8 as f64;
            sa += x;
            sb += y;
            sab += x * y;
        }
        let t = trials as f64;
        let cov = sab / t - (sa / t) * (sb / t);
        // standard error of the covariance of two fair coins is 1/(4 sqrt(t))
        assert!(cov.abs() < 3.0 / (4.0 * t.sqrt()), "{cov}");
    }

    #[test]
    fn samples_are_nested() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = HashSpec::random(&mut rng, 6);
        for x in 1..200u64 {
            let e = EdgeId::new(crate::graph::NodeId(x), crate::graph::NodeId(x + 1000));
            for t in 1..10 {
                if sample_membership(&spec, e, 12, 2, t) {
                    assert!(sample_membership(&spec, e, 12, 2, t - 1));
                }
            }
            assert!(sample_membership(&spec, e, 12, 0, 0));
        }
    }
}
