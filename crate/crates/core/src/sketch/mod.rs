//! Hash-parity detection of edges leaving a connected component.
//!
//! A [`HashSpec`] is a random polynomial over GF(2^64) followed by a fixed
//! bijective mixer. Both endpoints of an edge evaluate it on the edge's
//! encoding without talking to each other, so when every member of a
//! component XORs the hash bits of its incident edges, internal edges
//! contribute twice and cancel; only leaving edges survive.

mod search;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use search::{
    find_any, find_min, random_specs, run_search, spec_mask, test_out, Cursor, Decision, Link, SearchInput,
    SearchMode, SearchMsg, SearchNode, SearchOutcome, SearchParams,
};

use crate::congest::{Payload, Widths};
use crate::graph::{EdgeId, NodeId};

/// Default amplification constant: `ceil(a * log2 n)` repetitions.
pub const DEFAULT_REPETITION: f64 = 3.0;

/// Floor on repetitions, so that small graphs still miss a query with
/// probability below `2^-20`.
pub const MIN_REPETITIONS: usize = 20;

/// Product in GF(2^64) modulo `x^64 + x^4 + x^3 + x + 1`.
pub fn gf_mul(a: u64, b: u64) -> u64 {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("pclmulqdq") {
            // SAFETY: the required CPU feature was detected at runtime.
            return unsafe { gf_mul_clmul(a, b) };
        }
    }
    gf_mul_portable(a, b)
}

/// Shift-and-add reference implementation of [`gf_mul`].
pub fn gf_mul_portable(mut a: u64, mut b: u64) -> u64 {
    let mut acc = 0u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        let carry = a >> 63;
        a <<= 1;
        if carry == 1 {
            a ^= 0x1B;
        }
    }
    acc
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq,sse2")]
unsafe fn gf_mul_clmul(a: u64, b: u64) -> u64 {
    use std::arch::x86_64::{_mm_clmulepi64_si128, _mm_cvtsi128_si64, _mm_set_epi64x, _mm_srli_si128};
    let p = _mm_clmulepi64_si128(_mm_set_epi64x(0, a as i64), _mm_set_epi64x(0, b as i64), 0x00);
    let lo = _mm_cvtsi128_si64(p) as u64;
    let hi = _mm_cvtsi128_si64(_mm_srli_si128(p, 8)) as u64;
    // x^64 = x^4 + x^3 + x + 1
    let fold = hi ^ (hi << 1) ^ (hi << 3) ^ (hi << 4);
    let over = (hi >> 63) ^ (hi >> 61) ^ (hi >> 60);
    lo ^ fold ^ over ^ (over << 1) ^ (over << 3) ^ (over << 4)
}

/// Fixed bijection on `u64` (splitmix64 finalizer).
pub fn mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// A `k`-wise independent hash: `mix(c_0 + c_1 x + ... + c_{k-1} x^{k-1})` over GF(2^64).
///
/// `mix` is a bijection, so every output bit stays `k`-wise independent and
/// uniform, while the parity of many outputs no longer collapses on
/// GF(2)-linear dependencies among the inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashSpec {
    coeffs: Vec<u64>,
}

impl HashSpec {
    pub fn new(coeffs: Vec<u64>) -> Self {
        assert!(!coeffs.is_empty(), "a hash spec needs at least one coefficient");
        HashSpec { coeffs }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Self {
        HashSpec::new((0..k.max(1)).map(|_| rng.gen()).collect())
    }

    pub fn independence(&self) -> usize {
        self.coeffs.len()
    }

    /// Size of the serialized description.
    pub fn bits(&self) -> u64 {
        64 * self.coeffs.len() as u64
    }

    pub fn eval(&self, key: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = gf_mul(acc, key) ^ c;
        }
        mix(acc)
    }

    pub fn bit(&self, key: u64) -> bool {
        self.eval(key) & 1 == 1
    }

    /// True with probability `2^-t`: the top `t` bits of the hash are zero.
    ///
    /// Keys sampled at level `t` are also sampled at every level below `t`.
    pub fn below_dyadic(&self, key: u64, t: u32) -> bool {
        t == 0 || (t < 64 && self.eval(key) >> (64 - t) == 0) || (t >= 64 && self.eval(key) == 0)
    }
}

impl Payload for HashSpec {
    fn bits(&self, _: &Widths) -> u64 {
        HashSpec::bits(self)
    }
}

/// Which edges take part in a parity computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restriction {
    /// Inclusive range over edge encodings.
    pub id_range: Option<(u64, u64)>,
    /// Inclusive upper bound on weights.
    pub max_weight: Option<u64>,
}

impl Restriction {
    pub fn admits(&self, code: u64, weight: u64) -> bool {
        self.id_range.is_none_or(|(lo, hi)| (lo..=hi).contains(&code)) && self.max_weight.is_none_or(|w| weight <= w)
    }
}

/// XOR of `h(e)` over a node's incident participating edges.
pub fn node_parity<'a>(
    spec: &HashSpec,
    incident: impl IntoIterator<Item = &'a (EdgeId, u64)>,
    restriction: &Restriction,
    id_bits: u32,
) -> bool {
    incident.into_iter().fold(false, |acc, (eid, w)| {
        let code = eid.encode(id_bits);
        if restriction.admits(code, *w) {
            acc ^ spec.bit(code)
        } else {
            acc
        }
    })
}

/// Edges with exactly one endpoint in `members`.
pub fn leaving_edges(members: &[NodeId], edges: &[(EdgeId, u64)]) -> Vec<(EdgeId, u64)> {
    edges
        .iter()
        .filter(|(e, _)| members.contains(&e.lo()) != members.contains(&e.hi()))
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gf_mul_identities() {
        assert_eq!(gf_mul(1, 0xDEAD), 0xDEAD);
        assert_eq!(gf_mul(0, 0xDEAD), 0);
        assert_eq!(gf_mul(2, 1 << 63), 0x1B);
        let (a, b, c) = (0x1234_5678_9ABC_DEF0, 0x0FED_CBA9_8765_4321, 0x1111_2222_3333_4444);
        assert_eq!(gf_mul(a, b), gf_mul(b, a));
        assert_eq!(gf_mul(a, b ^ c), gf_mul(a, b) ^ gf_mul(a, c));
        assert_eq!(gf_mul(gf_mul(a, b), c), gf_mul(a, gf_mul(b, c)));
    }

    #[test]
    fn fast_and_portable_products_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let (a, b): (u64, u64) = (rng.gen(), rng.gen());
            assert_eq!(gf_mul(a, b), gf_mul_portable(a, b));
        }
        assert_eq!(gf_mul(u64::MAX, u64::MAX), gf_mul_portable(u64::MAX, u64::MAX));
    }

    #[test]
    fn dyadic_sampling_is_nested() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = HashSpec::random(&mut rng, 8);
        for key in 0..2000u64 {
            for t in 1..10 {
                if spec.below_dyadic(key, t) {
                    assert!(spec.below_dyadic(key, t - 1));
                }
            }
            assert!(spec.below_dyadic(key, 0));
        }
    }

    #[test]
    fn restriction_predicates() {
        let r = Restriction {
            id_range: Some((10, 20)),
            max_weight: Some(5),
        };
        assert!(r.admits(10, 5));
        assert!(!r.admits(21, 1));
        assert!(!r.admits(15, 6));
        assert!(Restriction::default().admits(u64::MAX, u64::MAX));
    }
}
