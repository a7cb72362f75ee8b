//! Ordered two-block model: every incidence falls into `A×B` with
//! probability `alpha`, otherwise into `Aᶜ×Bᶜ`, and `A`, `B` come first.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourpoint::PATTERNS;
use crate::graph::{BipartiteGraph, Edge};
use crate::permpattern::{direct_sum, factorial, Permutation};
use crate::rng::seeded_rng;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param(format!("alpha must be in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn binomial4(alpha: f64) -> [f64; 5] {
    let b = 1.0 - alpha;
    [
        b.powi(4),
        4.0 * alpha * b.powi(3),
        6.0 * alpha * alpha * b * b,
        4.0 * alpha.powi(3) * b,
        alpha.powi(4),
    ]
}

/// Membership of each of the 24 patterns in `Πₖ = Sₖ ⊕ S₄₋ₖ`: the patterns
/// possible when the first `k` edges lie in `A×B` and the rest do not.
pub fn pi_sets() -> [[bool; PATTERNS]; 5] {
    let mut sets = [[false; PATTERNS]; 5];
    for (k, set) in sets.iter_mut().enumerate() {
        for s in 0..factorial(k) {
            for t in 0..factorial(4 - k) {
                let pi = direct_sum(
                    &Permutation::from_lex_rank(k, s),
                    &Permutation::from_lex_rank(4 - k, t),
                );
                set[pi.lex_rank()] = true;
            }
        }
    }
    sets
}

/// Exact pattern law of the ordered two-block model. Given `k` edges in
/// `A×B`, the pattern is uniform on `Πₖ`, hence the `1/|Πₖ|` weights.
pub fn two_block_relfreq(alpha: f64) -> Result<[f64; PATTERNS]> {
    check_alpha(alpha)?;
    let py = binomial4(alpha);
    let sets = pi_sets();
    let mut h = [0.0; PATTERNS];
    for k in 0..5 {
        let size = sets[k].iter().filter(|&&b| b).count() as f64;
        for (i, hi) in h.iter_mut().enumerate() {
            if sets[k][i] {
                *hi += py[k] / size;
            }
        }
    }
    Ok(h)
}

/// The unnormalized weights `Σₖ P[Y=k]·1{π ∈ Πₖ}`, without the `1/|Πₖ|`
/// factor. Kept for comparison; the sampled law is [`two_block_relfreq`].
pub fn two_block_weights_as_printed(alpha: f64) -> Result<[f64; PATTERNS]> {
    check_alpha(alpha)?;
    let py = binomial4(alpha);
    let sets = pi_sets();
    let mut f = [0.0; PATTERNS];
    for k in 0..5 {
        for (i, fi) in f.iter_mut().enumerate() {
            if sets[k][i] {
                *fi += py[k];
            }
        }
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TwoBlockSizes {
    pub left_a: usize,
    pub left_rest: usize,
    pub right_b: usize,
    pub right_rest: usize,
}

impl TwoBlockSizes {
    pub fn square(side: usize) -> Self {
        TwoBlockSizes {
            left_a: side,
            left_rest: side,
            right_b: side,
            right_rest: side,
        }
    }
}

/// `n_edges` incidences, each uniform within `A×B` (probability `alpha`)
/// or `Aᶜ×Bᶜ`. Vertices `0..|A|` form `A` and `0..|B|` form `B`.
pub fn ordered_two_block_graph(
    alpha: f64,
    n_edges: usize,
    sizes: TwoBlockSizes,
    seed: u64,
) -> Result<BipartiteGraph> {
    check_alpha(alpha)?;
    let TwoBlockSizes {
        left_a,
        left_rest,
        right_b,
        right_rest,
    } = sizes;
    if left_a == 0 || left_rest == 0 || right_b == 0 || right_rest == 0 {
        return Err(Error::param("block sizes must be positive"));
    }
    let mut rng = seeded_rng(seed);
    let edges = (0..n_edges)
        .map(|_| {
            if rng.random::<f64>() < alpha {
                Edge::new(rng.random_range(0..left_a), rng.random_range(0..right_b))
            } else {
                Edge::new(
                    left_a + rng.random_range(0..left_rest),
                    right_b + rng.random_range(0..right_rest),
                )
            }
        })
        .collect();
    BipartiteGraph::new(left_a + left_rest, right_b + right_rest, edges)
}
