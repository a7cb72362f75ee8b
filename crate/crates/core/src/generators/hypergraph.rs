//! Weighted random hypergraph: each left vertex (hyperedge) picks `k`
//! distinct right vertices, vertex `j` weighted by `1 + |i − j|`.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Edge};
use crate::rng::{derive_seed, seeded_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HypergraphParams {
    pub n_left: usize,
    pub n_right: usize,
    pub k: usize,
    /// Drop the distance term so every right vertex has weight 1.
    pub uniform: bool,
}

impl HypergraphParams {
    /// `10s` hyperedges of size 7 over `8s` vertices.
    pub fn at_scale(s: usize) -> Self {
        HypergraphParams {
            n_left: 10 * s,
            n_right: 8 * s,
            k: 7,
            uniform: false,
        }
    }
}

/// Right vertices of hyperedge `i`, ascending.
fn hyperedge(p: &HypergraphParams, i: usize, seed: u64) -> Vec<usize> {
    let mut rng = seeded_rng(derive_seed(seed, i as u64));
    let mut keys: Vec<(f64, usize)> = (0..p.n_right)
        .map(|j| {
            let w = if p.uniform { 1.0 } else { 1.0 + i.abs_diff(j) as f64 };
            let u: f64 = rng.random();
            (u.ln() / w, j)
        })
        .collect();
    keys.select_nth_unstable_by(p.k - 1, |a, b| b.0.total_cmp(&a.0));
    let mut chosen: Vec<usize> = keys[..p.k].iter().map(|&(_, j)| j).collect();
    chosen.sort_unstable();
    chosen
}

/// Weighted sampling without replacement by exponential keys: the `k`
/// largest values of `ln(u) / weight` form the sample. Right vertices that
/// are never picked are dropped.
pub fn weighted_hypergraph(p: &HypergraphParams, seed: u64) -> Result<BipartiteGraph> {
    if p.n_left == 0 || p.n_right == 0 || p.k == 0 {
        return Err(Error::param("hypergraph parameters must be positive"));
    }
    if p.k > p.n_right {
        return Err(Error::param(format!("k={} exceeds n_right={}", p.k, p.n_right)));
    }
    let rows: Vec<Vec<Edge>> = (0..p.n_left)
        .into_par_iter()
        .map(|i| hyperedge(p, i, seed).into_iter().map(|j| Edge::new(i, j)).collect())
        .collect();
    let g = BipartiteGraph::new(p.n_left, p.n_right, rows.into_iter().flatten().collect())?;
    Ok(g.compact().graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_hyperedge_has_k_vertices() {
        let g = weighted_hypergraph(&HypergraphParams::at_scale(10), 1).unwrap();
        assert_eq!(g.n_left(), 100);
        assert!((0..g.n_left()).all(|i| g.left_degree(i) == 7));
        assert_eq!(g.dedup().n_edges(), g.n_edges());
        assert!((0..g.n_right()).all(|j| g.right_degree(j) > 0));
    }

    #[test]
    fn far_vertices_are_favoured() {
        // weights on row 0 grow with j
        let p = HypergraphParams {
            n_left: 1,
            n_right: 100,
            k: 10,
            uniform: false,
        };
        let mean: f64 = (0..200)
            .flat_map(|seed| hyperedge(&p, 0, seed))
            .map(|j| j as f64)
            .sum::<f64>()
            / 2000.0;
        assert!(mean > 60.0, "{mean}");
        let u = HypergraphParams { uniform: true, ..p };
        let mean_u: f64 = (0..200).flat_map(|seed| hyperedge(&u, 0, seed)).map(|j| j as f64).sum::<f64>() / 2000.0;
        assert!((mean_u - 49.5).abs() < 3.0, "{mean_u}");
    }

    #[test]
    fn single_draw_probability_matches_weight() {
        // k = 1 is a single weighted draw: P(j) = w_j / Σ w
        let p = HypergraphParams {
            n_left: 1,
            n_right: 4,
            k: 1,
            uniform: false,
        };
        let reps = 40_000u64;
        let mut counts = vec![0u64; 4];
        for seed in 0..reps {
            counts[hyperedge(&p, 0, seed)[0]] += 1;
        }
        let expected: Vec<f64> = (1..=4).map(|w| w as f64 / 10.0).collect();
        let (_, pv) = crate::stats::chi_square_gof(&counts, &expected);
        assert!(pv > 1e-4, "{counts:?}");
    }

    #[test]
    fn k_too_large() {
        let p = HypergraphParams {
            n_left: 3,
            n_right: 4,
            k: 5,
            uniform: true,
        };
        assert!(weighted_hypergraph(&p, 0).is_err());
    }

    #[test]
    fn reproducible() {
        let p = HypergraphParams::at_scale(5);
        assert_eq!(weighted_hypergraph(&p, 8).unwrap().edges(), weighted_hypergraph(&p, 8).unwrap().edges());
    }
}
