//! Power iteration for the top eigenvector of `Γ_L = M Mᵀ − ω ωᵀ / N`,
//! where `M = Ω^{-1/2} Z Θ^{-1/2}` and `ω = √w`.
//!
//! The iteration runs in the rescaled coordinates `x = Ω^{-1/2} y`, where
//! one step is `x ↦ Ω⁻¹ Z Θ⁻¹ Zᵀ x − 1 (w·x)/N`, so that only degree
//! divisions and the two jagged adjacencies are needed.

use std::collections::VecDeque;

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_connected, BipartiteGraph, VertexOrder};
use crate::rng::{derive_seed, seeded_rng};

/// Below this many edges the matrix-vector products run sequentially.
const PARALLEL_EDGES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    #[default]
    L2,
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PowerMethodConfig {
    pub delta: f64,
    pub max_iter_factor: f64,
    pub normalization: Normalization,
    pub seed: u64,
    /// Replaces the `max_iter_factor · d̂` cap when set.
    pub max_iterations: Option<usize>,
}

impl Default for PowerMethodConfig {
    fn default() -> Self {
        PowerMethodConfig {
            delta: 0.05,
            max_iter_factor: 2.0,
            normalization: Normalization::L2,
            seed: 0,
            max_iterations: None,
        }
    }
}

impl PowerMethodConfig {
    pub fn with_seed(seed: u64) -> Self {
        PowerMethodConfig {
            seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::param(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.max_iter_factor >= 1.0) {
            return Err(Error::param(format!(
                "max_iter_factor must be at least 1, got {}",
                self.max_iter_factor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NaturalOrderResult {
    /// ζ over left vertices, unit 2-norm.
    pub left_scores: Vec<f64>,
    /// ξ = Mᵀζ over right vertices.
    pub right_scores: Vec<f64>,
    pub lambda1_estimate: f64,
    pub iterations: usize,
    pub residual: f64,
    pub diameter_estimate: usize,
    pub converged: bool,
    pub degenerate_suspected: bool,
    /// tan of the angle between the start vector and the returned ζ.
    pub tan_phi0_estimate: f64,
}

/// Number of BFS levels from left vertex `start` until every vertex is
/// reached, or `None` when some vertex is unreachable.
pub fn bfs_levels_from(g: &BipartiteGraph, start: usize) -> Option<usize> {
    let mut left_dist = vec![usize::MAX; g.n_left()];
    let mut right_dist = vec![usize::MAX; g.n_right()];
    let mut queue = VecDeque::new();
    left_dist[start] = 0;
    queue.push_back((true, start));
    let mut reached = 1;
    let mut deepest = 0;
    while let Some((is_left, v)) = queue.pop_front() {
        let dist = if is_left { left_dist[v] } else { right_dist[v] };
        deepest = deepest.max(dist);
        if is_left {
            for &e in g.left_edges(v) {
                let r = g.edges()[e].right;
                if right_dist[r] == usize::MAX {
                    right_dist[r] = dist + 1;
                    reached += 1;
                    queue.push_back((false, r));
                }
            }
        } else {
            for &e in g.right_edges(v) {
                let l = g.edges()[e].left;
                if left_dist[l] == usize::MAX {
                    left_dist[l] = dist + 1;
                    reached += 1;
                    queue.push_back((true, l));
                }
            }
        }
    }
    (reached == g.n_left() + g.n_right()).then_some(deepest)
}

/// Twice the BFS depth from a uniformly chosen left vertex.
pub fn bfs_diameter_estimate(g: &BipartiteGraph, seed: u64) -> Result<usize> {
    if g.n_left() == 0 {
        return Err(Error::EmptyInput);
    }
    let start = seeded_rng(seed).random_range(0..g.n_left());
    bfs_levels_from(g, start)
        .map(|levels| 2 * levels)
        .ok_or(Error::Disconnected)
}

fn check_degrees(g: &BipartiteGraph) -> Result<()> {
    if g.n_edges() == 0 {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = (0..g.n_left()).find(|&i| g.left_degree(i) == 0) {
        return Err(Error::ZeroDegree { side: "left", index: i });
    }
    if let Some(j) = (0..g.n_right()).find(|&j| g.right_degree(j) == 0) {
        return Err(Error::ZeroDegree { side: "right", index: j });
    }
    Ok(())
}

/// Stepwise access to the power iteration, exposing the current iterate in
/// the symmetric coordinates `y = √w · x`.
pub struct PowerIteration<'g> {
    g: &'g BipartiteGraph,
    w: Vec<f64>,
    d: Vec<f64>,
    sqrt_w: Vec<f64>,
    n_edges: f64,
    norm: Normalization,
    x: Vec<f64>,
    y: Vec<f64>,
    s: Vec<f64>,
    next: Vec<f64>,
    y0: Vec<f64>,
    iterations: usize,
    last_residual: f64,
    last_z_norm: f64,
}

impl<'g> PowerIteration<'g> {
    /// Checks degrees and draws the projected Gaussian start vector.
    /// Connectivity is the caller's responsibility.
    pub fn new(g: &'g BipartiteGraph, norm: Normalization, seed: u64) -> Result<Self> {
        check_degrees(g)?;
        let w: Vec<f64> = (0..g.n_left()).map(|i| g.left_degree(i) as f64).collect();
        let d: Vec<f64> = (0..g.n_right()).map(|j| g.right_degree(j) as f64).collect();
        let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let mut rng = seeded_rng(seed);
        let eta: Vec<f64> = (0..g.n_left()).map(|_| rng.sample(StandardNormal)).collect();
        let mut it = PowerIteration {
            g,
            w,
            d,
            sqrt_w,
            n_edges: g.n_edges() as f64,
            norm,
            x: vec![0.0; g.n_left()],
            y: eta,
            s: vec![0.0; g.n_right()],
            next: vec![0.0; g.n_left()],
            y0: Vec::new(),
            iterations: 0,
            last_residual: f64::INFINITY,
            last_z_norm: f64::NAN,
        };
        // project η orthogonal to ω in y coordinates
        let dot: f64 = it.y.iter().zip(&it.sqrt_w).map(|(a, b)| a * b).sum();
        for (yi, wi) in it.y.iter_mut().zip(&it.sqrt_w) {
            *yi -= dot / it.n_edges * wi;
        }
        it.normalize_y();
        it.sync_x();
        it.y0 = it.y.clone();
        Ok(it)
    }

    fn norm_of(&self, v: &[f64]) -> f64 {
        match self.norm {
            Normalization::L2 => v.iter().map(|a| a * a).sum::<f64>().sqrt(),
            Normalization::L1 => v.iter().map(|a| a.abs()).sum(),
        }
    }

    fn normalize_y(&mut self) -> f64 {
        let n = self.norm_of(&self.y);
        if n > 0.0 {
            self.y.iter_mut().for_each(|v| *v /= n);
        }
        n
    }

    fn sync_x(&mut self) {
        for ((xi, yi), sw) in self.x.iter_mut().zip(&self.y).zip(&self.sqrt_w) {
            *xi = yi / sw;
        }
    }

    /// `s = Θ⁻¹ Zᵀ x` then `next = Ω⁻¹ Z s`.
    fn apply(&mut self) {
        let g = self.g;
        let x = &self.x;
        let col = |j: usize| -> f64 {
            g.right_edges(j).iter().map(|&e| x[g.edges()[e].left]).sum::<f64>()
        };
        let parallel = g.n_edges() >= PARALLEL_EDGES;
        if parallel {
            self.s.par_iter_mut().enumerate().for_each(|(j, sj)| *sj = col(j));
        } else {
            self.s.iter_mut().enumerate().for_each(|(j, sj)| *sj = col(j));
        }
        self.s.iter_mut().zip(&self.d).for_each(|(sj, dj)| *sj /= dj);
        let s = &self.s;
        let row = |i: usize| -> f64 {
            g.left_edges(i).iter().map(|&e| s[g.edges()[e].right]).sum::<f64>()
        };
        if parallel {
            self.next.par_iter_mut().enumerate().for_each(|(i, v)| *v = row(i));
        } else {
            self.next.iter_mut().enumerate().for_each(|(i, v)| *v = row(i));
        }
        self.next.iter_mut().zip(&self.w).for_each(|(v, wi)| *v /= wi);
    }

    /// One iteration; returns `‖y_t − y_{t−1}‖` in the configured norm.
    pub fn step(&mut self) -> f64 {
        self.apply();
        let wx: f64 = self.w.iter().zip(&self.x).map(|(a, b)| a * b).sum();
        let shift = wx / self.n_edges;
        let prev = std::mem::take(&mut self.y);
        let mut y: Vec<f64> = self
            .next
            .iter()
            .zip(&self.sqrt_w)
            .map(|(v, sw)| (v - shift) * sw)
            .collect();
        // re-project against ω to stop drift toward the trivial eigenvector
        let dot: f64 = y.iter().zip(&self.sqrt_w).map(|(a, b)| a * b).sum();
        for (yi, sw) in y.iter_mut().zip(&self.sqrt_w) {
            *yi -= dot / self.n_edges * sw;
        }
        self.y = y;
        self.last_z_norm = self.normalize_y();
        self.sync_x();
        let diff: Vec<f64> = self.y.iter().zip(&prev).map(|(a, b)| a - b).collect();
        self.iterations += 1;
        self.last_residual = self.norm_of(&diff);
        self.last_residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Current iterate in symmetric coordinates, normalized in the
    /// configured norm.
    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn start_vector(&self) -> &[f64] {
        &self.y0
    }

    /// Norm of the unnormalized image at the last step; zero means the
    /// iterate was annihilated.
    pub fn last_image_norm(&self) -> f64 {
        self.last_z_norm
    }
}

fn unit_l2(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter().map(|a| a / n).collect()
    } else {
        v.to_vec()
    }
}

/// `ξ_j = (1/√d_j) Σ_{i~j} ζ_i/√w_i`, i.e. `Mᵀζ`.
pub fn right_scores(g: &BipartiteGraph, zeta: &[f64]) -> Vec<f64> {
    (0..g.n_right())
        .map(|j| {
            let s: f64 = g
                .right_edges(j)
                .iter()
                .map(|&e| {
                    let i = g.edges()[e].left;
                    zeta[i] / (g.left_degree(i) as f64).sqrt()
                })
                .sum();
            s / (g.right_degree(j) as f64).sqrt()
        })
        .collect()
}

/// `ζᵀ Γ_L ζ = ‖Mᵀζ‖² − (ω·ζ)²/N`.
pub fn rayleigh_quotient(g: &BipartiteGraph, zeta: &[f64]) -> f64 {
    let xi = right_scores(g, zeta);
    let omega_dot: f64 = (0..g.n_left())
        .map(|i| (g.left_degree(i) as f64).sqrt() * zeta[i])
        .sum();
    let zz: f64 = zeta.iter().map(|a| a * a).sum();
    (xi.iter().map(|a| a * a).sum::<f64>() - omega_dot * omega_dot / g.n_edges() as f64) / zz
}

/// Runs the power iteration to tolerance or to the iteration cap.
pub fn power_method_fiedler(g: &BipartiteGraph, cfg: &PowerMethodConfig) -> Result<NaturalOrderResult> {
    cfg.validate()?;
    check_degrees(g)?;
    let diameter = bfs_diameter_estimate(g, derive_seed(cfg.seed, 0))?;
    let cap = cfg
        .max_iterations
        .unwrap_or_else(|| ((cfg.max_iter_factor * diameter as f64).ceil() as usize).max(1));
    let mut it = PowerIteration::new(g, cfg.normalization, derive_seed(cfg.seed, 1))?;

    let trivial = g.n_left() == 1;
    let mut converged = false;
    let mut degenerate = trivial;
    let mut residual = 0.0;
    let mut history = Vec::new();
    if !trivial {
        while it.iterations() < cap {
            residual = it.step();
            history.push(residual);
            if !(it.last_image_norm() > 1e-12) {
                degenerate = true;
                break;
            }
            if residual < cfg.delta {
                converged = true;
                break;
            }
        }
        if !converged && !degenerate && history.len() >= 8 {
            let half = history[history.len() / 2];
            degenerate = residual > 0.9 * half;
        }
    }

    let zeta = if degenerate && !(it.last_image_norm() > 1e-12) {
        unit_l2(it.start_vector())
    } else {
        unit_l2(it.y())
    };
    let cos0: f64 = zeta
        .iter()
        .zip(&unit_l2(it.start_vector()))
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .abs();
    let tan_phi0 = if cos0 > 0.0 {
        (1.0 - cos0 * cos0).max(0.0).sqrt() / cos0
    } else {
        f64::INFINITY
    };
    let xi = right_scores(g, &zeta);
    let lambda1 = if trivial { 0.0 } else { rayleigh_quotient(g, &zeta) };
    Ok(NaturalOrderResult {
        left_scores: zeta,
        right_scores: xi,
        lambda1_estimate: lambda1,
        iterations: it.iterations(),
        residual,
        diameter_estimate: diameter,
        converged: converged && !degenerate,
        degenerate_suspected: degenerate,
        tan_phi0_estimate: tan_phi0,
    })
}

/// Ranks by decreasing score, ties by original index.
pub fn order_by_scores(scores: &[f64]) -> VertexOrder {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    VertexOrder::from_sequence(&idx).expect("sorted indices form a bijection")
}

/// Flips both score vectors so the largest-magnitude left score is
/// positive (first such index on ties).
pub fn canonicalize_sign(result: &mut NaturalOrderResult) {
    let mut best = 0;
    for (i, v) in result.left_scores.iter().enumerate() {
        if v.abs() > result.left_scores[best].abs() {
            best = i;
        }
    }
    if result.left_scores.get(best).is_some_and(|&v| v < 0.0) {
        result.left_scores.iter_mut().for_each(|v| *v = -*v);
        result.right_scores.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Natural order of a connected graph with positive degrees.
pub fn natural_order(
    g: &BipartiteGraph,
    cfg: &PowerMethodConfig,
) -> Result<(VertexOrder, VertexOrder, NaturalOrderResult)> {
    if !is_connected(g) {
        return Err(Error::Disconnected);
    }
    let mut res = power_method_fiedler(g, cfg)?;
    canonicalize_sign(&mut res);
    let left = order_by_scores(&res.left_scores);
    let right = order_by_scores(&res.right_scores);
    Ok((left, right, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(nl: usize, nr: usize, pairs: &[(usize, usize)]) -> BipartiteGraph {
        BipartiteGraph::from_pairs(nl, nr, pairs).unwrap()
    }

    #[test]
    fn bfs_examples() {
        let single = g(1, 1, &[(0, 0)]);
        assert_eq!(bfs_diameter_estimate(&single, 3).unwrap(), 2);
        let path = g(2, 2, &[(0, 0), (1, 0), (1, 1)]);
        assert_eq!(bfs_levels_from(&path, 0).unwrap() * 2, 6);
        let mut k33 = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                k33.push((i, j));
            }
        }
        for seed in 0..5 {
            assert_eq!(bfs_diameter_estimate(&g(3, 3, &k33), seed).unwrap(), 4);
        }
    }

    #[test]
    fn bfs_disconnected_errors() {
        let two = g(2, 2, &[(0, 0), (1, 1)]);
        assert!(matches!(bfs_diameter_estimate(&two, 0), Err(Error::Disconnected)));
        assert!(matches!(
            natural_order(&two, &PowerMethodConfig::default()),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn zero_degree_rejected() {
        let iso = g(2, 1, &[(0, 0)]);
        assert!(matches!(
            power_method_fiedler(&iso, &PowerMethodConfig::default()),
            Err(Error::ZeroDegree { side: "left", index: 1 })
        ));
    }

    #[test]
    fn bad_config_rejected() {
        let single = g(1, 1, &[(0, 0)]);
        let cfg = PowerMethodConfig {
            delta: 0.0,
            ..Default::default()
        };
        assert!(power_method_fiedler(&single, &cfg).is_err());
        let cfg = PowerMethodConfig {
            max_iter_factor: 0.5,
            ..Default::default()
        };
        assert!(power_method_fiedler(&single, &cfg).is_err());
    }

    fn bridged_blocks() -> BipartiteGraph {
        let mut pairs = Vec::new();
        for i in 0..5 {
            for j in 0..4 {
                pairs.push((i, j));
                pairs.push((i + 5, j + 4));
            }
        }
        pairs.push((0, 4));
        g(10, 8, &pairs)
    }

    #[test]
    fn bridge_blocks_separate_by_sign() {
        let cfg = PowerMethodConfig {
            delta: 1e-10,
            max_iterations: Some(5000),
            ..Default::default()
        };
        let (_, _, r) = natural_order(&bridged_blocks(), &cfg).unwrap();
        let s0 = r.left_scores[1].signum();
        for i in 0..5 {
            assert_eq!(r.left_scores[i].signum(), s0);
            assert_eq!(r.left_scores[i + 5].signum(), -s0);
        }
        for j in 0..4 {
            assert_eq!(r.right_scores[j].signum(), s0);
            assert_eq!(r.right_scores[j + 4].signum(), -s0);
        }
        assert!(r.converged);
    }

    #[test]
    fn orthogonality_and_unit_norm() {
        let cfg = PowerMethodConfig::with_seed(4);
        let gr = bridged_blocks();
        let r = power_method_fiedler(&gr, &cfg).unwrap();
        let norm: f64 = r.left_scores.iter().map(|a| a * a).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let w_dot: f64 = (0..gr.n_left())
            .map(|i| (gr.left_degree(i) as f64).sqrt() * r.left_scores[i])
            .sum();
        let d_dot: f64 = (0..gr.n_right())
            .map(|j| (gr.right_degree(j) as f64).sqrt() * r.right_scores[j])
            .sum();
        assert!(w_dot.abs() < 1e-8);
        assert!(d_dot.abs() < 1e-8);
    }

    #[test]
    fn complete_bipartite_is_degenerate() {
        let mut pairs = Vec::new();
        for i in 0..4 {
            for j in 0..3 {
                pairs.push((i, j));
            }
        }
        let r = power_method_fiedler(&g(4, 3, &pairs), &PowerMethodConfig::default()).unwrap();
        assert!(r.degenerate_suspected);
        assert!(!r.converged);
        assert!(r.lambda1_estimate.abs() < 1e-9);
    }

    #[test]
    fn single_left_vertex_is_trivial() {
        let star = g(1, 3, &[(0, 0), (0, 1), (0, 2)]);
        let (l, r, res) = natural_order(&star, &PowerMethodConfig::default()).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(r.len(), 3);
        assert!(res.degenerate_suspected);
    }

    #[test]
    fn l1_normalization_runs() {
        let cfg = PowerMethodConfig {
            normalization: Normalization::L1,
            delta: 1e-8,
            max_iterations: Some(2000),
            ..Default::default()
        };
        let (_, _, r) = natural_order(&bridged_blocks(), &cfg).unwrap();
        let l2 = PowerMethodConfig {
            delta: 1e-8,
            max_iterations: Some(2000),
            ..Default::default()
        };
        let (_, _, s) = natural_order(&bridged_blocks(), &l2).unwrap();
        let cos: f64 = r.left_scores.iter().zip(&s.left_scores).map(|(a, b)| a * b).sum();
        assert!(cos.abs() > 1.0 - 1e-6);
    }

    #[test]
    fn canonical_sign_positive_max() {
        let (_, _, r) = natural_order(&bridged_blocks(), &PowerMethodConfig::with_seed(9)).unwrap();
        let top = r
            .left_scores
            .iter()
            .cloned()
            .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        assert!(top > 0.0);
    }

    #[test]
    fn order_by_scores_ties_by_index() {
        let o = order_by_scores(&[0.5, 1.0, 0.5, -2.0]);
        assert_eq!(o.sequence(), vec![1, 0, 2, 3]);
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = PowerMethodConfig::with_seed(5);
        let a = power_method_fiedler(&bridged_blocks(), &cfg).unwrap();
        let b = power_method_fiedler(&bridged_blocks(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_field_names() {
        let r = power_method_fiedler(&bridged_blocks(), &PowerMethodConfig::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for k in [
            "leftScores",
            "rightScores",
            "lambda1Estimate",
            "iterations",
            "residual",
            "diameterEstimate",
            "converged",
            "degenerateSuspected",
        ] {
            assert!(v.get(k).is_some(), "missing {k}");
        }
    }
}
