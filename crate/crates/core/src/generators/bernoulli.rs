//! Bernoulli incidence models with matching marginals: a pseudo-random
//! modular construction without blocks, and a hidden two-block model.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Edge, VertexOrder};
use crate::lrstat::RateMatrix;
use crate::rng::{cell_uniform, derive_seed, seeded_rng};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Draws every cell with a positive rate independently; rows in parallel,
/// one counter-based uniform per cell.
fn draw_cells(
    n: usize,
    m: usize,
    seed: u64,
    rate: impl Fn(usize, usize) -> f64 + Sync,
) -> Result<BipartiteGraph> {
    let rows: Vec<Vec<Edge>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .filter(|&j| {
                    let r = rate(i, j);
                    r > 0.0 && cell_uniform(seed, i as u64, j as u64) < r
                })
                .map(|j| Edge::new(i, j))
                .collect()
        })
        .collect();
    BipartiteGraph::new(n, m, rows.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularModelParams {
    pub n: usize,
    pub m: usize,
    pub a: u64,
    pub b: u64,
    pub gamma: f64,
}

impl ModularModelParams {
    /// Chooses the smallest `a < b` with `a / (a + b) = alpha` exactly (to
    /// 1e-9), searching `a + b <= 400`.
    pub fn from_alpha(n: usize, m: usize, alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(Error::param(format!("alpha must be in (0, 1/2), got {alpha}")));
        }
        for s in 3..=400u64 {
            let a = (alpha * s as f64).round() as u64;
            if a >= 1 && a < s - a && (a as f64 / s as f64 - alpha).abs() < 1e-9 {
                return Ok(ModularModelParams {
                    n,
                    m,
                    a,
                    b: s - a,
                    gamma,
                });
            }
        }
        Err(Error::param(format!("alpha {alpha} is not a ratio a/(a+b) with a+b <= 400")))
    }

    pub fn q(&self) -> u64 {
        (self.a + self.b) * (self.a + self.b)
    }

    pub fn alpha(&self) -> f64 {
        self.a as f64 / (self.a + self.b) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0 || self.a >= self.b {
            return Err(Error::param(format!("need 0 < a < b, got a={}, b={}", self.a, self.b)));
        }
        if self.n == 0 || self.m == 0 {
            return Err(Error::param("dimensions must be positive"));
        }
        let (q, n, m) = (self.q(), self.n as u64, self.m as u64);
        if gcd(q, n) != 1 || gcd(q, m) != 1 || gcd(n, m) != 1 {
            return Err(Error::param(format!(
                "q={q}, n={n}, m={m} must be pairwise coprime (see nudge_coprime)"
            )));
        }
        if !(self.gamma >= 0.0 && self.gamma < self.alpha()) {
            return Err(Error::param(format!(
                "gamma must be in [0, alpha={}), got {}",
                self.alpha(),
                self.gamma
            )));
        }
        Ok(())
    }

    /// Smallest `n' >= n`, `m' >= m` making `q, n', m'` pairwise coprime.
    pub fn nudge_coprime(mut self) -> Self {
        let q = self.q();
        while gcd(q, self.n as u64) != 1 {
            self.n += 1;
        }
        while gcd(q, self.m as u64) != 1 || gcd(self.n as u64, self.m as u64) != 1 {
            self.m += 1;
        }
        self
    }

    /// Residue class 0, 1 or 2 of cell `(i, j)`, 0-based. Classes are the
    /// contiguous ranges `[0, q−a²−b²)`, `[q−a²−b², q−b²)`, `[q−b², q)`.
    pub fn residue_class(&self, i: usize, j: usize) -> u8 {
        let q = self.q();
        let f = (self.m as u64 * i as u64 + self.n as u64 * j as u64) % q;
        let r0 = q - self.a * self.a - self.b * self.b;
        let r1 = q - self.b * self.b;
        if f < r0 {
            0
        } else if f < r1 {
            1
        } else {
            2
        }
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        let alpha = self.alpha();
        match self.residue_class(i, j) {
            0 => 0.0,
            1 => self.gamma / alpha,
            _ => self.gamma / (1.0 - alpha),
        }
    }
}

pub fn modular_model(p: &ModularModelParams, seed: u64) -> Result<BipartiteGraph> {
    p.validate()?;
    draw_cells(p.n, p.m, seed, |i, j| p.rate(i, j))
}

pub fn modular_rates(p: &ModularModelParams) -> RateMatrix {
    RateMatrix::from_fn(p.n, p.m, |i, j| p.rate(i, j))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HiddenBlockParams {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub gamma: f64,
}

impl HiddenBlockParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::param("dimensions must be positive"));
        }
        if !(self.gamma > 0.0 && self.gamma < self.alpha && self.alpha < 0.5) {
            return Err(Error::param(format!(
                "need 0 < gamma < alpha < 1/2, got gamma={}, alpha={}",
                self.gamma, self.alpha
            )));
        }
        Ok(())
    }

    pub fn left_block_size(&self) -> usize {
        (self.alpha * self.n as f64).round_ties_even() as usize
    }

    pub fn right_block_size(&self) -> usize {
        (self.alpha * self.m as f64).round_ties_even() as usize
    }
}

/// The hidden blocks `A ⊂ L` and `B ⊂ R`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockTruth {
    pub left_block: Vec<usize>,
    pub right_block: Vec<usize>,
}

impl BlockTruth {
    pub fn membership(&self, n: usize, m: usize) -> (Vec<bool>, Vec<bool>) {
        let mut a = vec![false; n];
        let mut b = vec![false; m];
        self.left_block.iter().for_each(|&i| a[i] = true);
        self.right_block.iter().for_each(|&j| b[j] = true);
        (a, b)
    }

    /// Orders placing `A` before `Aᶜ` and `B` before `Bᶜ`, ascending within.
    pub fn block_orders(&self, n: usize, m: usize) -> (VertexOrder, VertexOrder) {
        let (a, b) = self.membership(n, m);
        let seq = |mask: &[bool]| -> Vec<usize> {
            let mut s: Vec<usize> = (0..mask.len()).filter(|&v| mask[v]).collect();
            s.extend((0..mask.len()).filter(|&v| !mask[v]));
            s
        };
        (
            VertexOrder::from_sequence(&seq(&a)).expect("bijection"),
            VertexOrder::from_sequence(&seq(&b)).expect("bijection"),
        )
    }
}

pub fn hidden_block_model(p: &HiddenBlockParams, seed: u64) -> Result<(BipartiteGraph, BlockTruth)> {
    p.validate()?;
    let mut rng = seeded_rng(derive_seed(seed, 0));
    let mut a = sample(&mut rng, p.n, p.left_block_size()).into_vec();
    let mut b = sample(&mut rng, p.m, p.right_block_size()).into_vec();
    a.sort_unstable();
    b.sort_unstable();
    let truth = BlockTruth {
        left_block: a,
        right_block: b,
    };
    let rates = hidden_rate_fn(p, &truth);
    let g = draw_cells(p.n, p.m, derive_seed(seed, 1), rates)?;
    Ok((g, truth))
}

fn hidden_rate_fn(p: &HiddenBlockParams, truth: &BlockTruth) -> impl Fn(usize, usize) -> f64 + Sync {
    let (a, b) = truth.membership(p.n, p.m);
    let (inner, outer) = (p.gamma / p.alpha, p.gamma / (1.0 - p.alpha));
    move |i, j| match (a[i], b[j]) {
        (true, true) => inner,
        (false, false) => outer,
        _ => 0.0,
    }
}

pub fn hidden_rates(p: &HiddenBlockParams, truth: &BlockTruth) -> RateMatrix {
    RateMatrix::from_fn(p.n, p.m, hidden_rate_fn(p, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{connected_components, giant_component};

    fn case_study_modular() -> ModularModelParams {
        ModularModelParams::from_alpha(307, 211, 0.48, 0.048).unwrap()
    }

    #[test]
    fn case_study_instance_parameters() {
        let p = case_study_modular();
        assert_eq!((p.a, p.b, p.q()), (12, 13, 625));
        p.validate().unwrap();
    }

    #[test]
    fn class_sizes_partition_residues() {
        let p = case_study_modular();
        let mut counts = [0usize; 3];
        for f in 0..p.q() {
            // a cell with residue f exists: take i with m i = f mod q
            let r0 = p.q() - 144 - 169;
            let c = if f < r0 { 0 } else if f < p.q() - 169 { 1 } else { 2 };
            counts[c] += 1;
        }
        assert_eq!(counts, [625 - 144 - 169, 144, 169]);
    }

    #[test]
    fn weighted_mean_rate_is_gamma() {
        let p = case_study_modular();
        let a = p.alpha();
        let mean = a * a * (p.gamma / a) + (1.0 - a) * (1.0 - a) * (p.gamma / (1.0 - a));
        assert!((mean - p.gamma).abs() < 1e-15);
        let r = modular_rates(&p);
        let total: f64 = (0..p.n).flat_map(|i| (0..p.m).map(move |j| (i, j))).map(|(i, j)| r.get(i, j)).sum();
        let expected = p.gamma * (p.n * p.m) as f64;
        assert!((total / expected - 1.0).abs() < 0.01, "{total} vs {expected}");
    }

    #[test]
    fn modular_edge_count_in_band() {
        let p = case_study_modular();
        let r = modular_rates(&p);
        let mut mean = 0.0;
        let mut var = 0.0;
        for i in 0..p.n {
            for j in 0..p.m {
                let g = r.get(i, j);
                mean += g;
                var += g * (1.0 - g);
            }
        }
        for seed in 0..10 {
            let g = modular_model(&p, seed).unwrap();
            assert!((g.n_edges() as f64 - mean).abs() < 3.0 * var.sqrt(), "{}", g.n_edges());
        }
    }

    #[test]
    fn modular_validation() {
        let mut p = case_study_modular();
        p.n = 300;
        assert!(p.validate().is_err());
        let q = p.nudge_coprime();
        assert_eq!(q.n, 301);
        q.validate().unwrap();
        let mut g = case_study_modular();
        g.gamma = 0.6;
        assert!(g.validate().is_err());
        let mut z = case_study_modular();
        z.gamma = 0.0;
        assert_eq!(modular_model(&z, 1).unwrap().n_edges(), 0);
        assert!(ModularModelParams::from_alpha(10, 11, 0.7, 0.1).is_err());
    }

    #[test]
    fn residue_balance_is_close() {
        // contiguous classes balance per row to within a few cells
        let p = case_study_modular();
        let share = [
            (p.q() - 144 - 169) as f64 / p.q() as f64,
            144.0 / p.q() as f64,
            169.0 / p.q() as f64,
        ];
        for i in 0..p.n {
            let mut c = [0usize; 3];
            for j in 0..p.m {
                c[p.residue_class(i, j) as usize] += 1;
            }
            for k in 0..3 {
                let dev = (c[k] as f64 - share[k] * p.m as f64).abs();
                assert!(dev <= 0.05 * p.m as f64 + 1.0, "row {i} class {k}: {dev}");
            }
        }
    }

    #[test]
    fn hidden_block_has_no_cross_edges() {
        let p = HiddenBlockParams {
            n: 307,
            m: 211,
            alpha: 0.48,
            gamma: 0.048,
        };
        for seed in 0..5 {
            let (g, t) = hidden_block_model(&p, seed).unwrap();
            assert_eq!(t.left_block.len(), 147);
            assert_eq!(t.right_block.len(), 101);
            let (a, b) = t.membership(p.n, p.m);
            assert!(g.edges().iter().all(|e| a[e.left] == b[e.right]));
            let expected = p.gamma * (p.n * p.m) as f64;
            assert!((g.n_edges() as f64 - expected).abs() < 3.0 * expected.sqrt());
        }
    }

    #[test]
    fn hidden_block_components_follow_truth() {
        let p = HiddenBlockParams {
            n: 307,
            m: 211,
            alpha: 0.48,
            gamma: 0.048,
        };
        let (g, t) = hidden_block_model(&p, 11).unwrap();
        let (a, _) = t.membership(p.n, p.m);
        let big: Vec<_> = connected_components(&g)
            .into_iter()
            .filter(|c| c.edges.len() > 1)
            .collect();
        assert_eq!(big.len(), 2);
        for c in &big {
            let side = a[c.left[0]];
            assert!(c.left.iter().all(|&i| a[i] == side));
        }
        let giant = giant_component(&g);
        assert!(giant.graph.n_edges() > g.n_edges() / 3);
    }

    #[test]
    fn hidden_block_edge_share() {
        // expected A×B edges: (αn)(αm)(γ/α)
        let p = HiddenBlockParams {
            n: 400,
            m: 300,
            alpha: 0.3,
            gamma: 0.05,
        };
        let mut share = 0.0;
        let reps = 20;
        for seed in 0..reps {
            let (g, t) = hidden_block_model(&p, seed).unwrap();
            let (a, _) = t.membership(p.n, p.m);
            share += g.edges().iter().filter(|e| a[e.left]).count() as f64;
        }
        share /= reps as f64;
        let expect = 120.0 * 90.0 * (0.05 / 0.3);
        assert!((share / expect - 1.0).abs() < 0.03, "{share} vs {expect}");
    }

    #[test]
    fn hidden_validation() {
        let bad = HiddenBlockParams {
            n: 10,
            m: 10,
            alpha: 0.01,
            gamma: 0.05,
        };
        assert!(hidden_block_model(&bad, 0).is_err());
    }

    #[test]
    fn block_orders_put_blocks_first() {
        let t = BlockTruth {
            left_block: vec![2, 4],
            right_block: vec![1],
        };
        let (l, r) = t.block_orders(5, 3);
        assert_eq!(l.sequence(), vec![2, 4, 0, 1, 3]);
        assert_eq!(r.sequence(), vec![1, 0, 2]);
    }

    #[test]
    fn reproducible() {
        let p = case_study_modular();
        assert_eq!(modular_model(&p, 3).unwrap().edges(), modular_model(&p, 3).unwrap().edges());
    }
}
