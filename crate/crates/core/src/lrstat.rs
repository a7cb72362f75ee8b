//! Likelihood-ratio statistics for Bernoulli incidence models.
//!
//! For rates `γ_ij` on the support `K = {γ > 0}`, the standardized statistic
//! is `ξ = Σ_K λ_ij (Z_ij − γ_ij) / Ω` with `λ = log((1−γ)/γ)` and
//! `Ω² = Σ_K γ(1−γ)λ²`. Under the marginal model `γ_ij = w_i d_j / N` the
//! sum collapses onto the joint degree matrix, which is what makes the
//! degree-association test cheap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::stats::{chi2_sf, normal_quantile, normal_two_sided};

/// Dense `n × m` matrix of Bernoulli rates, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    n: usize,
    m: usize,
    data: Vec<f64>,
}

impl RateMatrix {
    pub fn new(n: usize, m: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * m {
            return Err(Error::SizeMismatch {
                expected: n * m,
                actual: data.len(),
            });
        }
        Ok(RateMatrix { n, m, data })
    }

    pub fn from_fn(n: usize, m: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                data.push(f(i, j));
            }
        }
        RateMatrix { n, m, data }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    /// Rows and columns relabelled: entry `(left.rank(i), right.rank(j))` of
    /// the result is entry `(i, j)` of `self`.
    pub fn permuted(
        &self,
        left: &crate::graph::VertexOrder,
        right: &crate::graph::VertexOrder,
    ) -> Result<Self> {
        if left.len() != self.n || right.len() != self.m {
            return Err(Error::SizeMismatch {
                expected: self.n * self.m,
                actual: left.len() * right.len(),
            });
        }
        let mut data = vec![0.0; self.n * self.m];
        for i in 0..self.n {
            for j in 0..self.m {
                data[left.rank(i) * self.m + right.rank(j)] = self.get(i, j);
            }
        }
        Ok(RateMatrix {
            n: self.n,
            m: self.m,
            data,
        })
    }
}

#[derive(Debug, Clone)]
pub enum RateModel {
    Explicit(RateMatrix),
    /// `γ_ij = w_i d_j / N`, evaluated cell by cell.
    Marginal,
    /// `γ_ij = N / (n m)` everywhere.
    Constant,
}

impl RateModel {
    pub fn name(&self) -> &'static str {
        match self {
            RateModel::Explicit(_) => "explicit",
            RateModel::Marginal => "marginal",
            RateModel::Constant => "constant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LRResult {
    pub xi: f64,
    pub omega: f64,
    pub p_value_two_sided: f64,
    pub model: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl LRResult {
    fn finish(numerator: f64, omega_sq: f64, model: &str, warnings: Vec<String>) -> Self {
        let omega = omega_sq.max(0.0).sqrt();
        let xi = if omega > 0.0 { numerator / omega } else { 0.0 };
        LRResult {
            xi,
            omega,
            p_value_two_sided: normal_two_sided(xi),
            model: model.to_string(),
            warnings,
        }
    }
}

#[inline]
fn log_odds(gamma: f64) -> f64 {
    ((1.0 - gamma) / gamma).ln()
}

/// Accumulates `Σ_K λγ` and `Σ_K γ(1−γ)λ²` over all cells, checking rates.
fn cell_sums(
    n: usize,
    m: usize,
    rate: impl Fn(usize, usize) -> f64,
) -> Result<(f64, f64, bool, usize)> {
    let (mut lg, mut var, mut high, mut support) = (0.0, 0.0, false, 0usize);
    for i in 0..n {
        for j in 0..m {
            let g = rate(i, j);
            if !(0.0..1.0).contains(&g) {
                return Err(Error::param(format!("rate {g} at cell ({i}, {j}) is outside [0, 1)")));
            }
            if g == 0.0 {
                continue;
            }
            let l = log_odds(g);
            lg += l * g;
            var += g * (1.0 - g) * l * l;
            high |= g >= 0.5;
            support += 1;
        }
    }
    Ok((lg, var, high, support))
}

/// The standardized LR statistic under an explicit or derived rate model.
/// Multi-edges contribute their multiplicity to `Z`.
pub fn lr_statistic(g: &BipartiteGraph, model: &RateModel) -> Result<LRResult> {
    let (n, m) = (g.n_left(), g.n_right());
    let n_edges = g.n_edges() as f64;
    let deg = g.degrees();
    let rate = |i: usize, j: usize| -> f64 {
        match model {
            RateModel::Explicit(r) => r.get(i, j),
            RateModel::Marginal => deg.w[i] as f64 * deg.d[j] as f64 / n_edges,
            RateModel::Constant => n_edges / (n * m) as f64,
        }
    };
    if let RateModel::Explicit(r) = model {
        if r.rows() != n || r.cols() != m {
            return Err(Error::SizeMismatch {
                expected: n * m,
                actual: r.rows() * r.cols(),
            });
        }
    }
    if g.n_edges() == 0 && !matches!(model, RateModel::Explicit(_)) {
        return Err(Error::EmptyInput);
    }
    let (lg, var, high, support) = cell_sums(n, m, rate)?;
    if support == 0 {
        return Err(Error::param("rate support is empty"));
    }
    let mut observed = 0.0;
    for e in g.edges() {
        let r = rate(e.left, e.right);
        if r > 0.0 {
            observed += log_odds(r);
        }
    }
    let mut warnings = Vec::new();
    if high {
        warnings.push("some rates are at least 1/2".to_string());
    }
    Ok(LRResult::finish(observed - lg, var, model.name(), warnings))
}

/// The marginal-model statistic computed from the joint degree matrix.
pub fn grouped_lr(g: &BipartiteGraph) -> Result<LRResult> {
    if g.n_edges() == 0 {
        return Err(Error::EmptyInput);
    }
    let jdm = g.joint_degree_matrix();
    let n = g.n_edges() as f64;
    let (mut num, mut var, mut high) = (0.0, 0.0, false);
    for (&w, &rw) in &jdm.row_weight_counts {
        for (&d, &cd) in &jdm.col_degree_counts {
            let wd = (w * d) as f64;
            if wd >= n {
                return Err(Error::param(format!(
                    "degree pair (w={w}, d={d}) has w*d >= N = {n}; marginal rate would reach 1"
                )));
            }
            let gamma = wd / n;
            high |= gamma >= 0.5;
            let mu = ((n - wd) / wd).ln();
            let n_hat = jdm.get(w, d) as f64 - wd * (rw * cd) as f64 / n;
            num += mu * n_hat;
            var += (rw * cd) as f64 * gamma * (1.0 - gamma) * mu * mu;
        }
    }
    let mut warnings = Vec::new();
    if high {
        warnings.push("some rates are at least 1/2".to_string());
    }
    Ok(LRResult::finish(num, var, "marginal-grouped", warnings))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VarianceTest {
    pub statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
    pub gamma_hat: f64,
}

/// `Σ_ij (Z_ij − γ̂)² / (γ̂(1−γ̂))` against the upper tail of
/// chi-square(nm − 1). For 0-1 data the statistic equals `nm` identically.
pub fn variance_test(g: &BipartiteGraph) -> Result<VarianceTest> {
    let cells = (g.n_left() * g.n_right()) as f64;
    if cells <= 1.0 {
        return Err(Error::param("variance test needs more than one cell"));
    }
    let n = g.n_edges() as f64;
    let gamma = n / cells;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::param(format!("estimated rate {gamma} is not in (0, 1)")));
    }
    // Σ Z² over occupied cells; multi-edges count as larger Z
    let mut sum_sq = 0.0;
    let mut rights = Vec::new();
    for i in 0..g.n_left() {
        rights.clear();
        rights.extend(g.left_edges(i).iter().map(|&e| g.edges()[e].right));
        rights.sort_unstable();
        let mut k = 0;
        while k < rights.len() {
            let mut run = 1;
            while k + run < rights.len() && rights[k + run] == rights[k] {
                run += 1;
            }
            sum_sq += (run * run) as f64;
            k += run;
        }
    }
    let statistic = (sum_sq - 2.0 * gamma * n + cells * gamma * gamma) / (gamma * (1.0 - gamma));
    let df = cells - 1.0;
    Ok(VarianceTest {
        statistic,
        degrees_of_freedom: df,
        p_value: chi2_sf(statistic, df),
        gamma_hat: gamma,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeAssociation {
    pub xi: f64,
    pub omega: f64,
    pub p_value: f64,
    pub size: f64,
    pub critical_value: f64,
    pub reject: bool,
}

/// Two-sided test of the marginal model: rejects when `|ξ|` exceeds the
/// `1 − size/2` normal quantile.
pub fn degree_association_test(g: &BipartiteGraph, size: f64) -> Result<DegreeAssociation> {
    if !(size > 0.0 && size < 1.0) {
        return Err(Error::param(format!("test size must be in (0, 1), got {size}")));
    }
    let lr = grouped_lr(g)?;
    let critical = normal_quantile(1.0 - size / 2.0);
    Ok(DegreeAssociation {
        xi: lr.xi,
        omega: lr.omega,
        p_value: lr.p_value_two_sided,
        size,
        critical_value: critical,
        reject: lr.xi.abs() > critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{cell_uniform, derive_seed};

    fn bernoulli(n: usize, m: usize, rates: &RateMatrix, seed: u64) -> BipartiteGraph {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..m {
                if cell_uniform(seed, i as u64, j as u64) < rates.get(i, j) {
                    pairs.push((i, j));
                }
            }
        }
        BipartiteGraph::from_pairs(n, m, &pairs).unwrap()
    }

    fn random_graph(n: usize, m: usize, p: f64, seed: u64) -> BipartiteGraph {
        let r = RateMatrix::from_fn(n, m, |_, _| p);
        bernoulli(n, m, &r, seed)
    }

    #[test]
    fn grouped_matches_brute_force() {
        for seed in 0..40 {
            let n = 3 + (seed as usize * 7) % 25;
            let m = 3 + (seed as usize * 11) % 25;
            let g = random_graph(n, m, 0.3, derive_seed(seed, 1));
            if g.n_edges() < 2 {
                continue;
            }
            let (Ok(a), Ok(b)) = (grouped_lr(&g), lr_statistic(&g, &RateModel::Marginal)) else {
                continue;
            };
            assert!((a.xi - b.xi).abs() < 1e-10, "{} vs {}", a.xi, b.xi);
            assert!((a.omega - b.omega).abs() < 1e-9);
        }
    }

    #[test]
    fn regular_graph_has_zero_xi() {
        // 2-regular on both sides: 4 x 4 cycle
        let g = BipartiteGraph::from_pairs(
            4,
            4,
            &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (3, 0)],
        )
        .unwrap();
        let r = grouped_lr(&g).unwrap();
        assert_eq!(r.xi, 0.0);
        let d = degree_association_test(&g, 0.05).unwrap();
        assert!(!d.reject);
    }

    #[test]
    fn grouped_rejects_saturated_cells() {
        let g = BipartiteGraph::from_pairs(1, 1, &[(0, 0)]).unwrap();
        assert!(grouped_lr(&g).is_err());
    }

    #[test]
    fn explicit_rates_validated() {
        let g = random_graph(3, 3, 0.5, 1);
        let bad = RateMatrix::from_fn(3, 3, |i, _| if i == 0 { 1.0 } else { 0.2 });
        assert!(lr_statistic(&g, &RateModel::Explicit(bad)).is_err());
        let zero = RateMatrix::from_fn(3, 3, |_, _| 0.0);
        assert!(lr_statistic(&g, &RateModel::Explicit(zero)).is_err());
        let wrong = RateMatrix::from_fn(2, 3, |_, _| 0.1);
        assert!(lr_statistic(&g, &RateModel::Explicit(wrong)).is_err());
    }

    #[test]
    fn high_rates_warn() {
        let g = random_graph(4, 4, 0.5, 2);
        let r = RateMatrix::from_fn(4, 4, |_, _| 0.6);
        let res = lr_statistic(&g, &RateModel::Explicit(r)).unwrap();
        assert!(!res.warnings.is_empty());
    }

    #[test]
    fn constant_model_is_identically_zero() {
        let g = random_graph(10, 12, 0.2, 3);
        let r = lr_statistic(&g, &RateModel::Constant).unwrap();
        assert!(r.xi.abs() < 1e-9);
    }

    #[test]
    fn xi_invariant_under_joint_relabelling() {
        let rates = RateMatrix::from_fn(8, 6, |i, j| 0.05 + 0.02 * ((i * 3 + j) % 7) as f64);
        let g = bernoulli(8, 6, &rates, 9);
        let base = lr_statistic(&g, &RateModel::Explicit(rates.clone())).unwrap();
        let l = crate::graph::VertexOrder::identity(8).reversed();
        let r = crate::graph::VertexOrder::from_sequence(&[3, 1, 5, 0, 2, 4]).unwrap();
        let g2 = g.apply_order(&l, &r).unwrap();
        let rates2 = rates.permuted(&l, &r).unwrap();
        let moved = lr_statistic(&g2, &RateModel::Explicit(rates2)).unwrap();
        assert!((base.xi - moved.xi).abs() < 1e-12);
    }

    #[test]
    fn omega_matches_monte_carlo_variance() {
        let rates = RateMatrix::from_fn(20, 15, |i, j| 0.02 + 0.01 * ((i + 2 * j) % 9) as f64);
        let reps = 10_000;
        let mut vals = Vec::with_capacity(reps);
        let mut omega = 0.0;
        for s in 0..reps as u64 {
            let g = bernoulli(20, 15, &rates, derive_seed(77, s));
            let r = lr_statistic(&g, &RateModel::Explicit(rates.clone())).unwrap();
            omega = r.omega;
            vals.push(r.xi * r.omega);
        }
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (reps - 1) as f64;
        assert!((var / (omega * omega) - 1.0).abs() < 0.05, "{}", var / (omega * omega));
    }

    #[test]
    fn variance_test_guards_and_degeneracy() {
        let full = BipartiteGraph::from_pairs(2, 1, &[(0, 0), (1, 0)]).unwrap();
        assert!(variance_test(&full).is_err());
        let one = BipartiteGraph::from_pairs(1, 1, &[(0, 0)]).unwrap();
        assert!(variance_test(&one).is_err());
        let g = random_graph(12, 9, 0.3, 4);
        let v = variance_test(&g).unwrap();
        assert!((v.statistic - 108.0).abs() < 1e-9);
        assert!(v.p_value > 0.0 && v.p_value < 1.0);
    }

    #[test]
    fn association_size_validated() {
        let g = random_graph(40, 40, 0.1, 5);
        assert!(degree_association_test(&g, 0.0).is_err());
        assert!(degree_association_test(&g, 1.0).is_err());
        let d = degree_association_test(&g, 0.05).unwrap();
        assert!((d.critical_value - 1.959963984540054).abs() < 1e-9);
    }
}
