//! Half-edge (configuration) construction: a permutation of `N` positions
//! pairs degree-replicated left and right vertices into a multigraph, and
//! the inverse map reads a permutation back off a graph.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Edge};
use crate::permpattern::Permutation;
use crate::rng::seeded_rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdgeSpec {
    w: Vec<usize>,
    d: Vec<usize>,
}

impl HalfEdgeSpec {
    pub fn new(w: Vec<usize>, d: Vec<usize>) -> Result<Self> {
        if w.is_empty() || d.is_empty() {
            return Err(Error::param("degree vectors must be non-empty"));
        }
        if let Some(i) = w.iter().position(|&x| x == 0) {
            return Err(Error::ZeroDegree { side: "left", index: i });
        }
        if let Some(j) = d.iter().position(|&x| x == 0) {
            return Err(Error::ZeroDegree { side: "right", index: j });
        }
        let (sw, sd) = (w.iter().sum::<usize>(), d.iter().sum::<usize>());
        if sw != sd {
            return Err(Error::param(format!("degree sums differ: {sw} vs {sd}")));
        }
        Ok(HalfEdgeSpec { w, d })
    }

    /// Degrees of a graph without isolated vertices.
    pub fn of_graph(g: &BipartiteGraph) -> Result<Self> {
        let dv = g.degrees();
        HalfEdgeSpec::new(dv.w, dv.d)
    }

    /// Every left vertex of degree `w`, right degrees as equal as possible.
    pub fn balanced(n: usize, m: usize, w: usize) -> Result<Self> {
        let total = n * w;
        if m == 0 || total < m {
            return Err(Error::param(format!("cannot spread {total} half-edges over {m} right vertices")));
        }
        let d = (0..m).map(|j| total / m + usize::from(j < total % m)).collect();
        HalfEdgeSpec::new(vec![w; n], d)
    }

    /// Degrees drawn uniformly from `lo..=hi` on both sides; right degrees
    /// are then nudged one unit at a time until the sums agree.
    pub fn uniform_random(n: usize, m: usize, lo: usize, hi: usize, seed: u64) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::param(format!("need 1 <= lo <= hi, got {lo}..={hi}")));
        }
        let mut rng = seeded_rng(seed);
        let w: Vec<usize> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
        let mut d: Vec<usize> = (0..m).map(|_| rng.random_range(lo..=hi)).collect();
        let target: usize = w.iter().sum();
        if target < m * lo || target > m * hi {
            return Err(Error::param("left degree sum unreachable by right degrees in range"));
        }
        let mut sum: usize = d.iter().sum();
        while sum != target {
            let j = rng.random_range(0..m);
            if sum < target && d[j] < hi {
                d[j] += 1;
                sum += 1;
            } else if sum > target && d[j] > lo {
                d[j] -= 1;
                sum -= 1;
            }
        }
        HalfEdgeSpec::new(w, d)
    }

    pub fn w(&self) -> &[usize] {
        &self.w
    }

    pub fn d(&self) -> &[usize] {
        &self.d
    }

    pub fn n_edges(&self) -> usize {
        self.w.iter().sum()
    }

    /// `h[p]` is the vertex owning half-edge `p` (0-based).
    fn half_edges(deg: &[usize]) -> Vec<usize> {
        deg.iter()
            .enumerate()
            .flat_map(|(v, &k)| std::iter::repeat_n(v, k))
            .collect()
    }

    pub fn left_half_edges(&self) -> Vec<usize> {
        Self::half_edges(&self.w)
    }

    pub fn right_half_edges(&self) -> Vec<usize> {
        Self::half_edges(&self.d)
    }
}

/// Edge `p` joins the owner of left half-edge `p` to the owner of right
/// half-edge `π(p)`.
pub fn half_edge_graph(spec: &HalfEdgeSpec, pi: &Permutation) -> Result<BipartiteGraph> {
    let n = spec.n_edges();
    if pi.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: pi.len(),
        });
    }
    let hl = spec.left_half_edges();
    let hr = spec.right_half_edges();
    let edges = (0..n)
        .map(|p| Edge::new(hl[p], hr[pi.one_line()[p] as usize - 1]))
        .collect();
    BipartiteGraph::new(spec.w.len(), spec.d.len(), edges)
}

/// Lists edges by left vertex, then ranks them by right vertex with
/// independent uniform tie-breaks; `π(k)` is the right rank of edge `k`.
pub fn graph_to_permutation(g: &BipartiteGraph, seed: u64) -> Permutation {
    let left_order: Vec<usize> = (0..g.n_left())
        .flat_map(|i| g.left_edges(i).iter().copied())
        .collect();
    let mut rng = seeded_rng(seed);
    let mut rank = vec![0u32; g.n_edges()];
    let mut next = 1u32;
    for j in 0..g.n_right() {
        let mut tied = g.right_edges(j).to_vec();
        tied.shuffle(&mut rng);
        for e in tied {
            rank[e] = next;
            next += 1;
        }
    }
    Permutation::new(left_order.iter().map(|&e| rank[e]).collect()).expect("ranks form a bijection")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DuplicateEstimate {
    pub c_left: f64,
    pub c_right: f64,
    pub expected: f64,
    /// Largest incidence rate `max wᵢ dⱼ / N`; the estimate needs it small.
    pub gamma_star: f64,
}

/// `C_L·C_R/2` with `C = E[X²]/E[X]` over each degree vector.
pub fn expected_duplicates(spec: &HalfEdgeSpec) -> DuplicateEstimate {
    let ratio = |v: &[usize]| {
        let s: f64 = v.iter().map(|&x| x as f64).sum();
        v.iter().map(|&x| (x * x) as f64).sum::<f64>() / s
    };
    let (c_left, c_right) = (ratio(&spec.w), ratio(&spec.d));
    let n = spec.n_edges() as f64;
    let wmax = *spec.w.iter().max().expect("non-empty") as f64;
    let dmax = *spec.d.iter().max().expect("non-empty") as f64;
    DuplicateEstimate {
        c_left,
        c_right,
        expected: c_left * c_right / 2.0,
        gamma_star: wmax * dmax / n,
    }
}

/// Number of unordered pairs of edges sharing both endpoints.
pub fn count_duplicate_pairs(g: &BipartiteGraph) -> u64 {
    let pairs = g.sorted_pairs();
    let mut total = 0u64;
    let mut k = 0;
    while k < pairs.len() {
        let mut run = 1;
        while k + run < pairs.len() && pairs[k + run] == pairs[k] {
            run += 1;
        }
        total += (run * (run - 1) / 2) as u64;
        k += run;
    }
    total
}
