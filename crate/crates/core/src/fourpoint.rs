//! The four-point test.
//!
//! Both vertex orders are first refined to total orders on edges by a
//! uniformly random linear extension. Edges are then shuffled and cut into
//! disjoint blocks of four; each block, sorted by its left keys, reads its
//! right keys as a pattern in S4 indexed by its Lehmer code. Departure of the
//! 24 counts from uniform is summarized by a chi-square statistic `T4` and a
//! total-variation statistic `D4`.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side, VertexOrder};
use crate::rng::{derive_seed, seeded_rng};
use crate::stats::chi2_sf;

pub const PATTERNS: usize = 24;

/// Degrees of freedom of the reference chi-square law.
pub const DOF: f64 = (PATTERNS - 1) as f64;

/// Per-edge ranks consistent with the order of the endpoints on `side`;
/// edges sharing an endpoint are ordered uniformly at random.
pub fn random_linear_extension(g: &BipartiteGraph, side: Side, seed: u64) -> Vec<u32> {
    let mut rng = seeded_rng(seed);
    let mut ranks = vec![0u32; g.n_edges()];
    let mut next = 0u32;
    let mut buf = Vec::new();
    let n = match side {
        Side::Left => g.n_left(),
        Side::Right => g.n_right(),
    };
    for v in 0..n {
        let incident = match side {
            Side::Left => g.left_edges(v),
            Side::Right => g.right_edges(v),
        };
        if incident.len() == 1 {
            ranks[incident[0]] = next;
            next += 1;
            continue;
        }
        buf.clear();
        buf.extend_from_slice(incident);
        buf.shuffle(&mut rng);
        for &e in &buf {
            ranks[e] = next;
            next += 1;
        }
    }
    ranks
}

/// Total orders on edges refining the left and right vertex orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeKeys {
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

impl EdgeKeys {
    pub fn random(g: &BipartiteGraph, seed: u64) -> Self {
        EdgeKeys {
            left: random_linear_extension(g, Side::Left, derive_seed(seed, 0)),
            right: random_linear_extension(g, Side::Right, derive_seed(seed, 1)),
        }
    }
}

/// Lehmer digits `L_i = #{j > i : v_i > v_j}` of four distinct values. The
/// last digit is always zero.
pub fn lehmer_code<T: PartialOrd>(v: &[T; 4]) -> Result<[u8; 4]> {
    let mut code = [0u8; 4];
    for i in 0..4 {
        for j in (i + 1)..4 {
            match v[i].partial_cmp(&v[j]) {
                Some(std::cmp::Ordering::Greater) => code[i] += 1,
                Some(std::cmp::Ordering::Less) => {}
                _ => return Err(Error::NotDistinct),
            }
        }
    }
    Ok(code)
}

/// `6 L1 + 2 L2 + L3`, the lexicographic rank of the pattern.
pub fn lehmer_index(code: &[u8; 4]) -> usize {
    6 * code[0] as usize + 2 * code[1] as usize + code[2] as usize
}

pub fn pattern_index<T: PartialOrd>(v: &[T; 4]) -> Result<usize> {
    lehmer_code(v).map(|c| lehmer_index(&c))
}

/// Branch-light index for values already known to be distinct.
#[inline]
fn index_distinct(v: [u32; 4]) -> usize {
    let gt = |a: u32, b: u32| (a > b) as usize;
    let l1 = gt(v[0], v[1]) + gt(v[0], v[2]) + gt(v[0], v[3]);
    let l2 = gt(v[1], v[2]) + gt(v[1], v[3]);
    let l3 = gt(v[2], v[3]);
    6 * l1 + 2 * l2 + l3
}

/// One-line notation of the pattern with the given index.
pub fn pattern_of_index(index: usize) -> [u8; 4] {
    assert!(index < PATTERNS, "pattern index {index} out of range");
    let digits = [index / 6, (index % 6) / 2, index % 2, 0];
    let mut remaining: Vec<u8> = vec![1, 2, 3, 4];
    let mut out = [0u8; 4];
    for (slot, &d) in out.iter_mut().zip(digits.iter()) {
        *slot = remaining.remove(d);
    }
    out
}

pub fn pattern_string(index: usize) -> String {
    pattern_of_index(index).iter().map(|d| d.to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternHistogram {
    pub counts: [u64; PATTERNS],
    pub blocks: u64,
}

impl PatternHistogram {
    pub fn from_counts(counts: [u64; PATTERNS]) -> Self {
        PatternHistogram {
            counts,
            blocks: counts.iter().sum(),
        }
    }

    /// Expected count per bin under uniformity.
    pub fn theta(&self) -> f64 {
        self.blocks as f64 / PATTERNS as f64
    }

    pub fn frequencies(&self) -> [f64; PATTERNS] {
        let mut f = [0.0; PATTERNS];
        if self.blocks > 0 {
            for (fi, &c) in f.iter_mut().zip(&self.counts) {
                *fi = c as f64 / self.blocks as f64;
            }
        }
        f
    }

    pub fn merge(&mut self, other: &PatternHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.blocks += other.blocks;
    }

    /// Rows `index,pattern,count` under a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,pattern,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{c}", pattern_string(i));
        }
        s
    }
}

/// Shuffles the edges, cuts them into `floor(N/4)` blocks and bins each
/// block's pattern. Leftover edges are discarded.
pub fn pattern_histogram(g: &BipartiteGraph, keys: &EdgeKeys, seed: u64) -> Result<PatternHistogram> {
    let n = g.n_edges();
    if n < 4 {
        return Err(Error::param(format!("four-point test needs at least 4 edges, got {n}")));
    }
    if keys.left.len() != n || keys.right.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: keys.left.len().min(keys.right.len()),
        });
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut seeded_rng(seed));
    let blocks = n / 4;
    let counts = order[..blocks * 4]
        .par_chunks(4 * 4096)
        .map(|chunk| {
            let mut local = [0u64; PATTERNS];
            for b in chunk.chunks_exact(4) {
                let mut pairs = [
                    (keys.left[b[0] as usize], keys.right[b[0] as usize]),
                    (keys.left[b[1] as usize], keys.right[b[1] as usize]),
                    (keys.left[b[2] as usize], keys.right[b[2] as usize]),
                    (keys.left[b[3] as usize], keys.right[b[3] as usize]),
                ];
                pairs.sort_unstable_by_key(|p| p.0);
                local[index_distinct([pairs[0].1, pairs[1].1, pairs[2].1, pairs[3].1])] += 1;
            }
            local
        })
        .reduce(
            || [0u64; PATTERNS],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                a
            },
        );
    Ok(PatternHistogram {
        counts,
        blocks: blocks as u64,
    })
}

/// `T4 = sum (X_i - theta)^2 / theta` and its upper chi-square(23) tail.
pub fn chi_square_stat(h: &PatternHistogram) -> (f64, f64) {
    let theta = h.theta();
    if theta <= 0.0 {
        return (0.0, 1.0);
    }
    let t4: f64 = h
        .counts
        .iter()
        .map(|&c| {
            let d = c as f64 - theta;
            d * d / theta
        })
        .sum();
    (t4, chi2_sf(t4, DOF))
}

/// Total-variation distance of the empirical pattern law from uniform.
pub fn tv_stat(h: &PatternHistogram) -> f64 {
    if h.blocks == 0 {
        return 0.0;
    }
    let theta = h.theta();
    let s: f64 = h.counts.iter().map(|&c| (c as f64 - theta).abs()).sum();
    (s / (2.0 * h.blocks as f64)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourPointResult {
    #[serde(rename = "T4")]
    pub t4: f64,
    #[serde(rename = "D4")]
    pub d4: f64,
    #[serde(rename = "pValue")]
    pub p_value: f64,
    pub blocks: u64,
    pub theta: f64,
    /// Seed that reproduces this single run via [`four_point_once`].
    pub seed: u64,
    pub counts: [u64; PATTERNS],
}

impl FourPointResult {
    pub fn from_histogram(h: &PatternHistogram, seed: u64) -> Self {
        let (t4, p_value) = chi_square_stat(h);
        FourPointResult {
            t4,
            d4: tv_stat(h),
            p_value,
            blocks: h.blocks,
            theta: h.theta(),
            seed,
            counts: h.counts,
        }
    }

    pub fn histogram(&self) -> PatternHistogram {
        PatternHistogram {
            counts: self.counts,
            blocks: self.blocks,
        }
    }
}

/// One test on `g` as currently ordered: fresh linear extensions and a fresh
/// block partition, all derived from `seed`.
pub fn four_point_once(g: &BipartiteGraph, seed: u64) -> Result<FourPointResult> {
    let keys = EdgeKeys::random(g, derive_seed(seed, 0));
    let h = pattern_histogram(g, &keys, derive_seed(seed, 1))?;
    Ok(FourPointResult::from_histogram(&h, seed))
}

/// Applies the vertex orders, then runs `repeats` independent tests. Each
/// repeat redraws the tie-breaking extensions as well as the blocks.
pub fn four_point_test(
    g: &BipartiteGraph,
    left: &VertexOrder,
    right: &VertexOrder,
    seed: u64,
    repeats: usize,
) -> Result<Vec<FourPointResult>> {
    if repeats == 0 {
        return Err(Error::param("repeats must be at least 1"));
    }
    let ordered = g.apply_order(left, right)?;
    (0..repeats)
        .map(|r| four_point_once(&ordered, derive_seed(seed, 0x4b1d + r as u64)))
        .collect()
}
