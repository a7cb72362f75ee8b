//! Prime-divisor incidences: rows are random integers in `[1, eᵗ]`, columns
//! are primes above `e^{t/4}`, and a cell is set when the prime divides the
//! integer. Rows meet at most three such primes, which ties row degree to
//! column degree.

use std::collections::BTreeMap;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Edge, Labels};
use crate::rng::seeded_rng;

pub const MAX_WINDOW: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimeDivisorParams {
    /// Log of the window size.
    pub t: f64,
    /// Integers drawn before empty rows are discarded.
    pub count: usize,
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            for q in (p * p..=n).step_by(p) {
                composite[q] = true;
            }
        }
    }
    out
}

/// Distinct prime factors of `x` that exceed `floor`, ascending.
fn large_prime_factors(mut x: u64, floor: u64, primes: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for &p in primes {
        if p * p > x {
            break;
        }
        if x.is_multiple_of(p) {
            if p > floor {
                out.push(p);
            }
            while x.is_multiple_of(p) {
                x /= p;
            }
        }
    }
    if x > 1 && x > floor {
        out.push(x);
    }
    out
}

pub fn prime_divisor_graph(p: &PrimeDivisorParams, seed: u64) -> Result<BipartiteGraph> {
    if !(p.t > 0.0 && p.t <= MAX_WINDOW) {
        return Err(Error::param(format!("window t must be in (0, {MAX_WINDOW}], got {}", p.t)));
    }
    if p.count == 0 {
        return Err(Error::param("count must be positive"));
    }
    let top = p.t.exp().floor() as u64;
    let floor = (p.t / 4.0).exp().floor() as u64;
    let primes = primes_up_to((top as f64).sqrt() as u64 + 1);
    let mut rng = seeded_rng(seed);
    let xs: Vec<u64> = (0..p.count).map(|_| rng.random_range(1..=top)).collect();
    let rows: Vec<(u64, Vec<u64>)> = xs
        .par_iter()
        .map(|&x| (x, large_prime_factors(x, floor, &primes)))
        .filter(|(_, f)| !f.is_empty())
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut column: BTreeMap<u64, usize> = rows.iter().flat_map(|(_, f)| f.iter().map(|&q| (q, 0))).collect();
    for (k, v) in column.values_mut().enumerate() {
        *v = k;
    }
    let edges = rows
        .iter()
        .enumerate()
        .flat_map(|(i, (_, f))| f.iter().map(|q| Edge::new(i, column[q])).collect::<Vec<_>>())
        .collect();
    let labels = Labels {
        left: rows.iter().enumerate().map(|(i, (x, _))| format!("{x}#{i}")).collect(),
        right: column.keys().map(|q| q.to_string()).collect(),
    };
    BipartiteGraph::new(rows.len(), column.len(), edges)?.with_labels(labels)
}
