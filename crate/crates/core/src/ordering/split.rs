use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::rng::seeded_rng;

/// Uniform random bisection of the edge multiset. The first graph gets
/// `floor(N/2)` edges; both keep the full vertex sets and labels.
pub fn split_edges(g: &BipartiteGraph, seed: u64) -> Result<(BipartiteGraph, BipartiteGraph)> {
    let n = g.n_edges();
    if n < 8 {
        return Err(Error::param(format!("edge split needs at least 8 edges, got {n}")));
    }
    let mut in_train = vec![false; n];
    for e in sample(&mut seeded_rng(seed), n, n / 2) {
        in_train[e] = true;
    }
    let (mut train, mut test) = (Vec::with_capacity(n / 2), Vec::with_capacity(n - n / 2));
    for (e, &edge) in g.edges().iter().enumerate() {
        if in_train[e] {
            train.push(edge);
        } else {
            test.push(edge);
        }
    }
    let mut a = BipartiteGraph::new(g.n_left(), g.n_right(), train)?;
    let mut b = BipartiteGraph::new(g.n_left(), g.n_right(), test)?;
    if let Some(labels) = g.labels() {
        a = a.with_labels(labels.clone())?;
        b = b.with_labels(labels.clone())?;
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves_partition_the_multiset() {
        let pairs: Vec<(usize, usize)> = (0..10).map(|k| (k % 3, k % 4)).collect();
        let g = BipartiteGraph::from_pairs(3, 4, &pairs).unwrap();
        let (a, b) = split_edges(&g, 7).unwrap();
        assert_eq!(a.n_edges(), 5);
        assert_eq!(b.n_edges(), 5);
        let mut all = a.sorted_pairs();
        all.extend(b.sorted_pairs());
        all.sort_unstable();
        assert_eq!(all, g.sorted_pairs());
        assert_eq!(a.n_left(), 3);
        assert_eq!(b.n_right(), 4);
    }

    #[test]
    fn odd_size_and_too_small() {
        let pairs: Vec<(usize, usize)> = (0..9).map(|k| (k, k)).collect();
        let g = BipartiteGraph::from_pairs(9, 9, &pairs).unwrap();
        let (a, b) = split_edges(&g, 1).unwrap();
        assert_eq!((a.n_edges(), b.n_edges()), (4, 5));
        let small = BipartiteGraph::from_pairs(7, 7, &pairs[..7]).unwrap();
        assert!(split_edges(&small, 1).is_err());
    }
}
