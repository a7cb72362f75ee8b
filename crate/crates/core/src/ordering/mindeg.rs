//! Minimum-degree ordering: columns are right vertices, rows left vertices.

use rand::Rng as _;

use crate::graph::{BipartiteGraph, VertexOrder};
use crate::rng::seeded_rng;

/// Columns bucketed by active degree with O(1) removal.
struct Buckets {
    lists: Vec<Vec<usize>>,
    slot: Vec<usize>,
    degree: Vec<usize>,
}

impl Buckets {
    fn new(degree: Vec<usize>) -> Self {
        let top = degree.iter().copied().max().unwrap_or(0);
        let mut lists = vec![Vec::new(); top + 1];
        let mut slot = vec![0; degree.len()];
        for (c, &d) in degree.iter().enumerate() {
            slot[c] = lists[d].len();
            lists[d].push(c);
        }
        Buckets { lists, slot, degree }
    }

    fn remove(&mut self, c: usize) {
        let d = self.degree[c];
        let k = self.slot[c];
        let last = *self.lists[d].last().expect("column is in its bucket");
        self.lists[d].swap_remove(k);
        if last != c {
            self.slot[last] = k;
        }
    }

    fn insert(&mut self, c: usize, d: usize) {
        self.degree[c] = d;
        self.slot[c] = self.lists[d].len();
        self.lists[d].push(c);
    }
}

/// Repeatedly picks a uniformly random column of minimum non-zero active
/// degree and places it, followed by its active rows in ascending index
/// order. Leftover columns and never-placed rows follow in ascending index
/// order.
pub fn min_degree_order(g: &BipartiteGraph, seed: u64) -> (VertexOrder, VertexOrder) {
    let mut rng = seeded_rng(seed);
    let degree: Vec<usize> = (0..g.n_right()).map(|j| g.right_degree(j)).collect();
    let mut buckets = Buckets::new(degree);
    let mut row_active = vec![true; g.n_left()];
    let mut col_placed = vec![false; g.n_right()];
    let mut rows = Vec::with_capacity(g.n_left());
    let mut cols = Vec::with_capacity(g.n_right());
    let mut newly = Vec::new();
    let mut min = 1;

    loop {
        while min < buckets.lists.len() && buckets.lists[min].is_empty() {
            min += 1;
        }
        if min >= buckets.lists.len() {
            break;
        }
        let pick = rng.random_range(0..buckets.lists[min].len());
        let c = buckets.lists[min][pick];
        buckets.remove(c);
        col_placed[c] = true;
        cols.push(c);

        newly.clear();
        for &e in g.right_edges(c) {
            let r = g.edges()[e].left;
            if row_active[r] {
                row_active[r] = false;
                newly.push(r);
            }
        }
        newly.sort_unstable();
        rows.extend_from_slice(&newly);

        for &r in &newly {
            for &e in g.left_edges(r) {
                let c2 = g.edges()[e].right;
                if col_placed[c2] {
                    continue;
                }
                let d = buckets.degree[c2];
                buckets.remove(c2);
                buckets.insert(c2, d - 1);
                if d - 1 > 0 && d - 1 < min {
                    min = d - 1;
                }
            }
        }
    }

    cols.extend((0..g.n_right()).filter(|&c| !col_placed[c]));
    rows.extend((0..g.n_left()).filter(|&r| row_active[r]));
    (
        VertexOrder::from_sequence(&rows).expect("each row placed once"),
        VertexOrder::from_sequence(&cols).expect("each column placed once"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn star_places_column_then_rows() {
        let g = BipartiteGraph::from_pairs(3, 1, &[(2, 0), (0, 0), (1, 0)]).unwrap();
        let (l, r) = min_degree_order(&g, 0);
        assert_eq!(r.sequence(), vec![0]);
        assert_eq!(l.sequence(), vec![0, 1, 2]);
    }

    #[test]
    fn matching_gives_uniform_column_order() {
        let g = BipartiteGraph::from_pairs(3, 3, &[(0, 0), (1, 1), (2, 2)]).unwrap();
        let mut freq: HashMap<Vec<usize>, u64> = HashMap::new();
        let trials = 6000;
        for s in 0..trials {
            let (l, r) = min_degree_order(&g, s);
            assert_eq!(l.sequence(), r.sequence());
            *freq.entry(r.sequence()).or_insert(0) += 1;
        }
        assert_eq!(freq.len(), 6);
        let obs: Vec<u64> = freq.values().copied().collect();
        let (_, p) = crate::stats::chi_square_gof(&obs, &[1.0 / 6.0; 6]);
        assert!(p > 0.001, "{p}");
    }

    #[test]
    fn picks_minimum_degree_first() {
        // column 0 has degree 3, column 1 degree 1
        let g = BipartiteGraph::from_pairs(3, 2, &[(0, 0), (1, 0), (2, 0), (2, 1)]).unwrap();
        for s in 0..20 {
            let (l, r) = min_degree_order(&g, s);
            assert_eq!(r.sequence(), vec![1, 0]);
            assert_eq!(l.sequence(), vec![2, 0, 1]);
        }
    }

    #[test]
    fn disconnected_blocks_are_exhausted_in_turn() {
        let mut pairs = Vec::new();
        for i in 0..4 {
            for j in 0..3 {
                pairs.push((i, j));
                pairs.push((i + 4, j + 3));
            }
        }
        let g = BipartiteGraph::from_pairs(8, 6, &pairs).unwrap();
        for s in 0..30 {
            let (l, _) = min_degree_order(&g, s);
            let seq = l.sequence();
            let first_block = seq[0] < 4;
            assert!(seq[..4].iter().all(|&v| (v < 4) == first_block));
        }
    }

    #[test]
    fn isolated_vertices_go_last() {
        let g = BipartiteGraph::from_pairs(3, 3, &[(1, 1)]).unwrap();
        let (l, r) = min_degree_order(&g, 2);
        assert_eq!(l.sequence(), vec![1, 0, 2]);
        assert_eq!(r.sequence(), vec![1, 0, 2]);
    }

    #[test]
    fn multi_edges_count_toward_degree() {
        let g = BipartiteGraph::from_pairs(2, 2, &[(0, 0), (0, 0), (1, 1)]).unwrap();
        for s in 0..10 {
            let (_, r) = min_degree_order(&g, s);
            assert_eq!(r.sequence()[0], 1);
        }
    }
}
