//! Sparse bipartite multigraphs with dual jagged-array adjacency.
//!
//! Left vertices are `0..n_left`, right vertices `0..n_right`. Edges form a
//! multiset: duplicates are kept unless [`BipartiteGraph::dedup`] is called.
//! Every degree quantity in the crate is derived from the two adjacencies.

mod components;
mod io;

pub use components::{connected_components, giant_component, is_connected, Component};
pub use io::{load_edge_list, read_edge_list_file, write_edge_list, write_labels, LoadOptions};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
}

impl Edge {
    pub fn new(left: usize, right: usize) -> Self {
        Edge { left, right }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Compressed rows: `items[offsets[v]..offsets[v + 1]]` are the edge indices
/// incident to vertex `v`, in ascending edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl Adjacency {
    fn build(n: usize, endpoint: impl Fn(usize) -> usize, n_edges: usize) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for e in 0..n_edges {
            offsets[endpoint(e) + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        let mut cursor = offsets.clone();
        let mut items = vec![0usize; n_edges];
        for e in 0..n_edges {
            let v = endpoint(e);
            items[cursor[v]] = e;
            cursor[v] += 1;
        }
        Adjacency { offsets, items }
    }

    #[inline]
    fn row(&self, v: usize) -> &[usize] {
        &self.items[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// Original string labels for each side, indexed by dense vertex index.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Labels {
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    edges: Vec<Edge>,
    left_adj: Adjacency,
    right_adj: Adjacency,
    labels: Option<Labels>,
}

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize, edges: Vec<Edge>) -> Result<Self> {
        for (k, e) in edges.iter().enumerate() {
            if e.left >= n_left || e.right >= n_right {
                return Err(Error::param(format!(
                    "edge {k} = ({}, {}) out of range for {n_left} x {n_right}",
                    e.left, e.right
                )));
            }
        }
        let n = edges.len();
        let left_adj = Adjacency::build(n_left, |e| edges[e].left, n);
        let right_adj = Adjacency::build(n_right, |e| edges[e].right, n);
        Ok(BipartiteGraph {
            n_left,
            n_right,
            edges,
            left_adj,
            right_adj,
            labels: None,
        })
    }

    pub fn from_pairs(n_left: usize, n_right: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(
            n_left,
            n_right,
            pairs.iter().map(|&(l, r)| Edge::new(l, r)).collect(),
        )
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.left.len() != self.n_left {
            return Err(Error::SizeMismatch {
                expected: self.n_left,
                actual: labels.left.len(),
            });
        }
        if labels.right.len() != self.n_right {
            return Err(Error::SizeMismatch {
                expected: self.n_right,
                actual: labels.right.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn left_label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l.left[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn right_label(&self, j: usize) -> String {
        match &self.labels {
            Some(l) => l.right[j].clone(),
            None => j.to_string(),
        }
    }

    /// Edge indices incident to left vertex `i`.
    pub fn left_edges(&self, i: usize) -> &[usize] {
        self.left_adj.row(i)
    }

    /// Edge indices incident to right vertex `j`.
    pub fn right_edges(&self, j: usize) -> &[usize] {
        self.right_adj.row(j)
    }

    pub fn left_degree(&self, i: usize) -> usize {
        self.left_adj.degree(i)
    }

    pub fn right_degree(&self, j: usize) -> usize {
        self.right_adj.degree(j)
    }

    pub fn degrees(&self) -> DegreeVectors {
        DegreeVectors {
            w: (0..self.n_left).map(|i| self.left_degree(i)).collect(),
            d: (0..self.n_right).map(|j| self.right_degree(j)).collect(),
            n_edges: self.n_edges(),
        }
    }

    pub fn joint_degree_matrix(&self) -> JointDegreeMatrix {
        JointDegreeMatrix::from_graph(self)
    }

    /// Relabels every edge `(i, j)` as `(left.rank(i), right.rank(j))`.
    pub fn apply_order(&self, left: &VertexOrder, right: &VertexOrder) -> Result<BipartiteGraph> {
        if left.len() != self.n_left {
            return Err(Error::SizeMismatch {
                expected: self.n_left,
                actual: left.len(),
            });
        }
        if right.len() != self.n_right {
            return Err(Error::SizeMismatch {
                expected: self.n_right,
                actual: right.len(),
            });
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(left.rank(e.left), right.rank(e.right)))
            .collect();
        let mut g = BipartiteGraph::new(self.n_left, self.n_right, edges)?;
        if let Some(labels) = &self.labels {
            let mut l = vec![String::new(); self.n_left];
            let mut r = vec![String::new(); self.n_right];
            for (i, s) in labels.left.iter().enumerate() {
                l[left.rank(i)] = s.clone();
            }
            for (j, s) in labels.right.iter().enumerate() {
                r[right.rank(j)] = s.clone();
            }
            g.labels = Some(Labels { left: l, right: r });
        }
        Ok(g)
    }

    /// Subgraph on the given edge indices, keeping only the listed vertices
    /// (in the listed order) and reindexing them densely.
    pub fn induced(
        &self,
        left_keep: &[usize],
        right_keep: &[usize],
        edge_ids: &[usize],
    ) -> Result<Subgraph> {
        let mut left_new = vec![usize::MAX; self.n_left];
        let mut right_new = vec![usize::MAX; self.n_right];
        for (k, &i) in left_keep.iter().enumerate() {
            left_new[i] = k;
        }
        for (k, &j) in right_keep.iter().enumerate() {
            right_new[j] = k;
        }
        let mut edges = Vec::with_capacity(edge_ids.len());
        for &e in edge_ids {
            let Edge { left, right } = self.edges[e];
            if left_new[left] == usize::MAX || right_new[right] == usize::MAX {
                return Err(Error::param(format!(
                    "edge {e} has an endpoint outside the kept vertex set"
                )));
            }
            edges.push(Edge::new(left_new[left], right_new[right]));
        }
        let mut graph = BipartiteGraph::new(left_keep.len(), right_keep.len(), edges)?;
        if let Some(labels) = &self.labels {
            graph.labels = Some(Labels {
                left: left_keep.iter().map(|&i| labels.left[i].clone()).collect(),
                right: right_keep.iter().map(|&j| labels.right[j].clone()).collect(),
            });
        }
        Ok(Subgraph {
            graph,
            left_map: left_keep.to_vec(),
            right_map: right_keep.to_vec(),
        })
    }

    /// Drops vertices of degree zero.
    pub fn compact(&self) -> Subgraph {
        let left: Vec<usize> = (0..self.n_left).filter(|&i| self.left_degree(i) > 0).collect();
        let right: Vec<usize> = (0..self.n_right)
            .filter(|&j| self.right_degree(j) > 0)
            .collect();
        let all: Vec<usize> = (0..self.n_edges()).collect();
        self.induced(&left, &right, &all)
            .expect("every edge endpoint has positive degree")
    }

    /// Collapses repeated `(left, right)` pairs to a single edge, keeping the
    /// first occurrence.
    pub fn dedup(&self) -> BipartiteGraph {
        let mut seen = std::collections::HashSet::with_capacity(self.n_edges());
        let edges: Vec<Edge> = self.edges.iter().copied().filter(|e| seen.insert(*e)).collect();
        let mut g = BipartiteGraph::new(self.n_left, self.n_right, edges)
            .expect("subset of valid edges");
        g.labels = self.labels.clone();
        g
    }

    /// Number of `(left, right)` positions carrying two or more edges.
    pub fn duplicate_positions(&self) -> usize {
        let mut dup = 0;
        let mut rights = Vec::new();
        for i in 0..self.n_left {
            rights.clear();
            rights.extend(self.left_edges(i).iter().map(|&e| self.edges[e].right));
            rights.sort_unstable();
            let mut k = 0;
            while k < rights.len() {
                let mut run = 1;
                while k + run < rights.len() && rights[k + run] == rights[k] {
                    run += 1;
                }
                if run >= 2 {
                    dup += 1;
                }
                k += run;
            }
        }
        dup
    }

    /// Edge multiset as a sorted list of `(left, right)` pairs.
    pub fn sorted_pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.left, e.right)).collect();
        v.sort_unstable();
        v
    }
}

/// A graph carved out of a parent graph, with maps from new to original
/// vertex indices.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: BipartiteGraph,
    pub left_map: Vec<usize>,
    pub right_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeVectors {
    pub w: Vec<usize>,
    pub d: Vec<usize>,
    pub n_edges: usize,
}

/// Edge counts `N_{w,d}` grouped by endpoint degrees, with the row-weight
/// and column-degree histograms `r_w` and `c_d`. Degree-zero vertices are
/// not counted in `r_w` / `c_d`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct JointDegreeMatrix {
    pub entries: BTreeMap<(usize, usize), usize>,
    pub row_weight_counts: BTreeMap<usize, usize>,
    pub col_degree_counts: BTreeMap<usize, usize>,
    pub n_edges: usize,
}

impl JointDegreeMatrix {
    pub fn from_graph(g: &BipartiteGraph) -> Self {
        let mut jdm = JointDegreeMatrix {
            n_edges: g.n_edges(),
            ..Default::default()
        };
        for e in g.edges() {
            *jdm
                .entries
                .entry((g.left_degree(e.left), g.right_degree(e.right)))
                .or_insert(0) += 1;
        }
        for i in 0..g.n_left() {
            let w = g.left_degree(i);
            if w > 0 {
                *jdm.row_weight_counts.entry(w).or_insert(0) += 1;
            }
        }
        for j in 0..g.n_right() {
            let d = g.right_degree(j);
            if d > 0 {
                *jdm.col_degree_counts.entry(d).or_insert(0) += 1;
            }
        }
        jdm
    }

    pub fn get(&self, w: usize, d: usize) -> usize {
        self.entries.get(&(w, d)).copied().unwrap_or(0)
    }
}

/// Bijection from original vertex index to rank on one side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexOrder {
    perm: Vec<usize>,
}

impl VertexOrder {
    pub fn identity(n: usize) -> Self {
        VertexOrder {
            perm: (0..n).collect(),
        }
    }

    /// From `ranks[i]` = rank of vertex `i`.
    pub fn from_ranks(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        let mut seen = vec![false; n];
        for &r in &ranks {
            if r >= n || seen[r] {
                return Err(Error::param("vertex order is not a bijection"));
            }
            seen[r] = true;
        }
        Ok(VertexOrder { perm: ranks })
    }

    /// From `sequence[r]` = vertex placed at rank `r`.
    pub fn from_sequence(sequence: &[usize]) -> Result<Self> {
        let n = sequence.len();
        let mut ranks = vec![usize::MAX; n];
        for (r, &v) in sequence.iter().enumerate() {
            if v >= n || ranks[v] != usize::MAX {
                return Err(Error::param("vertex sequence is not a bijection"));
            }
            ranks[v] = r;
        }
        Ok(VertexOrder { perm: ranks })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    #[inline]
    pub fn rank(&self, v: usize) -> usize {
        self.perm[v]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.perm
    }

    /// Vertices listed by increasing rank.
    pub fn sequence(&self) -> Vec<usize> {
        let mut seq = vec![0; self.perm.len()];
        for (v, &r) in self.perm.iter().enumerate() {
            seq[r] = v;
        }
        seq
    }

    pub fn reversed(&self) -> Self {
        let n = self.perm.len();
        VertexOrder {
            perm: self.perm.iter().map(|&r| n - 1 - r).collect(),
        }
    }

    /// Lifts an order on a subgraph to the parent vertex set. Subgraph
    /// vertices come first in their sub-order; the rest follow by ascending
    /// original index.
    pub fn extend_from_subgraph(&self, map: &[usize], n_full: usize) -> Result<Self> {
        if map.len() != self.perm.len() {
            return Err(Error::SizeMismatch {
                expected: self.perm.len(),
                actual: map.len(),
            });
        }
        let mut seq: Vec<usize> = self.sequence().into_iter().map(|v| map[v]).collect();
        let mut inside = vec![false; n_full];
        for &v in &seq {
            inside[v] = true;
        }
        seq.extend((0..n_full).filter(|&v| !inside[v]));
        VertexOrder::from_sequence(&seq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> BipartiteGraph {
        BipartiteGraph::from_pairs(2, 1, &[(0, 0), (1, 0)]).unwrap()
    }

    #[test]
    fn degrees_of_path() {
        let d = path().degrees();
        assert_eq!(d.w, vec![1, 1]);
        assert_eq!(d.d, vec![2]);
        assert_eq!(d.n_edges, 2);
    }

    #[test]
    fn zero_degree_vertex_reported() {
        let g = BipartiteGraph::from_pairs(3, 2, &[(0, 0), (2, 0)]).unwrap();
        let d = g.degrees();
        assert_eq!(d.w, vec![1, 0, 1]);
        assert_eq!(d.d, vec![2, 0]);
    }

    #[test]
    fn regular_graph_edge_count() {
        // w = 3 on n = 4 left vertices, 6 right vertices of degree 2
        let mut pairs = Vec::new();
        for i in 0..4 {
            for k in 0..3 {
                pairs.push((i, (i * 3 + k) % 6));
            }
        }
        let g = BipartiteGraph::from_pairs(4, 6, &pairs).unwrap();
        let d = g.degrees();
        assert_eq!(d.n_edges, 12);
        assert!(d.w.iter().all(|&w| w == 3));
        assert_eq!(d.w.iter().sum::<usize>(), d.d.iter().sum::<usize>());
    }

    #[test]
    fn joint_degree_matching_and_star() {
        let m = BipartiteGraph::from_pairs(5, 5, &(0..5).map(|i| (i, i)).collect::<Vec<_>>())
            .unwrap();
        let jdm = m.joint_degree_matrix();
        assert_eq!(jdm.entries.len(), 1);
        assert_eq!(jdm.get(1, 1), 5);

        let s = BipartiteGraph::from_pairs(1, 4, &[(0, 0), (0, 1), (0, 2), (0, 3)]).unwrap();
        let jdm = s.joint_degree_matrix();
        assert_eq!(jdm.get(4, 1), 4);
        assert_eq!(jdm.row_weight_counts[&4], 1);
        assert_eq!(jdm.col_degree_counts[&1], 4);
    }

    #[test]
    fn out_of_range_edge_rejected() {
        assert!(BipartiteGraph::from_pairs(1, 1, &[(0, 1)]).is_err());
    }

    #[test]
    fn apply_identity_and_double_reversal() {
        let g = BipartiteGraph::from_pairs(3, 2, &[(0, 1), (2, 0), (1, 1), (2, 1)]).unwrap();
        let id = g
            .apply_order(&VertexOrder::identity(3), &VertexOrder::identity(2))
            .unwrap();
        assert_eq!(id.edges(), g.edges());
        let rl = VertexOrder::identity(3).reversed();
        let rr = VertexOrder::identity(2).reversed();
        let once = g.apply_order(&rl, &rr).unwrap();
        assert_ne!(once.edges(), g.edges());
        let twice = once.apply_order(&rl, &rr).unwrap();
        assert_eq!(twice.edges(), g.edges());
    }

    #[test]
    fn apply_order_size_mismatch() {
        let g = path();
        let err = g
            .apply_order(&VertexOrder::identity(3), &VertexOrder::identity(1))
            .unwrap_err();
        assert!(matches!(err, Error::SizeMismatch { .. }));
    }

    #[test]
    fn vertex_order_validation() {
        assert!(VertexOrder::from_ranks(vec![0, 0]).is_err());
        assert!(VertexOrder::from_ranks(vec![0, 2]).is_err());
        let o = VertexOrder::from_sequence(&[2, 0, 1]).unwrap();
        assert_eq!(o.ranks(), &[1, 2, 0]);
        assert_eq!(o.sequence(), vec![2, 0, 1]);
    }

    #[test]
    fn extend_places_outside_vertices_last() {
        let sub = VertexOrder::from_sequence(&[1, 0]).unwrap();
        let full = sub.extend_from_subgraph(&[3, 1], 5).unwrap();
        assert_eq!(full.sequence(), vec![1, 3, 0, 2, 4]);
    }

    #[test]
    fn compact_drops_isolated() {
        let g = BipartiteGraph::from_pairs(3, 3, &[(0, 2), (2, 2)]).unwrap();
        let c = g.compact();
        assert_eq!(c.graph.n_left(), 2);
        assert_eq!(c.graph.n_right(), 1);
        assert_eq!(c.left_map, vec![0, 2]);
        assert_eq!(c.right_map, vec![2]);
    }

    #[test]
    fn dedup_and_duplicate_positions() {
        let g = BipartiteGraph::from_pairs(2, 2, &[(0, 0), (0, 0), (0, 0), (1, 1), (1, 0), (1, 1)])
            .unwrap();
        assert_eq!(g.duplicate_positions(), 2);
        let d = g.dedup();
        assert_eq!(d.n_edges(), 3);
        assert_eq!(d.duplicate_positions(), 0);
    }
}
