use std::collections::VecDeque;

use super::{BipartiteGraph, Subgraph};

/// One connected component, with members listed in ascending index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Component {
    fn min_left(&self) -> usize {
        self.left.first().copied().unwrap_or(usize::MAX)
    }
}

/// Breadth-first search over the dual adjacency. Isolated vertices form
/// their own edgeless components. Components are returned in order of their
/// smallest left vertex, then by smallest right vertex for left-free ones.
pub fn connected_components(g: &BipartiteGraph) -> Vec<Component> {
    let mut left_seen = vec![false; g.n_left()];
    let mut right_seen = vec![false; g.n_right()];
    let mut out = Vec::new();
    let mut queue: VecDeque<(bool, usize)> = VecDeque::new();

    let mut explore = |start: (bool, usize),
                       left_seen: &mut Vec<bool>,
                       right_seen: &mut Vec<bool>|
     -> Component {
        let mut comp = Component {
            left: Vec::new(),
            right: Vec::new(),
            edges: Vec::new(),
        };
        queue.clear();
        queue.push_back(start);
        while let Some((is_left, v)) = queue.pop_front() {
            if is_left {
                comp.left.push(v);
                for &e in g.left_edges(v) {
                    comp.edges.push(e);
                    let r = g.edges()[e].right;
                    if !right_seen[r] {
                        right_seen[r] = true;
                        queue.push_back((false, r));
                    }
                }
            } else {
                comp.right.push(v);
                for &e in g.right_edges(v) {
                    let l = g.edges()[e].left;
                    if !left_seen[l] {
                        left_seen[l] = true;
                        queue.push_back((true, l));
                    }
                }
            }
        }
        comp.left.sort_unstable();
        comp.right.sort_unstable();
        comp.edges.sort_unstable();
        comp
    };

    for i in 0..g.n_left() {
        if !left_seen[i] {
            left_seen[i] = true;
            out.push(explore((true, i), &mut left_seen, &mut right_seen));
        }
    }
    for j in 0..g.n_right() {
        if !right_seen[j] {
            right_seen[j] = true;
            out.push(explore((false, j), &mut left_seen, &mut right_seen));
        }
    }
    out
}

/// True when every vertex is reachable from every other. A graph with no
/// vertices counts as connected.
pub fn is_connected(g: &BipartiteGraph) -> bool {
    connected_components(g).len() <= 1
}

/// The component with the most edges; ties go to the one holding the
/// smallest left index. Isolated vertices never win against an edge.
pub fn giant_component(g: &BipartiteGraph) -> Subgraph {
    let comps = connected_components(g);
    let best = comps
        .iter()
        .min_by_key(|c| (std::cmp::Reverse(c.edges.len()), c.min_left()))
        .cloned()
        .unwrap_or(Component {
            left: Vec::new(),
            right: Vec::new(),
            edges: Vec::new(),
        });
    g.induced(&best.left, &best.right, &best.edges)
        .expect("component is closed under incidence")
}
