//! Vertex orderings that expose block structure: the spectral natural
//! order, minimum degree, and the edge split that keeps the four-point
//! test's significance honest after ordering.

mod mindeg;
mod spectral;
mod split;
mod strategy;

pub use mindeg::min_degree_order;
pub use spectral::{
    bfs_diameter_estimate, bfs_levels_from, canonicalize_sign, natural_order, order_by_scores,
    power_method_fiedler, rayleigh_quotient, right_scores, NaturalOrderResult, Normalization,
    PowerIteration, PowerMethodConfig,
};
pub use split::split_edges;
pub use strategy::{
    GivenOrder, MinDegreeOrder, NaturalOrder, OrderOutcome, OrderingRegistry, OrderingStrategy,
};

use crate::error::Result;
use crate::fourpoint::{four_point_test, FourPointResult};
use crate::graph::BipartiteGraph;
use crate::rng::derive_seed;

#[derive(Debug, Clone)]
pub struct OrderedTest {
    pub order: OrderOutcome,
    pub results: Vec<FourPointResult>,
    /// Edges actually tested (the held-out half under a split).
    pub tested_edges: usize,
}

/// Orders `g` with `strategy` and runs the four-point test. With `split`,
/// the order is learned on one random half of the edges and the test runs
/// on the other half.
pub fn ordered_four_point(
    g: &BipartiteGraph,
    strategy: &dyn OrderingStrategy,
    split: bool,
    seed: u64,
    repeats: usize,
) -> Result<OrderedTest> {
    let (train, test) = if split {
        let (a, b) = split_edges(g, derive_seed(seed, 0x5117))?;
        (a, Some(b))
    } else {
        (g.clone(), None)
    };
    let order = strategy.order(&train, derive_seed(seed, 0x0bde))?;
    let target = test.as_ref().unwrap_or(g);
    let results = four_point_test(target, &order.left, &order.right, derive_seed(seed, 0x7e57), repeats)?;
    Ok(OrderedTest {
        order,
        results,
        tested_edges: target.n_edges(),
    })
}
