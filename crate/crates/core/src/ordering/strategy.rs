//! Vertex-ordering strategies behind a common trait, looked up by name.

use std::collections::BTreeMap;

use super::{min_degree_order, natural_order, NaturalOrderResult, PowerMethodConfig};
use crate::error::{Error, Result};
use crate::graph::{giant_component, BipartiteGraph, VertexOrder};

#[derive(Debug, Clone)]
pub struct OrderOutcome {
    pub left: VertexOrder,
    pub right: VertexOrder,
    pub diagnostics: Option<NaturalOrderResult>,
    /// Human-readable remark, e.g. that only the giant component was used.
    pub notice: Option<String>,
}

pub trait OrderingStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn order(&self, g: &BipartiteGraph, seed: u64) -> Result<OrderOutcome>;
}

/// Keeps the input order.
pub struct GivenOrder;

impl OrderingStrategy for GivenOrder {
    fn name(&self) -> &'static str {
        "given"
    }

    fn order(&self, g: &BipartiteGraph, _seed: u64) -> Result<OrderOutcome> {
        Ok(OrderOutcome {
            left: VertexOrder::identity(g.n_left()),
            right: VertexOrder::identity(g.n_right()),
            diagnostics: None,
            notice: None,
        })
    }
}

/// Spectral order, computed on the giant component when the graph is
/// disconnected or has isolated vertices. Vertices outside the giant
/// component follow in ascending index order.
pub struct NaturalOrder {
    pub config: PowerMethodConfig,
}

impl OrderingStrategy for NaturalOrder {
    fn name(&self) -> &'static str {
        "natural"
    }

    fn order(&self, g: &BipartiteGraph, seed: u64) -> Result<OrderOutcome> {
        let cfg = PowerMethodConfig { seed, ..self.config };
        let giant = giant_component(g);
        if giant.graph.n_edges() == 0 {
            return Err(Error::EmptyInput);
        }
        let whole = giant.graph.n_left() == g.n_left() && giant.graph.n_right() == g.n_right();
        let (l, r, res) = natural_order(&giant.graph, &cfg)?;
        if whole {
            return Ok(OrderOutcome {
                left: l,
                right: r,
                diagnostics: Some(res),
                notice: None,
            });
        }
        let notice = format!(
            "natural order computed on the giant component ({} of {} edges, {} of {} left, {} of {} right vertices)",
            giant.graph.n_edges(),
            g.n_edges(),
            giant.graph.n_left(),
            g.n_left(),
            giant.graph.n_right(),
            g.n_right()
        );
        Ok(OrderOutcome {
            left: l.extend_from_subgraph(&giant.left_map, g.n_left())?,
            right: r.extend_from_subgraph(&giant.right_map, g.n_right())?,
            diagnostics: Some(res),
            notice: Some(notice),
        })
    }
}

pub struct MinDegreeOrder;

impl OrderingStrategy for MinDegreeOrder {
    fn name(&self) -> &'static str {
        "mindeg"
    }

    fn order(&self, g: &BipartiteGraph, seed: u64) -> Result<OrderOutcome> {
        let (left, right) = min_degree_order(g, seed);
        Ok(OrderOutcome {
            left,
            right,
            diagnostics: None,
            notice: None,
        })
    }
}

pub struct OrderingRegistry {
    entries: BTreeMap<&'static str, Box<dyn OrderingStrategy>>,
}

impl OrderingRegistry {
    pub fn empty() -> Self {
        OrderingRegistry {
            entries: BTreeMap::new(),
        }
    }

    /// `given`, `natural` (with `config`) and `mindeg`.
    pub fn with_defaults(config: PowerMethodConfig) -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(GivenOrder));
        reg.register(Box::new(NaturalOrder { config }));
        reg.register(Box::new(MinDegreeOrder));
        reg
    }

    pub fn register(&mut self, s: Box<dyn OrderingStrategy>) {
        self.entries.insert(s.name(), s);
    }

    pub fn get(&self, name: &str) -> Result<&dyn OrderingStrategy> {
        self.entries.get(name).map(|b| b.as_ref()).ok_or_else(|| {
            Error::param(format!(
                "unknown ordering {name:?}; available: {}",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

impl Default for OrderingRegistry {
    fn default() -> Self {
        Self::with_defaults(PowerMethodConfig::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup() {
        let reg = OrderingRegistry::default();
        assert_eq!(reg.names(), vec!["given", "mindeg", "natural"]);
        assert!(reg.get("natural").is_ok());
        assert!(reg.get("spiral").is_err());
    }

    #[test]
    fn natural_restricts_to_giant_component() {
        let mut pairs = vec![(5, 5)];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    pairs.push((i, j));
                }
            }
        }
        pairs.push((3, 3));
        pairs.push((3, 0));
        pairs.push((0, 3));
        let g = BipartiteGraph::from_pairs(7, 6, &pairs).unwrap();
        let out = OrderingRegistry::default().get("natural").unwrap().order(&g, 1).unwrap();
        assert!(out.notice.is_some());
        assert_eq!(out.left.len(), 7);
        assert_eq!(out.right.len(), 6);
        // left vertices 4, 5, 6 are outside the giant component
        let seq = out.left.sequence();
        assert_eq!(&seq[4..], &[4, 5, 6]);
    }

    #[test]
    fn given_is_identity() {
        let g = BipartiteGraph::from_pairs(2, 3, &[(0, 2), (1, 0)]).unwrap();
        let out = GivenOrder.order(&g, 0).unwrap();
        assert_eq!(out.left, VertexOrder::identity(2));
        assert_eq!(out.right, VertexOrder::identity(3));
    }
}
