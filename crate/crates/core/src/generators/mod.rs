//! Synthetic graph models and constructions, each also available by name
//! through [`GeneratorRegistry`].

mod bernoulli;
mod halfedge;
mod hypergraph;
mod primes;
mod twoblock;

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;
use crate::permpattern::{random_permutation, random_separable, Permutation};
use crate::rng::derive_seed;

pub use bernoulli::{
    gcd, hidden_block_model, hidden_rates, modular_model, modular_rates, BlockTruth, HiddenBlockParams,
    ModularModelParams,
};
pub use halfedge::{
    count_duplicate_pairs, expected_duplicates, graph_to_permutation, half_edge_graph, DuplicateEstimate,
    HalfEdgeSpec,
};
pub use hypergraph::{weighted_hypergraph, HypergraphParams};
pub use primes::{prime_divisor_graph, primes_up_to, PrimeDivisorParams, MAX_WINDOW};
pub use twoblock::{
    ordered_two_block_graph, pi_sets, two_block_relfreq, two_block_weights_as_printed, TwoBlockSizes,
};

/// `key=value` parameters as given on a command line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in items {
            let item = item.as_ref();
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::param(format!("expected key=value, got '{item}'")))?;
            if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::param(format!("parameter '{k}' given twice")));
            }
        }
        Ok(Params(map))
    }

    pub fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.0.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::param(format!("cannot parse {key}='{v}'"))),
        }
    }

    /// Rejects keys outside `known`, so typos do not silently fall back to
    /// defaults.
    pub fn only(&self, known: &[&str]) -> Result<()> {
        match self.0.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(Error::param(format!(
                "unknown parameter '{k}' (expected one of: {})",
                known.join(", ")
            ))),
            None => Ok(()),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Planted blocks, serialized for concordance scoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroundTruth {
    pub model: String,
    #[serde(flatten)]
    pub blocks: BlockTruth,
}

#[derive(Debug, Clone, Default)]
pub struct Generated {
    pub graph: Option<BipartiteGraph>,
    pub permutation: Option<Permutation>,
    pub truth: Option<GroundTruth>,
}

impl Generated {
    fn graph(g: BipartiteGraph) -> Self {
        Generated {
            graph: Some(g),
            ..Default::default()
        }
    }
}

pub trait Generator: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn generate(&self, params: &Params, seed: u64) -> Result<Generated>;
}

pub struct Modular;

impl Generator for Modular {
    fn name(&self) -> &'static str {
        "modular"
    }
    fn summary(&self) -> &'static str {
        "pseudo-random modular Bernoulli model (n, m, a, b | alpha, gamma, nudge)"
    }
    fn generate(&self, params: &Params, seed: u64) -> Result<Generated> {
        params.only(&["n", "m", "a", "b", "alpha", "gamma", "nudge"])?;
        let (n, m) = (params.get("n", 307usize)?, params.get("m", 211usize)?);
        let gamma = params.get("gamma", 0.048)?;
        let mut p = if params.contains("a") || params.contains("b") {
            ModularModelParams {
                n,
                m,
                a: params.get("a", 12)?,
                b: params.get("b", 13)?,
                gamma,
            }
        } else {
            ModularModelParams::from_alpha(n, m, params.get("alpha", 0.48)?, gamma)?
        };
        if params.get("nudge", false)? {
            p = p.nudge_coprime();
        }
        Ok(Generated::graph(modular_model(&p, seed)?))
    }
}

pub struct Hidden;

impl Generator for Hidden {
    fn name(&self) -> &'static str {
        "hidden"
    }
    fn summary(&self) -> &'static str {
        "Bernoulli model with hidden blocks A x B (n, m, alpha, gamma)"
    }
    fn generate(&self, params: &Params, seed: u64) -> Result<Generated> {
        params.only(&["n", "m", "alpha", "gamma"])?;
        let p = HiddenBlockParams {
            n: params.get("n", 307)?,
            m: params.get("m", 211)?,
            alpha: params.get("alpha", 0.48)?,
            gamma: params.get("gamma", 0.048)?,
        };
        let (g, blocks) = hidden_block_model(&p, seed)?;
        Ok(Generated {
            graph: Some(g),
            permutation: None,
            truth: Some(GroundTruth {
                model: self.name().into(),
                blocks,
            }),
        })
    }
}

pub struct TwoBlock;

impl Generator for TwoBlock {
    fn name(&self) -> &'static str {
        "twoblock"
    }
    fn summary(&self) -> &'static str {
        "ordered two-block model (alpha, edges, side | la, lr, rb, rr)"
    }
    fn generate(&self, params: &Params, seed: u64) -> Result<Generated> {
        params.only(&["alpha", "edges", "side", "la", "lr", "rb", "rr"])?;
        let side = params.get("side", 1000usize)?;
        let sizes = TwoBlockSizes {
            left_a: params.get("la", side)?,
            left_rest: params.get("lr", side)?,
            right_b: params.get("rb", side)?,
            right_rest: params.get("rr", side)?,
        };
        let g = ordered_two_block_graph(params.get("alpha", 0.5)?, params.get("edges", 100_000)?, sizes, seed)?;
        let blocks = BlockTruth {
            left_block: (0..sizes.left_a).collect(),
            right_block: (0..sizes.right_b).collect(),
        };
        Ok(Generated {
            graph: Some(g),
            permutation: None,
            truth: Some(GroundTruth {
                model: self.name().into(),
                blocks,
            }),
        })
    }
}

pub struct Hypergraph;

impl Generator for Hypergraph {
    fn name(&self) -> &'static str {
        "hypergraph"
    }
    fn summary(&self) -> &'static str {
        "distance-weighted random hypergraph (s | nleft, nright, k, uniform)"
    }
    fn generate(&self, params: &Params, seed: u64) -> Result<Generated> {
        params.only(&["s", "nleft", "nright", "k", "uniform"])?;
        let base = HypergraphParams::at_scale(params.get("s", 50)?);
        let p = HypergraphParams {
            n_left: params.get("nleft", base.n_left)?,
            n_right: params.get("nright", base.n_right)?,
            k: params.get("k", base.k)?,
            uniform: params.get("uniform", false)?,
        };
        Ok(Generated::graph(weighted_hypergraph(&p, seed)?))
    }
}

pub struct HalfEdge;

impl Generator for HalfEdge {
    fn name(&self) -> &'static str {
        "halfedge"
    }
    fn summary(&self) -> &'static str {
        "half-edge multigraph from a uniform permutation (n, m, w | lo, hi)"
    }
    fn generate(&self, params: &Params, seed: u64) -> Result<Generated> {
        params.only(&["n", "m", "w", "lo", "hi"])?;
        let (n, m) = (params.get("n", 1000)?, params.get("m", 800)?);
        let spec = if params.contains("lo") || params.contains("hi") {
            HalfEdgeSpec::uniform_random(n, m, params.get("lo", 1)?, params.get("hi", 10)?, derive_seed(seed, 0))?
        } else {
            HalfEdgeSpec::balanced(n, m, params.get("w", 4)?)?
        };
        let pi = random_permutation(spec.n_edges(), derive_seed(seed, 1));
        Ok(Generated {
            graph: Some(half_edge_graph(&spec, &pi)?),
            permutation: Some(pi),
            truth: None,
        })
    }
}

pub struct Separable;

impl Generator for Separable {
    fn name(&self) -> &'static str {
        "separable"
    }
    fn summary(&self) -> &'static str {
        "uniform random separable permutation (n)"
    }
    fn generate(&self, params: &Params, seed: u64) -> Result<Generated> {
        params.only(&["n"])?;
        Ok(Generated {
            permutation: Some(random_separable(params.get("n", 1000)?, seed)?),
            ..Default::default()
        })
    }
}

pub struct Primes;

impl Generator for Primes {
    fn name(&self) -> &'static str {
        "primes"
    }
    fn summary(&self) -> &'static str {
        "prime-divisor incidences of random integers (t, count)"
    }
    fn generate(&self, params: &Params, seed: u64) -> Result<Generated> {
        params.only(&["t", "count"])?;
        let p = PrimeDivisorParams {
            t: params.get("t", 20.0)?,
            count: params.get("count", 20_000)?,
        };
        Ok(Generated::graph(prime_divisor_graph(&p, seed)?))
    }
}

pub struct GeneratorRegistry {
    entries: BTreeMap<&'static str, Box<dyn Generator>>,
}

impl GeneratorRegistry {
    pub fn empty() -> Self {
        GeneratorRegistry {
            entries: BTreeMap::new(),
        }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Modular));
        r.register(Box::new(Hidden));
        r.register(Box::new(TwoBlock));
        r.register(Box::new(Hypergraph));
        r.register(Box::new(HalfEdge));
        r.register(Box::new(Separable));
        r.register(Box::new(Primes));
        r
    }

    pub fn register(&mut self, g: Box<dyn Generator>) {
        self.entries.insert(g.name(), g);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Generator> {
        self.entries.get(name).map(|g| g.as_ref()).ok_or_else(|| {
            Error::param(format!(
                "unknown generator '{name}' (available: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Generator> {
        self.entries.values().map(|g| g.as_ref())
    }
}

impl Default for GeneratorRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}
