//! Matching algorithms behind one trait, looked up by name.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::approx::{approx_matching, ApproxParams, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph};
use crate::greedy::greedy_matching;
use crate::lca::deterministic_mm_with;
use crate::matching::Matching;
use crate::tape::RandomTape;
use crate::weighted::{bucketed, shared_order};

pub trait MatchingAlgorithm: Send + Sync {
    fn name(&self) -> &'static str;

    /// Parameters, as recorded in reports.
    fn params(&self) -> Value;

    /// True when the output ignores the tape.
    fn is_deterministic(&self) -> bool {
        false
    }

    fn requires_weights(&self) -> bool {
        false
    }

    /// `weights` may list edges absent from `g`; they are ignored.
    fn run(&self, g: &Graph, weights: Option<&EdgeWeights>, tape: &RandomTape) -> Result<Matching>;
}

pub struct Greedy;

impl MatchingAlgorithm for Greedy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn params(&self) -> Value {
        json!({})
    }

    fn run(&self, g: &Graph, _: Option<&EdgeWeights>, tape: &RandomTape) -> Result<Matching> {
        greedy_matching(g, &shared_order(tape))
    }
}

pub struct Approx {
    pub params: ApproxParams,
    pub budget: u64,
}

impl MatchingAlgorithm for Approx {
    fn name(&self) -> &'static str {
        "approx"
    }

    fn params(&self) -> Value {
        json!({
            "eps": self.params.eps,
            "k": self.params.k,
            "r": self.params.r,
            "delta": self.params.delta,
            "budget": self.budget,
        })
    }

    fn run(&self, g: &Graph, _: Option<&EdgeWeights>, tape: &RandomTape) -> Result<Matching> {
        approx_matching(g, &self.params, tape, self.budget)
    }
}

/// Uses `delta_max` forests on every graph, so a graph and its perturbations
/// share one forest layout.
pub struct Lca {
    pub delta_max: usize,
}

impl MatchingAlgorithm for Lca {
    fn name(&self) -> &'static str {
        "lca"
    }

    fn params(&self) -> Value {
        json!({ "delta_max": self.delta_max })
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn run(&self, g: &Graph, _: Option<&EdgeWeights>, _: &RandomTape) -> Result<Matching> {
        if g.max_degree() > self.delta_max {
            return Err(Error::Guard(format!(
                "max degree {} exceeds --delta-max {}",
                g.max_degree(),
                self.delta_max
            )));
        }
        deterministic_mm_with(g, self.delta_max.max(1))
    }
}

pub struct Weighted {
    pub alpha: f64,
}

impl MatchingAlgorithm for Weighted {
    fn name(&self) -> &'static str {
        "weighted"
    }

    fn params(&self) -> Value {
        json!({ "alpha": self.alpha })
    }

    fn requires_weights(&self) -> bool {
        true
    }

    fn run(&self, g: &Graph, weights: Option<&EdgeWeights>, tape: &RandomTape) -> Result<Matching> {
        let weights = weights.ok_or_else(|| Error::arg("the weighted algorithm needs edge weights"))?;
        Ok(bucketed(g, weights, self.alpha, tape)?.matching)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RegistryConfig {
    pub approx: ApproxParams,
    pub budget: u64,
    pub alpha: f64,
    pub delta_max: usize,
}

impl Default for RegistryConfig {
    fn default() -> Self {
        RegistryConfig { approx: ApproxParams::DESK, budget: DEFAULT_BUDGET, alpha: 2.0, delta_max: 5 }
    }
}

pub struct Registry {
    algorithms: BTreeMap<&'static str, Box<dyn MatchingAlgorithm>>,
}

impl Registry {
    pub fn empty() -> Registry {
        Registry { algorithms: BTreeMap::new() }
    }

    /// Registry holding `greedy`, `approx`, `lca` and `weighted`.
    pub fn new(config: RegistryConfig) -> Registry {
        let mut r = Registry::empty();
        r.register(Box::new(Greedy));
        r.register(Box::new(Approx { params: config.approx, budget: config.budget }));
        r.register(Box::new(Lca { delta_max: config.delta_max }));
        r.register(Box::new(Weighted { alpha: config.alpha }));
        r
    }

    /// Adds `alg`, replacing any algorithm of the same name.
    pub fn register(&mut self, alg: Box<dyn MatchingAlgorithm>) {
        self.algorithms.insert(alg.name(), alg);
    }

    pub fn get(&self, name: &str) -> Result<&dyn MatchingAlgorithm> {
        self.algorithms.get(name).map(|b| b.as_ref()).ok_or_else(|| {
            Error::arg(format!("unknown algorithm {name:?} (known: {})", self.names().join(", ")))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.algorithms.keys().copied().collect()
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::new(RegistryConfig::default())
    }
}
