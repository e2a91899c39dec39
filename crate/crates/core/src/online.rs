//! Vertex-arrival streams. After every arrival the algorithm is rerun from
//! scratch on the induced prefix graph with the same tape, and the
//! replacements between consecutive outputs are counted.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, Graph, Vertex};
use crate::matching::{hamming, Matching};
use crate::registry::MatchingAlgorithm;
use crate::tape::RandomTape;

#[derive(Clone, Debug)]
pub struct VertexArrivalStream {
    graph: Graph,
    order: Vec<Vertex>,
}

impl VertexArrivalStream {
    /// `order` must be a permutation of `0..n`.
    pub fn new(graph: Graph, order: Vec<Vertex>) -> Result<VertexArrivalStream> {
        let mut seen = vec![false; graph.n()];
        for &v in &order {
            match seen.get_mut(v as usize) {
                Some(s) if !*s => *s = true,
                Some(_) => return Err(Error::arg(format!("vertex {v} arrives twice"))),
                None => return Err(Error::arg(format!("vertex {v} out of range (n = {})", graph.n()))),
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::arg(format!("vertex {v} never arrives")));
        }
        Ok(VertexArrivalStream { graph, order })
    }

    pub fn by_id(graph: Graph) -> VertexArrivalStream {
        let order = (0..graph.n() as Vertex).collect();
        VertexArrivalStream { graph, order }
    }

    pub fn shuffled(graph: Graph, seed: u64) -> VertexArrivalStream {
        let mut order: Vec<Vertex> = (0..graph.n() as Vertex).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        VertexArrivalStream { graph, order }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    /// Graph induced by the first `i` arrivals, in the full identity space.
    pub fn prefix(&self, i: usize) -> Graph {
        let mut keep = vec![false; self.graph.n()];
        for &v in &self.order[..i] {
            keep[v as usize] = true;
        }
        self.graph.induced(&keep)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReplacementTrace {
    /// `sizes[i]` = size of the matching after arrival `i + 1`.
    pub sizes: Vec<usize>,
    /// `replacements[i]` = Hamming distance between the matchings before and
    /// after arrival `i + 1`.
    pub replacements: Vec<usize>,
    pub total: usize,
    #[serde(skip)]
    pub matchings: Vec<Matching>,
}

pub fn simulate(
    stream: &VertexArrivalStream,
    alg: &dyn MatchingAlgorithm,
    weights: Option<&EdgeWeights>,
    tape: &RandomTape,
) -> Result<ReplacementTrace> {
    let mut trace = ReplacementTrace::default();
    let mut prev = Matching::new();
    for i in 1..=stream.order.len() {
        let m = alg.run(&stream.prefix(i), weights, tape)?;
        let d = hamming(&prev, &m);
        trace.sizes.push(m.len());
        trace.replacements.push(d);
        trace.total += d;
        trace.matchings.push(m.clone());
        prev = m;
    }
    Ok(trace)
}
