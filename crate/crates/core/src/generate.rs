//! Seeded instance generators. Output is a pure function of (kind, seed).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeWeights, Graph, Vertex, WeightedGraph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    Gnp { n: usize, p: f64 },
    Cycle { n: usize },
    Path { n: usize },
    BoundedDegree { n: usize, max_degree: usize },
}

pub fn generate(kind: GraphKind, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GraphKind::Gnp { n, p } => {
            check_n(n)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::arg(format!("gnp probability {p} outside [0, 1]")));
            }
            let mut edges = Vec::new();
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, edges)
        }
        GraphKind::Cycle { n } => {
            if n < 3 {
                return Err(Error::arg(format!("a simple cycle needs n >= 3, got {n}")));
            }
            let n32 = n as Vertex;
            Graph::from_edges(n, (0..n32).map(|i| (i, (i + 1) % n32)))
        }
        GraphKind::Path { n } => {
            check_n(n)?;
            Graph::from_edges(n, (1..n as Vertex).map(|i| (i - 1, i)))
        }
        GraphKind::BoundedDegree { n, max_degree } => {
            check_n(n)?;
            if max_degree >= n {
                return Err(Error::arg(format!("max degree {max_degree} must be < n = {n}")));
            }
            let mut pairs: Vec<(Vertex, Vertex)> = (0..n as Vertex)
                .flat_map(|u| (u + 1..n as Vertex).map(move |v| (u, v)))
                .collect();
            pairs.shuffle(&mut rng);
            let mut degree = vec![0usize; n];
            let mut edges = Vec::new();
            for (u, v) in pairs {
                if degree[u as usize] < max_degree && degree[v as usize] < max_degree {
                    degree[u as usize] += 1;
                    degree[v as usize] += 1;
                    edges.push((u, v));
                }
            }
            Graph::from_edges(n, edges)
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("n must be at least 1"));
    }
    if n > u32::MAX as usize {
        return Err(Error::arg("n exceeds the 32-bit identity space"));
    }
    Ok(())
}

/// Attaches independent integer weights drawn uniformly from `[lo, hi]`.
pub fn random_weights(g: Graph, lo: u32, hi: u32, seed: u64) -> Result<WeightedGraph> {
    if lo == 0 || lo > hi {
        return Err(Error::arg(format!("weight range [{lo}, {hi}] must satisfy 1 <= lo <= hi")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5745_4947_4854_5321);
    let weights: EdgeWeights = g
        .edges()
        .iter()
        .map(|&e: &Edge| (e, rng.gen_range(lo..=hi) as f64))
        .collect();
    WeightedGraph::new(g, weights)
}
