//! Coupled-run sensitivity estimates.
//!
//! For each perturbation `p` and trial `t`, the algorithm runs on `G` and on
//! `p(G)` with the same tape `RandomTape::for_trial(base_seed, t)`, and the
//! distance between the two outputs is recorded. Sharing the tape is one
//! particular coupling of the two output distributions, so the mean distance
//! bounds the earth mover's distance from above.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::generate::{generate, GraphKind};
use crate::graph::{Edge, EdgeWeights, Graph, Perturbation, Vertex};
use crate::greedy::EdgeOrder;
use crate::io::write_graph;
use crate::matching::{hamming, weighted_hamming, Matching};
use crate::registry::MatchingAlgorithm;
use crate::tape::RandomTape;

pub const REPORT_SCHEMA: &str = "lowsens.sensitivity/1";
pub const QUANTITY: &str = "coupled-EMD-upper-bound";
/// Perturbation sweeps larger than this are sampled down to it.
pub const MAX_PERTURBATIONS: usize = 512;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Hamming distance.
    Plain,
    /// Weight of the symmetric difference.
    Weighted,
    /// Weighted distance divided by the weight of the deleted edge.
    Normalized,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationStats {
    pub target: Perturbation,
    pub mean: f64,
    /// Sample standard deviation over trials divided by `sqrt(trials)`.
    pub se: f64,
    pub max: f64,
    pub raw: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Seeds {
    pub base: u64,
    /// How trial tapes are derived from `base`.
    pub derivation: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub schema: &'static str,
    pub quantity: &'static str,
    pub algorithm: String,
    pub params: Value,
    pub mode: Mode,
    pub graph_digest: String,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    /// Number of perturbations the sample was drawn from.
    pub population: usize,
    pub sampled: bool,
    pub perturbations: Vec<PerturbationStats>,
    /// Largest per-perturbation mean.
    pub worst_case: f64,
    /// Mean of the per-perturbation means.
    pub average: f64,
    pub seeds: Seeds,
}

impl SensitivityReport {
    /// One CSV row per perturbation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,target,mean,se,max,trials\n");
        for p in &self.perturbations {
            let (kind, target) = match p.target {
                Perturbation::DeleteEdge(e) => ("delete_edge", e.to_string()),
                Perturbation::DeleteVertex(v) => ("delete_vertex", v.to_string()),
            };
            out.push_str(&format!("{kind},{target},{},{},{},{}\n", p.mean, p.se, p.max, self.trials));
        }
        out
    }
}

/// Hex SHA-256 of the graph's edge-list text.
pub fn graph_digest(g: &Graph) -> String {
    hex::encode(Sha256::digest(write_graph(g).as_bytes()))
}

pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let t = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().fold(0.0, |a, x| a + x) / t;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Edges,
    Vertices,
}

/// All single deletions of `target` kind, or a seeded sample of
/// [`MAX_PERTURBATIONS`] of them. Returns `(perturbations, population)`.
pub fn perturbations(g: &Graph, target: Target, seed: u64) -> (Vec<Perturbation>, usize) {
    let all: Vec<Perturbation> = match target {
        Target::Edges => g.edges().iter().map(|&e| Perturbation::DeleteEdge(e)).collect(),
        Target::Vertices => g.vertices().map(Perturbation::DeleteVertex).collect(),
    };
    let population = all.len();
    if population <= MAX_PERTURBATIONS {
        return (all, population);
    }
    let mut idx = sample(&mut ChaCha8Rng::seed_from_u64(seed), population, MAX_PERTURBATIONS).into_vec();
    idx.sort_unstable();
    (idx.into_iter().map(|i| all[i]).collect(), population)
}

fn distance(mode: Mode, a: &Matching, b: &Matching, weights: Option<&EdgeWeights>, p: Perturbation) -> Result<f64> {
    match mode {
        Mode::Plain => Ok(hamming(a, b) as f64),
        Mode::Weighted | Mode::Normalized => {
            let w = weights.ok_or_else(|| Error::arg("weighted distance needs edge weights"))?;
            let d = weighted_hamming(a, b, w)?;
            match (mode, p) {
                (Mode::Normalized, Perturbation::DeleteEdge(e)) => Ok(d / w.get(e).expect("validated")),
                _ => Ok(d),
            }
        }
    }
}

pub struct Experiment<'a> {
    pub algorithm: &'a dyn MatchingAlgorithm,
    pub graph: &'a Graph,
    pub weights: Option<&'a EdgeWeights>,
    pub mode: Mode,
    pub trials: usize,
    pub base_seed: u64,
}

/// Runs every (perturbation, trial) pair. Work is spread over the current
/// rayon pool; results are assembled in (perturbation, trial) order, so the
/// report does not depend on the thread count.
pub fn estimate(exp: &Experiment, perturbations: &[Perturbation], population: usize) -> Result<SensitivityReport> {
    if exp.trials == 0 {
        return Err(Error::arg("trials must be at least 1"));
    }
    if exp.mode != Mode::Plain && exp.weights.is_none() {
        return Err(Error::arg("weighted and normalized modes need edge weights"));
    }
    let perturbed: Vec<Graph> = perturbations.iter().map(|&p| exp.graph.apply(p)).collect::<Result<_>>()?;
    if exp.mode == Mode::Normalized {
        for &p in perturbations {
            match p {
                Perturbation::DeleteEdge(e) if exp.weights.and_then(|w| w.get(e)).is_some() => {}
                _ => return Err(Error::arg(format!("normalized mode needs a weighted edge deletion, got {p}"))),
            }
        }
    }
    let tapes: Vec<RandomTape> = (0..exp.trials as u64).map(|t| RandomTape::for_trial(exp.base_seed, t)).collect();
    let base: Vec<Matching> = tapes
        .par_iter()
        .map(|tape| exp.algorithm.run(exp.graph, exp.weights, tape))
        .collect::<Result<_>>()?;
    let raw: Vec<Vec<f64>> = perturbations
        .par_iter()
        .zip(&perturbed)
        .map(|(&p, h)| {
            tapes
                .par_iter()
                .zip(&base)
                .map(|(tape, m)| distance(exp.mode, m, &exp.algorithm.run(h, exp.weights, tape)?, exp.weights, p))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let stats: Vec<PerturbationStats> = perturbations
        .iter()
        .zip(raw)
        .map(|(&target, raw)| {
            let (mean, se) = mean_se(&raw);
            let max = raw.iter().copied().fold(0.0, f64::max);
            PerturbationStats { target, mean, se, max, raw }
        })
        .collect();
    let worst_case = stats.iter().map(|s| s.mean).fold(0.0, f64::max);
    let average = mean_se(&stats.iter().map(|s| s.mean).collect::<Vec<_>>()).0;
    Ok(SensitivityReport {
        schema: REPORT_SCHEMA,
        quantity: QUANTITY,
        algorithm: exp.algorithm.name().to_string(),
        params: exp.algorithm.params(),
        mode: exp.mode,
        graph_digest: graph_digest(exp.graph),
        n: exp.graph.n(),
        m: exp.graph.m(),
        trials: exp.trials,
        population,
        sampled: perturbations.len() < population,
        perturbations: stats,
        worst_case,
        average,
        seeds: Seeds { base: exp.base_seed, derivation: "trial t uses RandomTape::for_trial(base, t)" },
    })
}

/// A path whose edge ranks increase along it, the ranking, and the deletion
/// of its first edge. Greedy takes the odd-position edges before and the
/// even-position edges after, so the outputs differ in `n - 1` edges.
pub fn adversarial_greedy_instance(n: usize) -> Result<(Graph, EdgeOrder, Perturbation)> {
    if n < 4 {
        return Err(Error::arg(format!("adversarial instance needs n >= 4, got {n}")));
    }
    let g = generate(GraphKind::Path { n }, 0)?;
    let order = EdgeOrder::from_sequence((1..n as Vertex).map(|i| Edge::of(i - 1, i)));
    Ok((g, order, Perturbation::DeleteEdge(Edge::of(0, 1))))
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub eps: f64,
    pub cycle_length: usize,
    /// Trials whose output was the matching of even-position edges, and of
    /// odd-position edges.
    pub even_count: usize,
    pub odd_count: usize,
    pub deleted: Edge,
    pub report: SensitivityReport,
}

/// Builds the even cycle of length `1 / (10 eps)`, deletes one edge of the
/// perfect matching the algorithm outputs more often, and measures the
/// coupled distance.
pub fn randomized_lb_experiment(eps: f64, alg: &dyn MatchingAlgorithm, trials: usize, base_seed: u64) -> Result<LowerBoundReport> {
    let len = 1.0 / (10.0 * eps);
    let rounded = len.round();
    if eps.is_nan() || eps <= 0.0 || (len - rounded).abs() > 1e-6 || rounded < 4.0 || !(rounded as u64).is_multiple_of(2) {
        return Err(Error::arg(format!("1 / (10 eps) = {len} is not an even integer >= 4")));
    }
    let n = rounded as usize;
    let g = generate(GraphKind::Cycle { n }, 0)?;
    let even: Matching = (0..n as Vertex / 2).map(|j| Edge::of(2 * j, 2 * j + 1)).collect();
    let odd: Matching = (0..n as Vertex / 2).map(|j| Edge::of(2 * j + 1, (2 * j + 2) % n as Vertex)).collect();
    let outputs: Vec<Matching> = (0..trials as u64)
        .into_par_iter()
        .map(|t| alg.run(&g, None, &RandomTape::for_trial(base_seed, t)))
        .collect::<Result<_>>()?;
    let even_count = outputs.iter().filter(|m| **m == even).count();
    let odd_count = outputs.iter().filter(|m| **m == odd).count();
    let deleted = if odd_count > even_count { Edge::of(1, 2) } else { Edge::of(0, 1) };
    let exp = Experiment { algorithm: alg, graph: &g, weights: None, mode: Mode::Plain, trials, base_seed };
    let report = estimate(&exp, &[Perturbation::DeleteEdge(deleted)], g.m())?;
    Ok(LowerBoundReport { eps, cycle_length: n, even_count, odd_count, deleted, report })
}
