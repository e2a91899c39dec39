//! Weight-bucketed greedy matching.
//!
//! Level `i` holds the edges of weight at least `alpha^i`. Each level gets
//! its own greedy maximal matching under one shared edge order, and the
//! levels are merged from the heaviest down, skipping edges that touch an
//! already covered vertex.

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeWeights, Graph, WeightedGraph};
use crate::greedy::{greedy_over, EdgeOrder};
use crate::matching::Matching;
use crate::tape::{InvocationPath, Label, RandomTape};

const MAX_LEVELS: usize = 4096;

#[derive(Clone, Debug)]
pub struct WeightBuckets {
    pub alpha: f64,
    /// Factor every weight was divided by so the lightest edge weighs >= 1.
    pub scale: f64,
    /// `levels[i]` = edges with scaled weight >= `alpha^i`, in ascending edge order.
    pub levels: Vec<Vec<Edge>>,
}

impl WeightBuckets {
    pub fn new(g: &WeightedGraph, alpha: f64) -> Result<WeightBuckets> {
        let (scale, levels) = edge_levels(&g.graph, &g.weights, alpha)?;
        let count = levels.iter().copied().max().map_or(1, |l| l + 1);
        let mut buckets = vec![Vec::new(); count];
        for (&e, &l) in g.graph.edges().iter().zip(&levels) {
            for b in &mut buckets[..=l] {
                b.push(e);
            }
        }
        Ok(WeightBuckets { alpha, scale, levels: buckets })
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }
}

/// Rescaling factor and, for every edge of `g` in edge order, the highest
/// level containing it.
fn edge_levels(g: &Graph, weights: &EdgeWeights, alpha: f64) -> Result<(f64, Vec<usize>)> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::arg(format!("alpha must be a finite value > 1, got {alpha}")));
    }
    let ws = g
        .edges()
        .iter()
        .map(|&e| weights.get(e).ok_or_else(|| Error::arg(format!("edge {e} has no weight"))))
        .collect::<Result<Vec<f64>>>()?;
    if let Some(w) = ws.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::arg(format!("weights must be positive and finite, got {w}")));
    }
    let scale = ws.iter().copied().fold(1.0, f64::min);
    let top = ws.iter().fold(1.0, |m: f64, &w| m.max(w / scale));
    let mut thresholds = vec![1.0];
    while thresholds.len() < MAX_LEVELS {
        let next = thresholds[thresholds.len() - 1] * alpha;
        if next > top {
            break;
        }
        thresholds.push(next);
    }
    if thresholds.len() == MAX_LEVELS {
        return Err(Error::arg(format!("weight ratio {top} needs more than {MAX_LEVELS} levels at alpha = {alpha}")));
    }
    let levels = ws.iter().map(|w| thresholds.partition_point(|&t| t <= w / scale) - 1).collect();
    Ok((scale, levels))
}

/// Output of [`weighted_matching_counted`].
#[derive(Clone, Debug)]
pub struct WeightedRun {
    pub matching: Matching,
    /// Per-level greedy matchings, lowest level first.
    pub level_matchings: Vec<Matching>,
    /// Edge visits: every level edge scanned by its greedy pass plus every
    /// level-matching edge scanned by the merge.
    pub operations: u64,
}

pub fn weighted_matching(g: &WeightedGraph, alpha: f64, tape: &RandomTape) -> Result<Matching> {
    Ok(weighted_matching_counted(g, alpha, tape)?.matching)
}

/// The edge order shared by every level. It is the same order the plain
/// greedy algorithm uses, so unit weights reproduce plain greedy.
pub fn shared_order(tape: &RandomTape) -> EdgeOrder {
    EdgeOrder::from_tape(*tape, InvocationPath::root().child(Label::Initial, 0))
}

pub fn weighted_matching_counted(g: &WeightedGraph, alpha: f64, tape: &RandomTape) -> Result<WeightedRun> {
    bucketed(&g.graph, &g.weights, alpha, tape)
}

/// Same as [`weighted_matching_counted`] on `g` with weights looked up in
/// `weights`, which may also list edges not in `g`.
pub fn bucketed(g: &Graph, weights: &EdgeWeights, alpha: f64, tape: &RandomTape) -> Result<WeightedRun> {
    let (_, levels) = edge_levels(g, weights, alpha)?;
    let order = shared_order(tape);
    let n = g.n();
    let top = levels.iter().copied().max().unwrap_or(0);
    let mut keyed: Vec<(u64, Edge, usize)> = g
        .edges()
        .iter()
        .zip(&levels)
        .map(|(&e, &l)| (order.rank(e).expect("tape ranks every edge"), e, l))
        .collect();
    keyed.sort_unstable();

    let mut operations = 0u64;
    // level matchings as edge lists in scan order
    let mut picked: Vec<Vec<Edge>> = Vec::with_capacity(top + 1);
    let mut covered = vec![false; n];
    for i in 0..=top {
        covered.iter_mut().for_each(|c| *c = false);
        let mut m = Vec::new();
        for &(_, e, l) in &keyed {
            if l < i {
                continue;
            }
            operations += 1;
            let (a, b) = (e.lo() as usize, e.hi() as usize);
            if !covered[a] && !covered[b] {
                covered[a] = true;
                covered[b] = true;
                m.push(e);
            }
        }
        picked.push(m);
    }

    covered.iter_mut().for_each(|c| *c = false);
    let mut matching = Matching::new();
    for level in picked.iter().rev() {
        for &e in level {
            operations += 1;
            let (a, b) = (e.lo() as usize, e.hi() as usize);
            if !covered[a] && !covered[b] {
                covered[a] = true;
                covered[b] = true;
                matching.insert_unchecked(e);
            }
        }
    }
    let level_matchings = picked.into_iter().map(|m| greedy_over(n, m)).collect();
    Ok(WeightedRun { matching, level_matchings, operations })
}
