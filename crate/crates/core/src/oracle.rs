//! Exact maximum and maximum-weight matching for small graphs, by branching
//! on the lowest available vertex and memoizing on the set of available
//! vertices.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex, WeightedGraph};
use crate::matching::Matching;

pub const DEFAULT_MAX_N: usize = 24;

pub fn max_matching(g: &Graph) -> Result<(usize, Matching)> {
    max_matching_limited(g, DEFAULT_MAX_N)
}

pub fn max_matching_limited(g: &Graph, max_n: usize) -> Result<(usize, Matching)> {
    let (value, m) = solve(g, max_n, |_| 1.0)?;
    Ok((value as usize, m))
}

pub fn max_weight_matching(g: &WeightedGraph) -> Result<(f64, Matching)> {
    max_weight_matching_limited(g, DEFAULT_MAX_N)
}

pub fn max_weight_matching_limited(g: &WeightedGraph, max_n: usize) -> Result<(f64, Matching)> {
    solve(&g.graph, max_n, |e| g.weight(e).expect("weighted graph covers every edge"))
}

struct Solver<'a, W: Fn(Edge) -> f64> {
    g: &'a Graph,
    weight: W,
    memo: HashMap<u32, f64>,
}

impl<W: Fn(Edge) -> f64> Solver<'_, W> {
    /// Lowest vertex in `mask` with a neighbour in `mask`.
    fn pivot(&self, mask: u32) -> Option<Vertex> {
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            if self.g.neighbors(v).iter().any(|&u| mask >> u & 1 == 1) {
                return Some(v);
            }
        }
        None
    }

    fn best(&mut self, mask: u32) -> f64 {
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let value = match self.pivot(mask) {
            None => 0.0,
            Some(v) => {
                let without = mask & !(1 << v);
                let mut best = self.best(without);
                for &u in self.g.neighbors(v) {
                    if mask >> u & 1 == 1 {
                        let w = (self.weight)(Edge::of(v, u));
                        best = best.max(w + self.best(without & !(1 << u)));
                    }
                }
                best
            }
        };
        self.memo.insert(mask, value);
        value
    }

    fn witness(&mut self, mut mask: u32) -> Matching {
        let mut m = Matching::new();
        while let Some(v) = self.pivot(mask) {
            let target = self.best(mask);
            let without = mask & !(1 << v);
            let pick = self.g.neighbors(v).iter().copied().find(|&u| {
                mask >> u & 1 == 1 && (self.weight)(Edge::of(v, u)) + self.best(without & !(1 << u)) == target
            });
            match pick {
                Some(u) if self.best(without) != target => {
                    m.insert_unchecked(Edge::of(v, u));
                    mask = without & !(1 << u);
                }
                _ => mask = without,
            }
        }
        m
    }
}

fn solve(g: &Graph, max_n: usize, weight: impl Fn(Edge) -> f64) -> Result<(f64, Matching)> {
    let limit = max_n.min(32);
    if g.n() > limit {
        return Err(Error::Guard(format!("oracle limited to n <= {limit}, got n = {}", g.n())));
    }
    let full = if g.n() == 32 { u32::MAX } else { (1u32 << g.n()) - 1 };
    let mut s = Solver { g, weight, memo: HashMap::new() };
    let value = s.best(full);
    let m = s.witness(full);
    Ok((value, m))
}
