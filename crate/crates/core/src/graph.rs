//! Undirected simple graphs over a fixed vertex-identity space.
//!
//! A [`Graph`] owns `n` vertex identities `0..n`. Deleting a vertex removes
//! its incident edges and marks it absent, but never renumbers anything, so
//! two graphs related by a perturbation can be compared identity by identity.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = u32;

/// An unordered vertex pair, stored with the smaller identity first.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[Vertex; 2]", try_from = "[Vertex; 2]")]
pub struct Edge {
    lo: Vertex,
    hi: Vertex,
}

impl Edge {
    /// Returns `None` for a self-loop.
    pub fn new(a: Vertex, b: Vertex) -> Option<Edge> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Edge { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Panics on a self-loop; for literals in tests and generators.
    pub fn of(a: Vertex, b: Vertex) -> Edge {
        Edge::new(a, b).expect("self-loop is not an edge")
    }

    pub fn lo(self) -> Vertex {
        self.lo
    }

    pub fn hi(self) -> Vertex {
        self.hi
    }

    pub fn endpoints(self) -> [Vertex; 2] {
        [self.lo, self.hi]
    }

    pub fn touches(self, v: Vertex) -> bool {
        self.lo == v || self.hi == v
    }

    pub fn shares_vertex(self, other: Edge) -> bool {
        other.touches(self.lo) || other.touches(self.hi)
    }

    /// The endpoint that is not `v`, if `v` is an endpoint.
    pub fn other(self, v: Vertex) -> Option<Vertex> {
        if v == self.lo {
            Some(self.hi)
        } else if v == self.hi {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl From<Edge> for [Vertex; 2] {
    fn from(e: Edge) -> Self {
        e.endpoints()
    }
}

impl TryFrom<[Vertex; 2]> for Edge {
    type Error = String;

    fn try_from(p: [Vertex; 2]) -> std::result::Result<Self, Self::Error> {
        Edge::new(p[0], p[1]).ok_or_else(|| format!("self-loop {}-{}", p[0], p[1]))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    present: Vec<bool>,
    edges: Vec<Edge>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        Graph {
            present: vec![true; n],
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph on identities `0..n`, rejecting out-of-range endpoints,
    /// self-loops and duplicate edges.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::arg(format!("edge {a}-{b} has an endpoint >= n = {n}")));
            }
            let e = Edge::new(a, b).ok_or_else(|| Error::arg(format!("self-loop at {a}")))?;
            list.push(e);
        }
        let mut sorted = list.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::arg(format!("duplicate edge {}", w[0])));
        }
        Ok(Graph::from_sorted_unique(vec![true; n], sorted))
    }

    fn from_sorted_unique(present: Vec<bool>, edges: Vec<Edge>) -> Graph {
        let mut adj = vec![Vec::new(); present.len()];
        for e in &edges {
            adj[e.lo as usize].push(e.hi);
            adj[e.hi as usize].push(e.lo);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { present, edges, adj }
    }

    /// Size of the identity space, including deleted vertices.
    pub fn n(&self) -> usize {
        self.present.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in ascending lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` in ascending identity order.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    /// The `i`-th neighbor of `v` (1-based) in ascending identity order.
    pub fn neighbor(&self, v: Vertex, i: usize) -> Option<Vertex> {
        i.checked_sub(1).and_then(|j| self.adj[v as usize].get(j).copied())
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.present.get(v as usize).copied().unwrap_or(false)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.n() as Vertex).filter(|&v| self.present[v as usize])
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        (e.hi as usize) < self.n() && self.adj[e.lo as usize].binary_search(&e.hi).is_ok()
    }

    pub fn incident_edges(&self, v: Vertex) -> impl Iterator<Item = Edge> + '_ {
        self.adj[v as usize].iter().map(move |&u| Edge::of(v, u))
    }

    /// Edges sharing an endpoint with `e`, excluding `e` itself.
    pub fn neighboring_edges(&self, e: Edge) -> impl Iterator<Item = Edge> + '_ {
        e.endpoints()
            .into_iter()
            .flat_map(move |x| self.incident_edges(x).filter(move |&f| f != e))
    }

    /// Subgraph induced by the vertices for which `keep` is true; all other
    /// identities are marked absent.
    pub fn induced(&self, keep: &[bool]) -> Graph {
        assert_eq!(keep.len(), self.n());
        let present: Vec<bool> = self.present.iter().zip(keep).map(|(&p, &k)| p && k).collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| present[e.lo as usize] && present[e.hi as usize])
            .collect();
        Graph::from_sorted_unique(present, edges)
    }

    pub fn apply(&self, p: Perturbation) -> Result<Graph> {
        match p {
            Perturbation::DeleteEdge(e) => {
                if !self.has_edge(e) {
                    return Err(Error::not_found(format!("edge {e}")));
                }
                let edges = self.edges.iter().copied().filter(|&f| f != e).collect();
                Ok(Graph::from_sorted_unique(self.present.clone(), edges))
            }
            Perturbation::DeleteVertex(v) => {
                if !self.contains_vertex(v) {
                    return Err(Error::not_found(format!("vertex {v}")));
                }
                let mut present = self.present.clone();
                present[v as usize] = false;
                let edges = self.edges.iter().copied().filter(|f| !f.touches(v)).collect();
                Ok(Graph::from_sorted_unique(present, edges))
            }
        }
    }

    /// Checks adjacency/edge-set consistency. Used by tests and generators.
    pub fn is_consistent(&self) -> bool {
        let sorted_edges = self.edges.windows(2).all(|w| w[0] < w[1]);
        let degrees: usize = self.adj.iter().map(Vec::len).sum();
        let sorted_adj = self.adj.iter().all(|l| l.windows(2).all(|w| w[0] < w[1]));
        let endpoints_ok = self.edges.iter().all(|e| {
            self.present[e.lo as usize]
                && self.present[e.hi as usize]
                && self.adj[e.lo as usize].binary_search(&e.hi).is_ok()
                && self.adj[e.hi as usize].binary_search(&e.lo).is_ok()
        });
        sorted_edges && sorted_adj && endpoints_ok && degrees == 2 * self.edges.len()
    }
}

/// A single-element deletion.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "target", rename_all = "snake_case")]
pub enum Perturbation {
    DeleteEdge(Edge),
    DeleteVertex(Vertex),
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Perturbation::DeleteEdge(e) => write!(f, "edge {e}"),
            Perturbation::DeleteVertex(v) => write!(f, "vertex {v}"),
        }
    }
}

/// Convenience wrapper over [`Graph::apply`].
pub fn apply_perturbation(g: &Graph, p: Perturbation) -> Result<Graph> {
    g.apply(p)
}

/// Positive edge weights keyed by edge.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EdgeWeights(BTreeMap<Edge, f64>);

impl EdgeWeights {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, e: Edge) -> Option<f64> {
        self.0.get(&e).copied()
    }

    pub fn insert(&mut self, e: Edge, w: f64) -> Option<f64> {
        self.0.insert(e, w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.0.iter().map(|(&e, &w)| (e, w))
    }

    pub fn max(&self) -> Option<f64> {
        self.0.values().copied().reduce(f64::max)
    }

    pub fn min(&self) -> Option<f64> {
        self.0.values().copied().reduce(f64::min)
    }
}

impl FromIterator<(Edge, f64)> for EdgeWeights {
    fn from_iter<T: IntoIterator<Item = (Edge, f64)>>(iter: T) -> Self {
        EdgeWeights(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    pub graph: Graph,
    pub weights: EdgeWeights,
}

impl WeightedGraph {
    /// Every edge of `graph` must carry exactly one positive, finite weight
    /// and no weight may name a non-edge.
    pub fn new(graph: Graph, weights: EdgeWeights) -> Result<WeightedGraph> {
        for &e in graph.edges() {
            match weights.get(e) {
                None => return Err(Error::arg(format!("edge {e} has no weight"))),
                Some(w) if !(w.is_finite() && w > 0.0) => {
                    return Err(Error::arg(format!("edge {e} has non-positive weight {w}")))
                }
                Some(_) => {}
            }
        }
        if weights.len() != graph.m() {
            return Err(Error::arg("weight given for a pair that is not an edge"));
        }
        Ok(WeightedGraph { graph, weights })
    }

    /// Every edge gets weight 1.
    pub fn unit(graph: Graph) -> WeightedGraph {
        let weights = graph.edges().iter().map(|&e| (e, 1.0)).collect();
        WeightedGraph { graph, weights }
    }

    pub fn weight(&self, e: Edge) -> Option<f64> {
        self.weights.get(e)
    }

    pub fn apply(&self, p: Perturbation) -> Result<WeightedGraph> {
        let graph = self.graph.apply(p)?;
        let weights = graph
            .edges()
            .iter()
            .map(|&e| (e, self.weights.get(e).expect("surviving edge keeps its weight")))
            .collect();
        Ok(WeightedGraph { graph, weights })
    }
}
