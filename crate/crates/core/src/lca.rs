//! Deterministic maximal matching for bounded-degree graphs, computable
//! both globally and one edge at a time through a neighbour-probe oracle.
//!
//! 1. Split the edges into `delta` oriented forests: `u -> v` lands in forest
//!    `i` when `u < v` and `v` is the `i`-th neighbour of `u` (1-based,
//!    ascending id).
//! 2. Colour every forest with at most 6 colours by Cole–Vishkin reduction,
//!    starting from the vertex ids. A vertex's forest colour is the tuple
//!    entry for that forest.
//! 3. Scan edges by (colour tuple of the lower-coloured endpoint, ids) and
//!    keep every edge whose endpoints are still free.
//!
//! The number of reduction rounds depends only on `n`, so the colour of a
//! vertex depends only on its next few ancestors in each forest. The local
//! query exploits that and evaluates step 3 recursively.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::greedy::greedy_over;
use crate::matching::Matching;

pub type Color = u8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestDecomposition {
    n: usize,
    /// `parent[i][u]` is the parent of `u` in forest `i + 1`.
    parent: Vec<Vec<Option<Vertex>>>,
}

impl ForestDecomposition {
    pub fn delta(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, forest: usize, u: Vertex) -> Option<Vertex> {
        self.parent[forest - 1][u as usize]
    }

    /// Oriented edges `(child, parent)` of forest `forest` (1-based).
    pub fn edges(&self, forest: usize) -> Vec<(Vertex, Vertex)> {
        self.parent[forest - 1]
            .iter()
            .enumerate()
            .filter_map(|(u, p)| p.map(|p| (u as Vertex, p)))
            .collect()
    }
}

pub fn form_forests(g: &Graph, delta: usize) -> Result<ForestDecomposition> {
    if let Some(v) = g.vertices().find(|&v| g.degree(v) > delta) {
        return Err(Error::arg(format!("vertex {v} has degree {} > delta = {delta}", g.degree(v))));
    }
    let mut parent = vec![vec![None; g.n()]; delta];
    for u in g.vertices() {
        for (i, &v) in g.neighbors(u).iter().enumerate() {
            if u < v {
                parent[i][u as usize] = Some(v);
            }
        }
    }
    Ok(ForestDecomposition { n: g.n(), parent })
}

/// Reduction rounds for `n` starting colours. Depends on `n` only.
pub fn coloring_rounds(n: usize) -> usize {
    let mut bound = n.max(2) as u64;
    let mut rounds = 0;
    while bound > 6 {
        bound = 2 * u64::from(64 - (bound - 1).leading_zeros());
        rounds += 1;
    }
    rounds
}

/// One reduction step. A root behaves as if its parent differed from it in
/// bit 0, which keeps it distinct from every child.
fn reduce(own: u64, parent: Option<u64>) -> u64 {
    match parent {
        Some(p) => {
            let a = (own ^ p).trailing_zeros() as u64;
            2 * a + (own >> a & 1)
        }
        None => own & 1,
    }
}

/// Per-vertex colour tuples, one entry per forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<Vec<Color>>,
}

impl Coloring {
    pub fn new(colors: Vec<Vec<Color>>) -> Coloring {
        Coloring { colors }
    }

    pub fn of(&self, v: Vertex) -> &[Color] {
        &self.colors[v as usize]
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        g.edges().iter().all(|e| self.of(e.lo()) != self.of(e.hi()))
    }

    /// Distinct colours used in forest `forest` (1-based).
    pub fn palette(&self, forest: usize) -> BTreeSet<Color> {
        self.colors.iter().map(|c| c[forest - 1]).collect()
    }
}

pub fn color_forests(f: &ForestDecomposition) -> Coloring {
    let rounds = coloring_rounds(f.n);
    let mut colors = vec![Vec::with_capacity(f.delta()); f.n];
    for parents in &f.parent {
        let mut phi: Vec<u64> = (0..f.n as u64).collect();
        for _ in 0..rounds {
            phi = (0..f.n).map(|u| reduce(phi[u], parents[u].map(|p| phi[p as usize]))).collect();
        }
        for (u, c) in phi.into_iter().enumerate() {
            colors[u].push(c as Color);
        }
    }
    Coloring { colors }
}

/// Sort key of an edge: colour tuple of its lower-coloured endpoint, then ids.
fn edge_key<'a>(e: Edge, color: impl Fn(Vertex) -> &'a [Color]) -> (&'a [Color], Vertex, Vertex) {
    let (a, b) = (color(e.lo()), color(e.hi()));
    (a.min(b), e.lo(), e.hi())
}

pub fn coloring_to_mm(g: &Graph, coloring: &Coloring) -> Result<Matching> {
    if let Some(e) = g.edges().iter().find(|e| coloring.of(e.lo()) == coloring.of(e.hi())) {
        return Err(Error::arg(format!("coloring is not proper at edge {e}")));
    }
    let mut edges = g.edges().to_vec();
    edges.sort_by(|&x, &y| edge_key(x, |v| coloring.of(v)).cmp(&edge_key(y, |v| coloring.of(v))));
    Ok(greedy_over(g.n(), edges))
}

/// The matching for `g`, using `max(1, max degree)` forests.
pub fn deterministic_mm(g: &Graph) -> Result<Matching> {
    deterministic_mm_with(g, g.max_degree().max(1))
}

/// The matching with a fixed forest count. Two graphs compared under a
/// perturbation must use the same `delta`.
pub fn deterministic_mm_with(g: &Graph, delta: usize) -> Result<Matching> {
    coloring_to_mm(g, &color_forests(&form_forests(g, delta)?))
}

/// Neighbour-probe access to a graph: `probe(v, i)` returns the `i`-th
/// neighbour of `v` (1-based) or `None`.
pub struct ProbeOracle<'a> {
    g: &'a Graph,
    probes: u64,
    probed: BTreeSet<Vertex>,
}

impl<'a> ProbeOracle<'a> {
    pub fn new(g: &'a Graph) -> ProbeOracle<'a> {
        ProbeOracle { g, probes: 0, probed: BTreeSet::new() }
    }

    pub fn probe(&mut self, v: Vertex, i: usize) -> Option<Vertex> {
        self.probes += 1;
        self.probed.insert(v);
        self.g.neighbor(v, i)
    }

    pub fn probes(&self) -> u64 {
        self.probes
    }

    /// Vertices probed so far.
    pub fn probed(&self) -> &BTreeSet<Vertex> {
        &self.probed
    }

    pub fn n(&self) -> usize {
        self.g.n()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QueryAnswer {
    pub in_matching: bool,
    pub probes: u64,
    /// Largest graph distance from the query edge to a probed vertex.
    pub radius: usize,
}

/// Per-query state: probe cache, colours and memoized answers.
struct LocalQuery<'o, 'g> {
    oracle: &'o mut ProbeOracle<'g>,
    delta: usize,
    rounds: usize,
    neighbors: HashMap<Vertex, Vec<Vertex>>,
    colors: HashMap<Vertex, Vec<Color>>,
    answers: HashMap<Edge, bool>,
}

impl LocalQuery<'_, '_> {
    fn probe(&mut self, v: Vertex, i: usize) -> Option<Vertex> {
        if let Some(list) = self.neighbors.get(&v) {
            return list.get(i - 1).copied();
        }
        self.oracle.probe(v, i)
    }

    fn neighbors(&mut self, v: Vertex) -> Vec<Vertex> {
        if let Some(list) = self.neighbors.get(&v) {
            return list.clone();
        }
        let mut list = Vec::new();
        for i in 1..=self.delta {
            match self.oracle.probe(v, i) {
                Some(u) => list.push(u),
                None => break,
            }
        }
        self.neighbors.insert(v, list.clone());
        list
    }

    fn forest_parent(&mut self, v: Vertex, forest: usize) -> Option<Vertex> {
        self.probe(v, forest).filter(|&p| p > v)
    }

    fn color(&mut self, v: Vertex) -> Vec<Color> {
        if let Some(c) = self.colors.get(&v) {
            return c.clone();
        }
        let mut tuple = Vec::with_capacity(self.delta);
        for forest in 1..=self.delta {
            // ancestors chain[0] = v, chain[j + 1] = parent(chain[j])
            let mut chain = vec![v];
            let mut is_root = Vec::new();
            while chain.len() <= self.rounds {
                let last = chain[chain.len() - 1];
                match self.forest_parent(last, forest) {
                    Some(p) => {
                        is_root.push(false);
                        chain.push(p);
                    }
                    None => {
                        is_root.push(true);
                        break;
                    }
                }
            }
            // a chain cut short of its root loses its last entry every round
            let complete = is_root.last() == Some(&true);
            let mut phi: Vec<u64> = chain.iter().map(|&x| x as u64).collect();
            for _ in 0..self.rounds {
                let live = if complete { phi.len() } else { phi.len() - 1 };
                phi = (0..live)
                    .map(|j| reduce(phi[j], if is_root[j] { None } else { Some(phi[j + 1]) }))
                    .collect();
            }
            tuple.push(phi[0] as Color);
        }
        self.colors.insert(v, tuple.clone());
        tuple
    }

    fn key(&mut self, e: Edge) -> (Vec<Color>, Vertex, Vertex) {
        let (a, b) = (self.color(e.lo()), self.color(e.hi()));
        (a.min(b), e.lo(), e.hi())
    }

    /// Neighbouring edges of `e` that precede it, ascending.
    fn earlier_neighbors(&mut self, e: Edge) -> Vec<Edge> {
        let own = self.key(e);
        let mut out = Vec::new();
        for x in e.endpoints() {
            for y in self.neighbors(x) {
                let f = Edge::of(x, y);
                if f != e {
                    let k = self.key(f);
                    if k.cmp(&own) == Ordering::Less {
                        out.push((k, f));
                    }
                }
            }
        }
        out.sort();
        out.into_iter().map(|(_, f)| f).collect()
    }

    /// `e` is matched iff no earlier neighbouring edge is. Explicit stack.
    fn in_matching(&mut self, e: Edge) -> bool {
        struct Frame {
            edge: Edge,
            earlier: Vec<Edge>,
            pos: usize,
        }
        let first = self.earlier_neighbors(e);
        let mut stack = vec![Frame { edge: e, earlier: first, pos: 0 }];
        while let Some(top) = stack.last_mut() {
            if top.pos == top.earlier.len() {
                self.answers.insert(top.edge, true);
                stack.pop();
                continue;
            }
            let f = top.earlier[top.pos];
            match self.answers.get(&f) {
                Some(true) => {
                    self.answers.insert(top.edge, false);
                    stack.pop();
                }
                Some(false) => top.pos += 1,
                None => {
                    let earlier = self.earlier_neighbors(f);
                    stack.push(Frame { edge: f, earlier, pos: 0 });
                }
            }
        }
        self.answers[&e]
    }
}

/// Whether `e` belongs to `deterministic_mm_with(G, delta)`, computed from
/// probes around `e` only. A fresh memo is used for every call.
pub fn mm_query(oracle: &mut ProbeOracle, e: Edge, delta: usize) -> Result<QueryAnswer> {
    if !oracle.g.has_edge(e) {
        return Err(Error::not_found(format!("edge {e}")));
    }
    let before = oracle.probes;
    let probed_before = std::mem::take(&mut oracle.probed);
    let in_matching = {
        let mut q = LocalQuery {
            delta,
            rounds: coloring_rounds(oracle.n()),
            oracle: &mut *oracle,
            neighbors: HashMap::new(),
            colors: HashMap::new(),
            answers: HashMap::new(),
        };
        q.in_matching(e)
    };
    let radius = radius_of(oracle.g, e, &oracle.probed);
    oracle.probed.extend(probed_before);
    Ok(QueryAnswer { in_matching, probes: oracle.probes - before, radius })
}

/// BFS distances from the endpoints of `e`, for vertices within `limit`.
pub fn distances_from(g: &Graph, e: Edge, limit: usize) -> HashMap<Vertex, usize> {
    let mut dist = HashMap::new();
    let mut queue = VecDeque::new();
    for v in e.endpoints() {
        dist.insert(v, 0);
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == limit {
            continue;
        }
        for &u in g.neighbors(v) {
            dist.entry(u).or_insert_with(|| {
                queue.push_back(u);
                d + 1
            });
        }
    }
    dist
}

fn radius_of(g: &Graph, e: Edge, probed: &BTreeSet<Vertex>) -> usize {
    let dist = distances_from(g, e, usize::MAX);
    probed.iter().map(|v| dist.get(v).copied().unwrap_or(usize::MAX)).max().unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub delta: usize,
    pub queries: usize,
    pub max_probes: u64,
    pub mean_probes: f64,
    pub max_radius: usize,
    pub per_query: Vec<(Edge, QueryAnswer)>,
}

/// Queries every edge of `g` and summarizes probe counts.
pub fn probe_report(g: &Graph, delta: usize) -> Result<ProbeReport> {
    let mut per_query = Vec::with_capacity(g.m());
    for &e in g.edges() {
        let mut oracle = ProbeOracle::new(g);
        per_query.push((e, mm_query(&mut oracle, e, delta)?));
    }
    let max_probes = per_query.iter().map(|(_, a)| a.probes).max().unwrap_or(0);
    let total: u64 = per_query.iter().map(|(_, a)| a.probes).sum();
    let mean_probes = if per_query.is_empty() { 0.0 } else { total as f64 / per_query.len() as f64 };
    let max_radius = per_query.iter().map(|(_, a)| a.radius).max().unwrap_or(0);
    Ok(ProbeReport { delta, queries: per_query.len(), max_probes, mean_probes, max_radius, per_query })
}
