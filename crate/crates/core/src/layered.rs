//! Layered-graph search for short augmenting paths.
//!
//! For a matching `M` and a length parameter `ell`, the layered graph has
//! layers `0..=ell+1`. Each free vertex is active in exactly one of the two
//! boundary layers, and each matched edge has exactly one active oriented
//! copy `(upper, lower)` in one of the middle layers `1..=ell`. Edges only
//! join active vertices in adjacent layers:
//!
//! * top `s` (layer `ell+1`) to `(u, v)` (layer `ell`) iff `s ~ u`;
//! * `(u, v)` (layer `j+1`) to `(u', v')` (layer `j`) iff `v ~ u'`;
//! * `(u, v)` (layer 1) to bottom `t` (layer 0) iff `v ~ t`.
//!
//! A path from the top layer to layer 0 decodes to the alternating path
//! `s, u_ell, v_ell, ..., u_1, v_1, t` of length `2 ell + 1` in `G`.
//!
//! [`find_paths`] grows vertex-disjoint such paths layer by layer with
//! randomized greedy bipartite matchings. Its loop counts depend only on
//! `(ell, delta)`, never on the graph, so coupled runs issue the same
//! sequence of greedy calls.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::matching::{is_matching, Matching};
use crate::tape::{mix64, InvocationPath, Label, RandomTape, Slot};

pub type NodeId = usize;

/// An active layered-graph vertex, named by its layer and its identity in `G`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HNode {
    Boundary { layer: usize, v: Vertex },
    Middle { layer: usize, upper: Vertex, lower: Vertex },
}

impl HNode {
    pub fn layer(&self) -> usize {
        match *self {
            HNode::Boundary { layer, .. } | HNode::Middle { layer, .. } => layer,
        }
    }

    /// The `G` vertex an edge from the layer above attaches to.
    fn entry(&self) -> Vertex {
        match *self {
            HNode::Boundary { v, .. } => v,
            HNode::Middle { upper, .. } => upper,
        }
    }

    /// The `G` vertex an edge to the layer below leaves from.
    fn exit(&self) -> Vertex {
        match *self {
            HNode::Boundary { v, .. } => v,
            HNode::Middle { lower, .. } => lower,
        }
    }

    /// Structural 64-bit identity used to key tape draws.
    fn key(&self) -> u64 {
        let (layer, a, b) = match *self {
            HNode::Boundary { layer, v } => (layer, v, u32::MAX),
            HNode::Middle { layer, upper, lower } => (layer, upper, lower),
        };
        mix64(mix64(layer as u64 + 1) ^ ((a as u64) << 32 | b as u64))
    }
}

/// Where each free vertex and each matched edge is activated.
pub trait Activation {
    fn free_side(&self, v: Vertex) -> usize;
    fn matched_slot(&self, e: Edge) -> Slot;
}

/// Activation drawn from a tape under a fixed scope.
pub struct TapeActivation<'a> {
    pub tape: &'a RandomTape,
    pub ell: usize,
    pub scope: &'a InvocationPath,
}

impl Activation for TapeActivation<'_> {
    fn free_side(&self, v: Vertex) -> usize {
        self.tape.free_vertex_side(v, self.ell, self.scope)
    }

    fn matched_slot(&self, e: Edge) -> Slot {
        self.tape.matched_edge_slot(e, self.ell, self.scope)
    }
}

/// Explicit activation, for forcing a particular layered graph.
#[derive(Clone, Debug, Default)]
pub struct FixedActivation {
    pub sides: HashMap<Vertex, usize>,
    pub slots: HashMap<Edge, Slot>,
}

impl Activation for FixedActivation {
    fn free_side(&self, v: Vertex) -> usize {
        self.sides[&v]
    }

    fn matched_slot(&self, e: Edge) -> Slot {
        self.slots[&e]
    }
}

#[derive(Clone, Debug)]
pub struct LayeredGraph {
    ell: usize,
    nodes: Vec<HNode>,
    layers: Vec<Vec<NodeId>>,
    down: Vec<Vec<NodeId>>,
}

pub fn build_layered(g: &Graph, m: &Matching, ell: usize, tape: &RandomTape, scope: &InvocationPath) -> Result<LayeredGraph> {
    LayeredGraph::build(g, m, ell, &TapeActivation { tape, ell, scope })
}

impl LayeredGraph {
    pub fn build(g: &Graph, m: &Matching, ell: usize, act: &dyn Activation) -> Result<LayeredGraph> {
        if ell == 0 {
            return Err(Error::arg("layered graph needs ell >= 1"));
        }
        if !is_matching(g, m) {
            return Err(Error::arg("M is not a matching in G"));
        }
        let mates = m.mates(g.n());
        let mut nodes = Vec::new();
        for v in g.vertices() {
            if mates[v as usize].is_none() {
                let layer = act.free_side(v);
                debug_assert!(layer == 0 || layer == ell + 1);
                nodes.push(HNode::Boundary { layer, v });
            }
        }
        for e in m.iter() {
            let Slot { upper, lower, layer } = act.matched_slot(e);
            debug_assert!((1..=ell).contains(&layer) && Edge::of(upper, lower) == e);
            nodes.push(HNode::Middle { layer, upper, lower });
        }
        nodes.sort_unstable();

        let mut layers = vec![Vec::new(); ell + 2];
        let mut entry_of: HashMap<Vertex, NodeId> = HashMap::with_capacity(nodes.len());
        for (id, node) in nodes.iter().enumerate() {
            layers[node.layer()].push(id);
            entry_of.insert(node.entry(), id);
        }
        let mut down = vec![Vec::new(); nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            let layer = node.layer();
            if layer == 0 {
                continue;
            }
            for &x in g.neighbors(node.exit()) {
                if let Some(&target) = entry_of.get(&x) {
                    if nodes[target].layer() == layer - 1 {
                        down[id].push(target);
                    }
                }
            }
            down[id].sort_unstable();
        }
        Ok(LayeredGraph { ell, nodes, layers, down })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn node(&self, id: NodeId) -> HNode {
        self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Active vertices of `layer`.
    pub fn active(&self, layer: usize) -> &[NodeId] {
        &self.layers[layer]
    }

    /// All active vertices, by identity.
    pub fn active_set(&self) -> BTreeSet<HNode> {
        self.nodes.iter().copied().collect()
    }

    pub fn find(&self, node: HNode) -> Option<NodeId> {
        self.nodes.binary_search(&node).ok()
    }

    /// Neighbours of `id` one layer down.
    pub fn down(&self, id: NodeId) -> &[NodeId] {
        &self.down[id]
    }

    /// Every edge as (upper-layer node, lower-layer node).
    pub fn h_edges(&self) -> Vec<(HNode, HNode)> {
        self.down
            .iter()
            .enumerate()
            .flat_map(|(a, ds)| ds.iter().map(move |&b| (a, b)))
            .map(|(a, b)| (self.nodes[a], self.nodes[b]))
            .collect()
    }

    /// Text dump: one `node` line per active vertex, one `edge` line per
    /// layered edge.
    pub fn dump(&self) -> String {
        let mut out = format!("# layered graph, ell = {}\n", self.ell);
        let name = |n: &HNode| match *n {
            HNode::Boundary { v, .. } => format!("{v}"),
            HNode::Middle { upper, lower, .. } => format!("({upper},{lower})"),
        };
        for n in &self.nodes {
            let _ = writeln!(out, "node {} {}", n.layer(), name(n));
        }
        for (a, b) in self.h_edges() {
            let _ = writeln!(out, "edge {} {} -> {} {}", a.layer(), name(&a), b.layer(), name(&b));
        }
        out
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Tag {
    Untagged,
    DeadEnd,
    /// Next vertex of a found path, one layer down.
    Next(NodeId),
    /// A layer-0 vertex already used as the end of a path.
    Endpoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagFunction(Vec<Tag>);

impl TagFunction {
    pub fn new(h: &LayeredGraph) -> TagFunction {
        TagFunction(vec![Tag::Untagged; h.node_count()])
    }

    pub fn get(&self, id: NodeId) -> Tag {
        self.0[id]
    }

    fn set(&mut self, id: NodeId, tag: Tag) {
        self.0[id] = tag;
    }

    fn untagged(&self, id: NodeId) -> bool {
        self.0[id] == Tag::Untagged
    }
}

/// `ceil(1 / delta)`, saturating.
pub fn loop_count(delta: f64) -> u128 {
    let x = (1.0 / delta - 1e-9).ceil();
    if x.is_finite() && x < 1e36 {
        (x as u128).max(1)
    } else {
        u128::MAX
    }
}

/// Number of greedy calls one `find_paths` at depth `i` issues, including
/// recursion. Depends only on `(i, delta)`.
pub fn greedy_calls(i: usize, delta: f64) -> u128 {
    if i <= 1 {
        return 1;
    }
    let sub = greedy_calls(i - 1, delta * delta);
    loop_count(delta).saturating_mul(sub.saturating_add(1)).saturating_add(1)
}

/// Mutable state of one path search.
pub struct PathFinder<'a> {
    h: &'a LayeredGraph,
    tape: &'a RandomTape,
    pub tags: TagFunction,
    /// Greedy calls the search stands for, skipped no-op calls included.
    pub logical_calls: u128,
    /// Greedy calls actually run on a non-empty candidate graph.
    pub executed_calls: u64,
}

impl<'a> PathFinder<'a> {
    pub fn new(h: &'a LayeredGraph, tape: &'a RandomTape) -> PathFinder<'a> {
        PathFinder { h, tape, tags: TagFunction::new(h), logical_calls: 0, executed_calls: 0 }
    }

    /// Randomized greedy on the bipartite graph between `s` (layer `i`) and
    /// the untagged active vertices of layer `i - 1`.
    fn greedy(&mut self, s: &[NodeId], scope: &InvocationPath) -> Vec<(NodeId, NodeId)> {
        self.logical_calls += 1;
        let mut candidates: Vec<(u64, NodeId, NodeId)> = Vec::new();
        for &a in s {
            let ka = self.h.nodes[a].key();
            for &b in &self.h.down[a] {
                if self.tags.untagged(b) {
                    candidates.push((self.tape.pair_key(ka, self.h.nodes[b].key(), scope), a, b));
                }
            }
        }
        if candidates.is_empty() {
            return Vec::new();
        }
        self.executed_calls += 1;
        candidates.sort_unstable_by_key(|&(r, a, b)| (r, self.h.nodes[a], self.h.nodes[b]));
        let mut used: BTreeSet<NodeId> = BTreeSet::new();
        let mut out = Vec::new();
        for (_, a, b) in candidates {
            if !used.contains(&a) && !used.contains(&b) {
                used.insert(a);
                used.insert(b);
                out.push((a, b));
            }
        }
        out
    }

    /// Tags every vertex of `s` (layer `i`) with the next vertex of a found
    /// `i`-path or with dead-end.
    pub fn find_paths(&mut self, s: &[NodeId], i: usize, delta: f64, scope: &InvocationPath) {
        debug_assert!(i >= 1 && delta > 0.0);
        let mut matched = self.greedy(s, &scope.child(Label::Step, 0));
        if i == 1 {
            for &(a, b) in &matched {
                self.tags.set(a, Tag::Next(b));
                self.tags.set(b, Tag::Endpoint);
            }
            for &a in s {
                if self.tags.untagged(a) {
                    self.tags.set(a, Tag::DeadEnd);
                }
            }
            return;
        }
        let iterations = loop_count(delta);
        let sub_calls = greedy_calls(i - 1, delta * delta);
        let mut it: u128 = 0;
        while it < iterations {
            if matched.is_empty() {
                // nothing left to extend: every remaining iteration is a no-op
                self.logical_calls = self
                    .logical_calls
                    .saturating_add((iterations - it).saturating_mul(sub_calls.saturating_add(1)));
                break;
            }
            let it_scope = scope.child(Label::Iteration, it as u64);
            let next_layer: Vec<NodeId> = matched.iter().map(|&(_, b)| b).collect();
            self.find_paths(&next_layer, i - 1, delta * delta, &it_scope.child(Label::Depth, (i - 1) as u64));
            for &(a, b) in &matched {
                if self.tags.get(b) != Tag::DeadEnd {
                    self.tags.set(a, Tag::Next(b));
                }
            }
            let open: Vec<NodeId> = s.iter().copied().filter(|&a| self.tags.untagged(a)).collect();
            matched = self.greedy(&open, &it_scope.child(Label::Step, 1));
            it += 1;
        }
        for &a in s {
            if self.tags.untagged(a) {
                self.tags.set(a, Tag::DeadEnd);
            }
        }
    }

    /// Follows tags from each tagged top-layer vertex down to layer 0.
    pub fn decode(&self) -> Vec<AugmentingPath> {
        let h = self.h;
        let mut paths = Vec::new();
        for &top in h.active(h.ell + 1) {
            let mut verts = vec![h.nodes[top].exit()];
            let mut cur = top;
            while let Tag::Next(next) = self.tags.get(cur) {
                match h.nodes[next] {
                    HNode::Middle { upper, lower, .. } => verts.extend([upper, lower]),
                    HNode::Boundary { v, .. } => verts.push(v),
                }
                cur = next;
            }
            if h.nodes[cur].layer() == 0 {
                paths.push(AugmentingPath(verts));
            } else {
                debug_assert!(cur == top, "pointer chain from {top} ended at layer {}", h.nodes[cur].layer());
            }
        }
        paths
    }
}

/// An alternating path given by its vertex sequence, starting and ending at
/// free vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AugmentingPath(pub Vec<Vertex>);

impl AugmentingPath {
    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.windows(2).map(|w| Edge::of(w[0], w[1]))
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() < 2
    }
}

/// Result of one augmenting-path search, with coupling instrumentation.
#[derive(Clone, Debug)]
pub struct PathSearch {
    pub paths: Vec<AugmentingPath>,
    pub logical_calls: u128,
    pub executed_calls: u64,
    pub active: BTreeSet<HNode>,
}

/// Builds the layered graph for `(G, M, ell)` from `tape` under `scope` and
/// searches it for vertex-disjoint augmenting paths of length `2 ell + 1`.
pub fn search_paths(g: &Graph, m: &Matching, ell: usize, delta: f64, tape: &RandomTape, scope: &InvocationPath) -> Result<PathSearch> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::arg(format!("delta must lie in (0, 1], got {delta}")));
    }
    let h = build_layered(g, m, ell, tape, scope)?;
    Ok(search_in(&h, delta, tape, scope))
}

/// Runs the search on an already built layered graph.
pub fn search_in(h: &LayeredGraph, delta: f64, tape: &RandomTape, scope: &InvocationPath) -> PathSearch {
    let mut finder = PathFinder::new(h, tape);
    let top: Vec<NodeId> = h.active(h.ell + 1).to_vec();
    finder.find_paths(&top, h.ell + 1, delta, &scope.child(Label::Depth, (h.ell + 1) as u64));
    PathSearch {
        paths: finder.decode(),
        logical_calls: finder.logical_calls,
        executed_calls: finder.executed_calls,
        active: h.active_set(),
    }
}

pub fn augmenting_paths(g: &Graph, m: &Matching, ell: usize, delta: f64, tape: &RandomTape, scope: &InvocationPath) -> Result<Vec<AugmentingPath>> {
    Ok(search_paths(g, m, ell, delta, tape, scope)?.paths)
}

/// `M` xor the edges of `paths`, after checking that the paths are
/// vertex-disjoint augmenting paths for `M`.
pub fn apply_augmentations(m: &Matching, paths: &[AugmentingPath]) -> Result<Matching> {
    let mut used = BTreeSet::new();
    let covered: BTreeSet<Vertex> = m.iter().flat_map(|e| e.endpoints()).collect();
    for p in paths {
        let vs = p.vertices();
        if vs.len() < 4 || vs.len() % 2 != 0 {
            return Err(Error::arg(format!("path {vs:?} does not have odd length >= 3")));
        }
        for &v in vs {
            if !used.insert(v) {
                return Err(Error::arg(format!("vertex {v} is used twice by the augmenting paths")));
            }
        }
        let (first, last) = (vs[0], vs[vs.len() - 1]);
        if covered.contains(&first) || covered.contains(&last) {
            return Err(Error::arg(format!("path {vs:?} does not end at free vertices")));
        }
        for (i, e) in p.edges().enumerate() {
            if m.contains(e) != (i % 2 == 1) {
                return Err(Error::arg(format!("path {vs:?} does not alternate at edge {e}")));
            }
        }
    }
    let mut out = m.clone();
    for p in paths {
        for (i, e) in p.edges().enumerate() {
            if i % 2 == 1 {
                out.remove(e);
            } else {
                out.insert_unchecked(e);
            }
        }
    }
    Ok(out)
}
