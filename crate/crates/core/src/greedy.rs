//! Greedy maximal matching under a fixed edge order, and the change-set
//! diagnostic that over-approximates what a single deletion can alter.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::matching::Matching;
use crate::tape::{InvocationPath, RandomTape};

/// A strict total order on edges: by rank, ties broken by the edge itself.
#[derive(Clone, Debug)]
pub enum EdgeOrder {
    Tape { tape: RandomTape, scope: InvocationPath },
    Explicit(HashMap<Edge, u64>),
}

impl EdgeOrder {
    pub fn from_tape(tape: RandomTape, scope: InvocationPath) -> EdgeOrder {
        EdgeOrder::Tape { tape, scope }
    }

    /// Earlier in `edges` means smaller rank.
    pub fn from_sequence<I: IntoIterator<Item = Edge>>(edges: I) -> EdgeOrder {
        EdgeOrder::Explicit(edges.into_iter().enumerate().map(|(i, e)| (e, i as u64)).collect())
    }

    pub fn rank(&self, e: Edge) -> Option<u64> {
        match self {
            EdgeOrder::Tape { tape, scope } => Some(tape.edge_key(e, scope)),
            EdgeOrder::Explicit(ranks) => ranks.get(&e).copied(),
        }
    }

    fn key(&self, e: Edge) -> Result<(u64, Edge)> {
        self.rank(e)
            .map(|r| (r, e))
            .ok_or_else(|| Error::arg(format!("edge order does not rank edge {e}")))
    }

    /// The edges of `g` in ascending order.
    pub fn sorted(&self, edges: &[Edge]) -> Result<Vec<Edge>> {
        let mut keyed = edges.iter().map(|&e| self.key(e)).collect::<Result<Vec<_>>>()?;
        keyed.sort_unstable();
        Ok(keyed.into_iter().map(|(_, e)| e).collect())
    }
}

/// Scans `order` and keeps every edge whose endpoints are both still free.
pub(crate) fn greedy_over(n: usize, order: impl IntoIterator<Item = Edge>) -> Matching {
    let mut covered = vec![false; n];
    let mut m = Matching::new();
    for e in order {
        let (a, b) = (e.lo() as usize, e.hi() as usize);
        if !covered[a] && !covered[b] {
            covered[a] = true;
            covered[b] = true;
            m.insert_unchecked(e);
        }
    }
    m
}

/// Greedy maximal matching of `g` in the order given by `order`.
pub fn greedy_matching(g: &Graph, order: &EdgeOrder) -> Result<Matching> {
    Ok(greedy_over(g.n(), order.sorted(g.edges())?))
}

/// Change set for deleting vertex `v`: edges that may change membership when
/// the greedy invariant is restored on `G - v`. Every edge in the symmetric
/// difference of the two greedy outputs belongs to it.
///
/// The recursion starts from the matched edge at `v` (empty if `v` is
/// unmatched). Edges incident to `v` other than that one never join, since
/// they do not exist in `G - v`.
pub fn change_set(g: &Graph, v: Vertex, order: &EdgeOrder) -> Result<BTreeSet<Edge>> {
    if !g.contains_vertex(v) {
        return Err(Error::not_found(format!("vertex {v}")));
    }
    let incident: Vec<Edge> = g.incident_edges(v).collect();
    for &e in &incident {
        order.key(e)?;
    }
    change_set_from(g, Seed::Vertex(v), &incident, order)
}

enum Seed {
    Vertex(Vertex),
    Edge(Edge),
}

/// Same recursion seeded with a deleted edge. Not covered by the vertex
/// analysis; validated empirically against coupled runs.
pub fn change_set_for_edge(g: &Graph, e: Edge, order: &EdgeOrder) -> Result<BTreeSet<Edge>> {
    if !g.has_edge(e) {
        return Err(Error::not_found(format!("edge {e}")));
    }
    change_set_from(g, Seed::Edge(e), &[e], order)
}

fn change_set_from(g: &Graph, seed: Seed, removed: &[Edge], order: &EdgeOrder) -> Result<BTreeSet<Edge>> {
    let sorted = order.sorted(g.edges())?;
    let position: HashMap<Edge, usize> = sorted.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let matched = greedy_over(g.n(), sorted.iter().copied());

    let mut set = BTreeSet::new();
    // the only deleted edge whose removal can matter is a matched one
    let first = match seed {
        Seed::Vertex(v) => match g.incident_edges(v).find(|&e| matched.contains(e)) {
            Some(e) => e,
            None => return Ok(set),
        },
        Seed::Edge(e) if matched.contains(e) => e,
        Seed::Edge(_) => return Ok(set),
    };
    let earlier = |f: Edge, h: Edge| position[&h] < position[&f];
    let removed: BTreeSet<Edge> = removed.iter().copied().collect();

    set.insert(first);
    let mut frontier = vec![first];
    while !frontier.is_empty() {
        let candidates: BTreeSet<Edge> = frontier
            .iter()
            .flat_map(|&s| g.neighboring_edges(s))
            .filter(|f| !removed.contains(f) && !set.contains(f))
            .collect();
        let mut next = Vec::new();
        for f in candidates {
            let joins = if matched.contains(f) {
                // a matched edge may leave once an earlier neighbour changed last round
                frontier.iter().any(|&s| s.shares_vertex(f) && earlier(f, s))
            } else {
                // an unmatched edge may enter once every earlier matched neighbour is in the set
                g.neighboring_edges(f)
                    .filter(|&h| earlier(f, h) && matched.contains(h))
                    .all(|h| set.contains(&h))
            };
            if joins {
                next.push(f);
            }
        }
        set.extend(next.iter().copied());
        frontier = next;
    }
    Ok(set)
}
