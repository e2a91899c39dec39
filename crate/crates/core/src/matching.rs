use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeWeights, Graph, Vertex};

/// A set of pairwise vertex-disjoint edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    edges: BTreeSet<Edge>,
}

impl Matching {
    pub fn new() -> Matching {
        Matching::default()
    }

    /// Fails if two edges share an endpoint.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(edges: I) -> Result<Matching> {
        let mut m = Matching::new();
        let mut covered = BTreeSet::new();
        for e in edges {
            if !covered.insert(e.lo()) | !covered.insert(e.hi()) {
                return Err(Error::arg(format!("edge {e} shares a vertex with another edge")));
            }
            m.edges.insert(e);
        }
        Ok(m)
    }

    /// Inserts without checking disjointness; callers maintain the invariant.
    pub(crate) fn insert_unchecked(&mut self, e: Edge) {
        self.edges.insert(e);
    }

    pub(crate) fn remove(&mut self, e: Edge) -> bool {
        self.edges.remove(&e)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    /// `mates[v]` is the partner of `v`, for identities below `n`.
    pub fn mates(&self, n: usize) -> Vec<Option<Vertex>> {
        let mut mates = vec![None; n];
        for e in &self.edges {
            mates[e.lo() as usize] = Some(e.hi());
            mates[e.hi() as usize] = Some(e.lo());
        }
        mates
    }

    pub fn weight(&self, w: &EdgeWeights) -> Result<f64> {
        self.edges
            .iter()
            .map(|&e| w.get(e).ok_or_else(|| Error::arg(format!("edge {e} has no weight"))))
            .sum()
    }
}

impl FromIterator<Edge> for Matching {
    /// Panics if the edges are not disjoint.
    fn from_iter<T: IntoIterator<Item = Edge>>(iter: T) -> Self {
        Matching::from_edges(iter).expect("edges are not a matching")
    }
}

/// True iff every edge of `m` is in `g` and no two edges share a vertex.
pub fn is_matching(g: &Graph, m: &Matching) -> bool {
    let mut covered = vec![false; g.n()];
    for e in m.iter() {
        if !g.has_edge(e) {
            return false;
        }
        for x in e.endpoints() {
            if std::mem::replace(&mut covered[x as usize], true) {
                return false;
            }
        }
    }
    true
}

/// True iff `m` is a matching in `g` and no edge of `g` has both endpoints free.
pub fn is_maximal(g: &Graph, m: &Matching) -> bool {
    if !is_matching(g, m) {
        return false;
    }
    let mates = m.mates(g.n());
    g.edges()
        .iter()
        .all(|e| mates[e.lo() as usize].is_some() || mates[e.hi() as usize].is_some())
}

/// Size of the symmetric difference.
pub fn hamming(a: &Matching, b: &Matching) -> usize {
    a.edges.symmetric_difference(&b.edges).count()
}

/// Total weight of the symmetric difference. Every edge in it must be weighted.
pub fn weighted_hamming(a: &Matching, b: &Matching, w: &EdgeWeights) -> Result<f64> {
    a.edges
        .symmetric_difference(&b.edges)
        .try_fold(0.0, |acc, &e| Ok(acc + w.get(e).ok_or_else(|| Error::arg(format!("edge {e} has no weight")))?))
}
