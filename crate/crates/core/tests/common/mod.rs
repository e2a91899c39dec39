#![allow(dead_code)]

use lowsens::{Edge, EdgeWeights, Graph, Matching, Vertex, WeightedGraph};
use proptest::prelude::*;

/// Graph on `n` vertices with an independent coin per pair.
pub fn graph_from_bits(n: usize, bits: &[bool]) -> Graph {
    let mut edges = Vec::new();
    let mut k = 0;
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if bits[k] {
                edges.push((u, v));
            }
            k += 1;
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1usize..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(prop::bool::weighted(0.3), n * (n - 1) / 2).prop_map(move |b| graph_from_bits(n, &b))
    })
}

pub fn small_weighted(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    small_graph(max_n).prop_flat_map(|g| {
        proptest::collection::vec(1u32..=100, g.m()).prop_map(move |ws| {
            let w: EdgeWeights = g.edges().iter().zip(ws).map(|(&e, w)| (e, w as f64)).collect();
            WeightedGraph::new(g.clone(), w).unwrap()
        })
    })
}

/// Checks, from first principles, that `path` is an augmenting path for
/// `m` in `g` of exactly `len` edges.
pub fn check_augmenting(g: &Graph, m: &Matching, path: &[Vertex], len: usize) -> Result<(), String> {
    if path.len() != len + 1 {
        return Err(format!("{path:?} has {} edges, want {len}", path.len().saturating_sub(1)));
    }
    let mut seen = std::collections::HashSet::new();
    if !path.iter().all(|v| seen.insert(*v)) {
        return Err(format!("{path:?} repeats a vertex"));
    }
    let covered = |v: Vertex| m.iter().any(|e| e.touches(v));
    if covered(path[0]) || covered(path[len]) {
        return Err(format!("{path:?} has a covered endpoint"));
    }
    for i in 0..len {
        let e = Edge::new(path[i], path[i + 1]).ok_or("self loop")?;
        if !g.has_edge(e) {
            return Err(format!("{e} is not an edge"));
        }
        if m.contains(e) != (i % 2 == 1) {
            return Err(format!("{path:?} does not alternate at {e}"));
        }
    }
    Ok(())
}

/// Every matching of `g`, by enumerating edge subsets.
pub fn all_matchings(g: &Graph) -> Vec<Matching> {
    let edges = g.edges();
    assert!(edges.len() <= 16);
    (0u32..1 << edges.len())
        .filter_map(|mask| {
            let chosen: Vec<Edge> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
            Matching::from_edges(chosen).ok()
        })
        .collect()
}

/// All permutations of `items`.
pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}
