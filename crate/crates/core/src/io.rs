//! Edge-list text format.
//!
//! ```text
//! # comment lines start with '#'
//! 4 3          <- header: vertex count, edge count
//! 0 1          <- one edge per line, 0-based identities
//! 1 2
//! 2 3
//! ```
//!
//! Weighted files carry a third column with a positive weight. Blank lines
//! are ignored. Every error names the 1-based line it was found on.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeWeights, Graph, Vertex, WeightedGraph};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses either format; `weights` is `Some` iff edge lines have three fields.
pub fn load_any(text: &str) -> Result<(Graph, Option<EdgeWeights>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header line \"n m\""))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(hline, format!("header must be \"n m\", got {header:?}")));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad vertex count {:?}", fields[0])))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad edge count {:?}", fields[1])))?;

    let mut arity = None;
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(m);
    let mut weights = EdgeWeights::new();
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(lineno, format!("expected \"u v\" or \"u v w\", got {line:?}")));
        }
        match arity {
            None => arity = Some(fields.len()),
            Some(a) if a != fields.len() => {
                return Err(parse_err(lineno, "mixed weighted and unweighted edge lines"));
            }
            Some(_) => {}
        }
        let id = |s: &str| -> Result<Vertex> {
            let v: Vertex = s.parse().map_err(|_| parse_err(lineno, format!("bad vertex id {s:?}")))?;
            if v as usize >= n {
                return Err(parse_err(lineno, format!("vertex id {v} out of range (n = {n})")));
            }
            Ok(v)
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let e = Edge::new(u, v).ok_or_else(|| parse_err(lineno, format!("self-loop at {u}")))?;
        if !seen.insert(e) {
            return Err(parse_err(lineno, format!("duplicate edge {e}")));
        }
        if let Some(ws) = fields.get(2) {
            let w: f64 = ws.parse().map_err(|_| parse_err(lineno, format!("bad weight {ws:?}")))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(parse_err(lineno, format!("weight must be positive, got {w}")));
            }
            weights.insert(e, w);
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(parse_err(last_line, format!("header declares {m} edges but {} were listed", edges.len())));
    }
    let graph = Graph::from_edges(n, edges).map_err(|e| parse_err(hline, e.to_string()))?;
    let weights = (arity == Some(3)).then_some(weights);
    Ok((graph, weights))
}

/// Parses an unweighted edge list.
pub fn load_graph(text: &str) -> Result<Graph> {
    match load_any(text)? {
        (g, None) => Ok(g),
        (_, Some(_)) => Err(parse_err(1, "expected an unweighted edge list, found weights")),
    }
}

/// Parses a weighted edge list ("u v w" lines).
pub fn load_weighted(text: &str) -> Result<WeightedGraph> {
    match load_any(text)? {
        (g, Some(w)) => WeightedGraph::new(g, w),
        (g, None) if g.m() == 0 => Ok(WeightedGraph::unit(g)),
        (_, None) => Err(parse_err(1, "expected a weighted edge list (\"u v w\" lines)")),
    }
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(out, "{} {}", e.lo(), e.hi());
    }
    out
}

pub fn write_weighted(g: &WeightedGraph) -> String {
    let mut out = format!("{} {}\n", g.graph.n(), g.graph.m());
    for &e in g.graph.edges() {
        let w = g.weight(e).expect("weighted graph covers every edge");
        let _ = writeln!(out, "{} {} {}", e.lo(), e.hi(), w);
    }
    out
}
