//! Low-sensitivity maximum matching: randomized greedy, layered augmenting
//! path search, a deterministic local algorithm for bounded degree, weight
//! bucketing, and tools to measure how much each output moves when the
//! input loses one edge or vertex.

pub mod approx;
pub mod error;
pub mod generate;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod layered;
pub mod lca;
pub mod matching;
pub mod online;
pub mod oracle;
pub mod registry;
pub mod sensitivity;
pub mod tape;
pub mod weighted;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeWeights, Graph, Perturbation, Vertex, WeightedGraph};
pub use matching::Matching;
pub use registry::{MatchingAlgorithm, Registry, RegistryConfig};
pub use tape::RandomTape;
