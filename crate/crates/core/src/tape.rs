//! Identity-keyed randomness.
//!
//! A [`RandomTape`] answers every random question as a pure function of its
//! 64-bit seed and a structural key: a draw kind, an [`InvocationPath`]
//! naming the call site, and the vertex identities the draw is about. No
//! draw depends on how many draws came before it or on which other edges
//! exist, so replaying one tape on `G` and on `G - e` gives a coupled pair of
//! executions.
//!
//! Key encoding (pinned; changing it changes every experiment):
//!
//! * `mix64` is the SplitMix64 finalizer.
//! * `absorb(h, w) = mix64((h ^ mix64(w + GOLDEN)) + GOLDEN)` with wrapping
//!   arithmetic and `GOLDEN = 0x9E3779B97F4A7C15`.
//! * A path digest starts at `PATH_ROOT` and absorbs `label code, index` for
//!   each frame, outermost first.
//! * A draw starts at `mix64(seed ^ GOLDEN)` and absorbs the draw kind, the
//!   path digest and the payload words in order. Unordered pairs are written
//!   smaller identity first.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, Vertex};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const PATH_ROOT: u64 = 0x6C6F_7773_656E_7321;

const KIND_EDGE_RANK: u64 = 1;
const KIND_FREE_SIDE: u64 = 2;
const KIND_MATCHED_SLOT: u64 = 3;
const KIND_PAIR_RANK: u64 = 4;
const KIND_TRIAL_SEED: u64 = 5;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(h: u64, w: u64) -> u64 {
    mix64((h ^ mix64(w.wrapping_add(GOLDEN))).wrapping_add(GOLDEN))
}

/// Names one kind of call site in an invocation path.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Algorithm,
    Initial,
    Phase,
    Round,
    Depth,
    Iteration,
    Step,
    Level,
}

impl Label {
    fn code(self) -> u64 {
        match self {
            Label::Algorithm => 1,
            Label::Initial => 2,
            Label::Phase => 3,
            Label::Round => 4,
            Label::Depth => 5,
            Label::Iteration => 6,
            Label::Step => 7,
            Label::Level => 8,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub label: Label,
    pub index: u64,
}

/// The call-site coordinates of a draw, e.g. `[Phase 2, Round 5, Depth 1,
/// Iteration 17, Step 1]`. Two runs with identical parameters build identical
/// paths whatever graph they run on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvocationPath {
    frames: Vec<Frame>,
    digest: u64,
}

impl InvocationPath {
    pub fn root() -> InvocationPath {
        InvocationPath { frames: Vec::new(), digest: PATH_ROOT }
    }

    pub fn child(&self, label: Label, index: u64) -> InvocationPath {
        let mut frames = Vec::with_capacity(self.frames.len() + 1);
        frames.extend_from_slice(&self.frames);
        frames.push(Frame { label, index });
        InvocationPath { frames, digest: absorb(absorb(self.digest, label.code()), index) }
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn digest(&self) -> u64 {
        self.digest
    }
}

impl Default for InvocationPath {
    fn default() -> Self {
        Self::root()
    }
}

impl fmt::Display for InvocationPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, fr) in self.frames.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?} {}", fr.label, fr.index)?;
        }
        write!(f, "]")
    }
}

/// Where the active copy of a matched edge sits in the layered graph: the
/// ordered pair `(upper, lower)` in middle layer `layer` (1-based).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub upper: Vertex,
    pub lower: Vertex,
    pub layer: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomTape {
    seed: u64,
}

#[inline]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `[0, bound)` by multiply-high.
#[inline]
fn below(x: u64, bound: u64) -> u64 {
    ((x as u128 * bound as u128) >> 64) as u64
}

impl RandomTape {
    pub fn new(seed: u64) -> RandomTape {
        RandomTape { seed }
    }

    /// The tape used for trial `trial` of an experiment seeded with `base`.
    pub fn for_trial(base: u64, trial: u64) -> RandomTape {
        RandomTape::new(RandomTape::new(base).draw(KIND_TRIAL_SEED, &InvocationPath::root(), &[trial]))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    fn draw(&self, kind: u64, scope: &InvocationPath, payload: &[u64]) -> u64 {
        let mut h = absorb(absorb(mix64(self.seed ^ GOLDEN), kind), scope.digest);
        for &w in payload {
            h = absorb(h, w);
        }
        h
    }

    /// Raw 64-bit rank of an edge; sort by `(edge_key, edge)` to get the
    /// induced permutation of any edge subset.
    #[inline]
    pub fn edge_key(&self, e: Edge, scope: &InvocationPath) -> u64 {
        self.draw(KIND_EDGE_RANK, scope, &[e.lo() as u64, e.hi() as u64])
    }

    /// Rank of an edge as a real in `[0, 1)`.
    pub fn edge_rank(&self, e: Edge, scope: &InvocationPath) -> f64 {
        to_unit(self.edge_key(e, scope))
    }

    /// Rank of an unordered pair of opaque 64-bit identities (layered-graph
    /// vertices, for instance).
    #[inline]
    pub fn pair_key(&self, a: u64, b: u64, scope: &InvocationPath) -> u64 {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        self.draw(KIND_PAIR_RANK, scope, &[x, y])
    }

    /// The boundary layer (`0` or `ell + 1`) holding the active copy of `v`.
    pub fn free_vertex_side(&self, v: Vertex, ell: usize, scope: &InvocationPath) -> usize {
        if self.draw(KIND_FREE_SIDE, scope, &[v as u64]) >> 63 == 0 {
            0
        } else {
            ell + 1
        }
    }

    /// Orientation and middle layer of the active copy of matched edge `e`,
    /// uniform over the `2 * ell` outcomes.
    pub fn matched_edge_slot(&self, e: Edge, ell: usize, scope: &InvocationPath) -> Slot {
        assert!(ell >= 1, "layered graph needs ell >= 1");
        let x = self.draw(KIND_MATCHED_SLOT, scope, &[e.lo() as u64, e.hi() as u64]);
        let cell = below(x, 2 * ell as u64);
        let (upper, lower) = if cell.is_multiple_of(2) { (e.lo(), e.hi()) } else { (e.hi(), e.lo()) };
        Slot { upper, lower, layer: (cell / 2) as usize + 1 }
    }
}
