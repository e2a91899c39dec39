//! The phase/round augmentation driver: start from the tape's greedy maximal
//! matching, then for each path-length parameter `ell = 1..=k` run `r` rounds
//! of layered path search, flipping every path found.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::greedy::{greedy_matching, EdgeOrder};
use crate::layered::{apply_augmentations, greedy_calls, search_paths};
use crate::matching::Matching;
use crate::tape::{InvocationPath, Label, RandomTape};

/// Default cap on greedy calls per run.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxParams {
    /// Target accuracy, when the parameters were derived from one.
    pub eps: Option<f64>,
    pub k: usize,
    pub r: u64,
    pub delta: f64,
}

impl ApproxParams {
    /// Small parameters that run in well under a second at a few hundred
    /// vertices.
    pub const DESK: ApproxParams = ApproxParams { eps: None, k: 2, r: 8, delta: 0.05 };

    pub fn new(k: usize, r: u64, delta: f64) -> Result<ApproxParams> {
        let p = ApproxParams { eps: None, k, r, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.r < 1 {
            return Err(Error::arg(format!("need k >= 1 and r >= 1, got k = {}, r = {}", self.k, self.r)));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::arg(format!("delta must lie in (0, 1], got {}", self.delta)));
        }
        Ok(())
    }

    /// Greedy calls a run makes, initial matching included. Independent of
    /// the graph.
    pub fn total_calls(&self) -> u128 {
        (1..=self.k).fold(1u128, |acc, ell| {
            acc.saturating_add((self.r as u128).saturating_mul(greedy_calls(ell + 1, self.delta)))
        })
    }

    pub fn check_budget(&self, budget: u64) -> Result<()> {
        let needed = self.total_calls();
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, limit: budget });
        }
        Ok(())
    }
}

/// `k = ceil(1/eps + 1)`, `r = 4 k^2 (16k + 20)(k - 1)(2k)^k`,
/// `delta = 1 / (r (2k + 2))`. `r` saturates at `u64::MAX`.
pub fn params_from_eps(eps: f64) -> Result<ApproxParams> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::arg(format!("eps must lie in (0, 1], got {eps}")));
    }
    let k = (1.0 / eps + 1.0 - 1e-9).ceil() as u64;
    let pow = (0..k).try_fold(1u128, |acc, _| acc.checked_mul(2 * k as u128));
    let r = pow
        .and_then(|p| {
            let k = k as u128;
            (4 * k * k * (16 * k + 20) * (k - 1)).checked_mul(p)
        })
        .map_or(u64::MAX, |r| r.min(u64::MAX as u128) as u64);
    let delta = 1.0 / (r as f64 * (2 * k + 2) as f64);
    Ok(ApproxParams { eps: Some(eps), k: k as usize, r, delta })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub phase: usize,
    pub round: u64,
    pub paths: usize,
    pub size: usize,
    pub logical_calls: u128,
    pub executed_calls: u64,
}

#[derive(Clone, Debug, Default)]
pub struct ApproxTrace {
    pub initial_size: usize,
    pub rounds: Vec<RoundRecord>,
    /// Matching after each round; only filled when requested.
    pub matchings: Vec<Matching>,
}

pub fn approx_matching(g: &Graph, params: &ApproxParams, tape: &RandomTape, budget: u64) -> Result<Matching> {
    run(g, params, tape, budget, None)
}

/// Like [`approx_matching`], also recording per-round statistics and, if
/// `keep_matchings`, every intermediate matching.
pub fn approx_matching_traced(
    g: &Graph,
    params: &ApproxParams,
    tape: &RandomTape,
    budget: u64,
    keep_matchings: bool,
) -> Result<(Matching, ApproxTrace)> {
    let mut trace = ApproxTrace::default();
    let m = run(g, params, tape, budget, Some((&mut trace, keep_matchings)))?;
    Ok((m, trace))
}

fn run(
    g: &Graph,
    params: &ApproxParams,
    tape: &RandomTape,
    budget: u64,
    mut trace: Option<(&mut ApproxTrace, bool)>,
) -> Result<Matching> {
    params.validate()?;
    params.check_budget(budget)?;
    let root = InvocationPath::root();
    let order = EdgeOrder::from_tape(*tape, root.child(Label::Initial, 0));
    let mut m = greedy_matching(g, &order)?;
    if let Some((t, _)) = trace.as_mut() {
        t.initial_size = m.len();
    }
    for ell in 1..=params.k {
        let phase = root.child(Label::Phase, ell as u64);
        for round in 1..=params.r {
            let scope = phase.child(Label::Round, round);
            let found = search_paths(g, &m, ell, params.delta, tape, &scope)?;
            m = apply_augmentations(&m, &found.paths)?;
            if let Some((t, keep)) = trace.as_mut() {
                t.rounds.push(RoundRecord {
                    phase: ell,
                    round,
                    paths: found.paths.len(),
                    size: m.len(),
                    logical_calls: found.logical_calls,
                    executed_calls: found.executed_calls,
                });
                if *keep {
                    t.matchings.push(m.clone());
                }
            }
        }
    }
    Ok(m)
}
