//! Greedy descent on the purple count.
//!
//! Every applied swap strictly lowers the number of purple edges, so a run
//! applies at most as many swaps as there were purple edges at the start.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyzer::LabelledPair;
use crate::error::{Error, Result};
use crate::model::{is_packing, Labelling, PackingInstance, PurpleReport, PurpleState};
use crate::swap::{find_claim32_3swap_in, find_reducing_2swap_at, find_reducing_2swap_with, SwapCycle};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentPolicy {
    /// Only the global search for a reducing 2-swap.
    TwoSwapOnly,
    /// 2-swaps, then the targeted 2- and 3-swaps at a purple edge.
    #[default]
    Full,
}

impl std::str::FromStr for DescentPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-swap" | "two_swap_only" => Ok(DescentPolicy::TwoSwapOnly),
            "full" => Ok(DescentPolicy::Full),
            other => Err(Error::Domain(format!("unknown descent policy `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub policy: DescentPolicy,
    /// Stop after this many swaps even if more reducing moves exist.
    pub max_swaps: Option<usize>,
}

impl SolveOptions {
    pub fn with_policy(policy: DescentPolicy) -> Self {
        SolveOptions { policy, max_swaps: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Packed,
    NearPacked,
    Stuck,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Packed => "packed",
            SolveStatus::NearPacked => "near_packed",
            SolveStatus::Stuck => "stuck",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// A reducing 2-swap found by the global scan.
    Eaton,
    /// A 2-swap `(u, w)` at the chosen purple edge.
    LinkPair,
    /// A 3-swap `(u, a, b)` with `a ∈ A*(u)`, `b ∈ B(u)`.
    LinkTriple,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub cycle: SwapCycle,
    pub purple_after: usize,
    pub kind: MoveKind,
}

/// Structure at the purple edge where the descent stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StuckCertificate {
    pub purple_edge: (usize, usize),
    /// Every `w != v` has a red–blue- or blue–red-link from `u`.
    pub claim31_ok: bool,
    /// Every `a ∈ A*(u)`, `b ∈ B(u)` has a red–blue-link from `a` to `b`.
    pub claim32_ok: bool,
    pub a_star_size: usize,
    pub b_star_size: usize,
    pub a_size: usize,
    pub b_size: usize,
}

impl StuckCertificate {
    /// Evaluates the certificate at purple edge `(u, v)` from scratch.
    pub fn at(inst: &PackingInstance, lab: &Labelling, u: usize, v: usize) -> Self {
        let pair = LabelledPair::new(inst, lab);
        Self::from_pair(&pair, u, v)
    }

    pub(crate) fn from_pair(pair: &LabelledPair<'_>, u: usize, v: usize) -> Self {
        let n = pair.n();
        let claim31_ok = (0..n)
            .filter(|&w| w != v && w != u)
            .all(|w| pair.red_blue_link(u, w) || pair.blue_red_link(u, w));
        let p = pair.profile(u);
        let claim32_ok = p.a_star.iter().all(|a| p.b_set.iter().all(|b| pair.red_blue_link(a, b)));
        StuckCertificate {
            purple_edge: (u, v),
            claim31_ok,
            claim32_ok,
            a_star_size: p.a_star.len(),
            b_star_size: p.b_star.len(),
            a_size: p.a_set.len(),
            b_size: p.b_set.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub initial_labelling: Labelling,
    pub final_labelling: Labelling,
    pub purple_initial: usize,
    pub purple_final: PurpleReport,
    pub swap_trace: Vec<TraceStep>,
    pub stuck_certificate: Option<StuckCertificate>,
    /// The run ended on the swap limit rather than on the absence of moves.
    pub truncated: bool,
}

impl SolveOutcome {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} purple edge(s) after {} swap(s), max purple degree {}",
            self.status.as_str(),
            self.purple_final.count,
            self.swap_trace.len(),
            self.purple_final.max_purple_degree
        );
        if self.status != SolveStatus::Packed {
            s.push_str("; the descent found no further reducing swap, which does not show the pair is unpackable");
        }
        s
    }

    /// Replays the trace from the initial labelling, checking that each step
    /// strictly lowers the purple count and ends at the final labelling.
    pub fn replay_ok(&self, inst: &PackingInstance) -> bool {
        let mut lab = self.initial_labelling.clone();
        let mut state = PurpleState::new(inst, &lab);
        if state.count() != self.purple_initial {
            return false;
        }
        for step in &self.swap_trace {
            let before = state.count();
            state.apply(inst, &mut lab, &step.cycle);
            if state.count() >= before || state.count() != step.purple_after {
                return false;
            }
        }
        lab == self.final_labelling && state.report() == self.purple_final
    }
}

fn next_move(
    inst: &PackingInstance,
    lab: &Labelling,
    state: &PurpleState,
    policy: DescentPolicy,
) -> Result<Option<(SwapCycle, MoveKind)>> {
    if state.max_degree() >= 2 || policy == DescentPolicy::TwoSwapOnly {
        if let Some(c) = find_reducing_2swap_with(inst, lab, state) {
            return Ok(Some((c, MoveKind::Eaton)));
        }
    }
    if policy == DescentPolicy::TwoSwapOnly {
        return Ok(None);
    }
    let edges: Vec<(usize, usize)> = state.edges().collect();
    let mut pair: Option<LabelledPair<'_>> = None;
    for (u, v) in edges {
        for x in [u, v] {
            if let Some(c) = find_reducing_2swap_at(inst, lab, x) {
                return Ok(Some((c, MoveKind::LinkPair)));
            }
        }
        let pair = pair.get_or_insert_with(|| LabelledPair::new(inst, lab));
        for x in [u, v] {
            if let Some(c) = find_claim32_3swap_in(pair, inst, lab, x)? {
                return Ok(Some((c, MoveKind::LinkTriple)));
            }
        }
    }
    Ok(None)
}

/// Descends from `init` until no reducing move is left.
pub fn solve(inst: &PackingInstance, init: &Labelling, opts: &SolveOptions) -> Result<SolveOutcome> {
    if init.n() != inst.n() {
        return Err(Error::SizeMismatch(init.n(), inst.n()));
    }
    let mut lab = init.clone();
    let mut state = PurpleState::new(inst, &lab);
    let purple_initial = state.count();
    let mut trace = Vec::new();
    let mut truncated = false;

    while state.count() > 0 {
        if opts.max_swaps.is_some_and(|m| trace.len() >= m) {
            truncated = true;
            break;
        }
        let Some((cycle, kind)) = next_move(inst, &lab, &state, opts.policy)? else {
            break;
        };
        let before = state.count();
        state.apply(inst, &mut lab, &cycle);
        debug_assert!(state.count() < before);
        trace.push(TraceStep { cycle, purple_after: state.count(), kind });
    }

    let purple_final = state.report();
    let status = if purple_final.count == 0 {
        assert!(is_packing(inst, &lab), "zero purple count must be a packing");
        SolveStatus::Packed
    } else if purple_final.max_purple_degree <= 1 {
        SolveStatus::NearPacked
    } else {
        SolveStatus::Stuck
    };
    let stuck_certificate = match (status, opts.policy, state.lowest_edge()) {
        (SolveStatus::Packed, _, _) | (_, DescentPolicy::TwoSwapOnly, _) => None,
        (_, DescentPolicy::Full, Some((u, v))) if !truncated => Some(StuckCertificate::at(inst, &lab, u, v)),
        _ => None,
    };
    Ok(SolveOutcome {
        status,
        initial_labelling: init.clone(),
        final_labelling: lab,
        purple_initial,
        purple_final,
        swap_trace: trace,
        stuck_certificate,
        truncated,
    })
}

/// The starting labelling of restart `r` for a given seed.
pub fn restart_labelling(n: usize, seed: u64, r: u64) -> Labelling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r);
    Labelling::random(n, &mut rng)
}

/// Runs `restarts` seeded descents in parallel and keeps the best by
/// (status, purple count, restart index).
pub fn solve_multistart(inst: &PackingInstance, restarts: usize, seed: u64, opts: &SolveOptions) -> Result<SolveOutcome> {
    if restarts == 0 {
        return Err(Error::Domain("restarts must be at least 1".into()));
    }
    let outcomes: Vec<SolveOutcome> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| solve(inst, &restart_labelling(inst.n(), seed, r), opts))
        .collect::<Result<_>>()?;
    let best = outcomes
        .into_iter()
        .enumerate()
        .min_by_key(|(i, o)| (o.status, o.purple_final.count, *i))
        .map(|(_, o)| o)
        .expect("at least one restart");
    Ok(best)
}
