//! Explicit-state exploration and the two protocol properties.
//!
//! Correctness (`always (finish => spanning_tree)`) is an invariant and is
//! checked by breadth-first search, so the first violating state found comes
//! with a shortest witness. Termination under weak fairness of the whole
//! next-state relation is decided on the part of the state graph reachable
//! through non-finished states; see [`check_termination`].

mod liveness;
mod report;
mod store;
mod symmetry;
mod sweep;

use std::collections::VecDeque;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::echo::{finish, spanning_tree, Event, ModelError, ProtocolState, Variant};
use crate::netconfig::{Config, ConfigError};
use crate::trace::{Trace, TraceError};

pub use liveness::check_termination;
pub use report::{ConfigResultJson, ReportJson};
use store::StateStore;
pub use symmetry::Symmetry;
pub use sweep::{check_one, sweep, ConfigResult, SweepOutcome, SweepReport, SWEEP_LIMIT};

#[derive(Debug, Clone, Error)]
pub enum CheckError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("state budget of {budget} exhausted after {} states", .stats.states)]
    BudgetExceeded { budget: usize, stats: Stats },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Maximum number of stored states.
    pub state_budget: Option<usize>,
    /// Store one representative per orbit of the configuration's
    /// automorphism group.
    pub symmetry: bool,
    /// Do not expand states at this many steps from the initial state.
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub states: usize,
    pub transitions: usize,
    pub elapsed: Duration,
}

impl Stats {
    pub fn add(&mut self, other: &Stats) {
        self.states += other.states;
        self.transitions += other.transitions;
        self.elapsed += other.elapsed;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Correctness,
    Termination,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::Correctness => "correctness",
            Property::Termination => "termination",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "correctness" => Ok(Property::Correctness),
            "termination" => Ok(Property::Termination),
            other => Err(format!(
                "unknown property `{other}` (expected correctness or termination)"
            )),
        }
    }
}

/// Named state predicates usable as search targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Finish,
    FinishAndNotSpanningTree,
}

impl Target {
    pub fn holds(self, c: &Config, s: &ProtocolState) -> bool {
        match self {
            Target::Finish => finish(c, s),
            Target::FinishAndNotSpanningTree => finish(c, s) && !spanning_tree(c, s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Pass,
    Violation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationReason {
    InvariantViolation,
    Deadlock,
    NonProgressCycle,
}

impl ViolationReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationReason::InvariantViolation => "invariant_violation",
            ViolationReason::Deadlock => "deadlock",
            ViolationReason::NonProgressCycle => "non_progress_cycle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            ViolationReason::InvariantViolation,
            ViolationReason::Deadlock,
            ViolationReason::NonProgressCycle,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub outcome: Outcome,
    pub reason: Option<ViolationReason>,
    pub witness: Option<Trace>,
    pub stats: Stats,
}

impl Verdict {
    pub(crate) fn pass(stats: Stats) -> Self {
        Verdict {
            outcome: Outcome::Pass,
            reason: None,
            witness: None,
            stats,
        }
    }

    pub(crate) fn violation(reason: ViolationReason, witness: Trace, stats: Stats) -> Self {
        Verdict {
            outcome: Outcome::Violation,
            reason: Some(reason),
            witness: Some(witness),
            stats,
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub from: u32,
    pub event: Event,
    pub to: u32,
}

/// The reachable state graph of one configuration.
#[derive(Debug, Clone)]
pub struct StateGraph {
    /// States in breadth-first discovery order; index 0 is initial.
    pub states: Vec<ProtocolState>,
    pub transitions: Vec<Transition>,
    pub stats: Stats,
}

impl StateGraph {
    pub fn successors(&self) -> Vec<Vec<(Event, u32)>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            out[t.from as usize].push((t.event, t.to));
        }
        out
    }
}

/// Breadth-first exploration of every state reachable from the initial
/// state, with every labeled transition.
pub fn explore(c: &Config, variant: Variant, opts: &CheckOptions) -> Result<StateGraph, CheckError> {
    let mut store = StateStore::new(c, variant, opts)?;
    let init = store.initial()?;
    store.insert(init, None)?;
    let mut transitions = Vec::new();
    let mut next = 0u32;
    while (next as usize) < store.len() {
        let idx = next;
        next += 1;
        if opts.max_depth.is_some_and(|d| store.depth(idx) as usize >= d) {
            continue;
        }
        for (event, succ) in store.successors(idx) {
            let (to, _) = store.insert(succ, Some((idx, event)))?;
            transitions.push(Transition { from: idx, event, to });
        }
    }
    let stats = store.stats();
    let states = (0..store.len() as u32).map(|i| *store.state(i)).collect();
    Ok(StateGraph {
        states,
        transitions,
        stats,
    })
}

/// Breadth-first search for a target state, checked on discovery so that
/// the first hit has a shortest path and, among those, the
/// lexicographically first event sequence.
fn search(
    c: &Config,
    variant: Variant,
    target: Target,
    opts: &CheckOptions,
) -> Result<(Option<Trace>, Stats), CheckError> {
    let mut store = StateStore::new(c, variant, opts)?;
    let init = store.initial()?;
    let (root, _) = store.insert(init, None)?;
    if target.holds(c, &init) {
        let trace = store.lift(&store.path_to(root), None)?;
        return Ok((Some(trace), store.stats()));
    }
    let mut queue = VecDeque::from([root]);
    while let Some(idx) = queue.pop_front() {
        if opts.max_depth.is_some_and(|d| store.depth(idx) as usize >= d) {
            continue;
        }
        for (event, succ) in store.successors(idx) {
            let (to, new) = store.insert(succ, Some((idx, event)))?;
            if !new {
                continue;
            }
            if target.holds(c, &succ) {
                let trace = store.lift(&store.path_to(to), None)?;
                return Ok((Some(trace), store.stats()));
            }
            queue.push_back(to);
        }
    }
    Ok((None, store.stats()))
}

/// A minimum-length trace from the initial state to a `target` state, or
/// `None` when no such state is reachable (within `opts.max_depth` steps).
pub fn shortest_trace_to(
    c: &Config,
    variant: Variant,
    target: Target,
    opts: &CheckOptions,
) -> Result<Option<Trace>, CheckError> {
    search(c, variant, target, opts).map(|(trace, _)| trace)
}

/// Checks that every reachable state satisfies `finish => spanning_tree`.
pub fn check_correctness(c: &Config, variant: Variant, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let (found, stats) = search(c, variant, Target::FinishAndNotSpanningTree, opts)?;
    Ok(match found {
        Some(trace) => Verdict::violation(ViolationReason::InvariantViolation, trace, stats),
        None => Verdict::pass(stats),
    })
}

/// Runs the check for `property`.
pub fn check(c: &Config, variant: Variant, property: Property, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    match property {
        Property::Correctness => check_correctness(c, variant, opts),
        Property::Termination => check_termination(c, variant, opts),
    }
}
