//! Breadth-first state storage with predecessor links.

use std::time::Instant;

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use super::symmetry::Symmetry;
use super::{CheckError, CheckOptions, Stats};
use crate::echo::{fire, for_each_enabled, initial_state, Event, ProtocolState, Variant};
use crate::netconfig::Config;
use crate::trace::Trace;

/// Sentinel predecessor of the initial state.
const ROOT: u32 = u32::MAX;

/// Visited states, stored exactly (no fingerprints), indexed in discovery
/// order. With symmetry enabled only orbit representatives are stored.
pub(crate) struct StateStore<'c> {
    pub config: &'c Config,
    pub variant: Variant,
    symmetry: Option<Symmetry>,
    states: IndexSet<ProtocolState, FxBuildHasher>,
    pred: Vec<(u32, Event)>,
    depth: Vec<u32>,
    budget: Option<usize>,
    pub transitions: usize,
    started: Instant,
}

impl<'c> StateStore<'c> {
    pub fn new(config: &'c Config, variant: Variant, opts: &CheckOptions) -> Result<Self, CheckError> {
        let symmetry = if opts.symmetry {
            Symmetry::for_config(config)?
        } else {
            None
        };
        Ok(StateStore {
            config,
            variant,
            symmetry,
            states: IndexSet::with_hasher(FxBuildHasher),
            pred: Vec::new(),
            depth: Vec::new(),
            budget: opts.state_budget,
            transitions: 0,
            started: Instant::now(),
        })
    }

    pub fn initial(&self) -> Result<ProtocolState, CheckError> {
        Ok(self.normalize(&initial_state(self.config, self.variant)?))
    }

    pub fn normalize(&self, s: &ProtocolState) -> ProtocolState {
        match &self.symmetry {
            Some(sym) => sym.canonical(s),
            None => *s,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, idx: u32) -> &ProtocolState {
        &self.states[idx as usize]
    }

    pub fn depth(&self, idx: u32) -> u32 {
        self.depth[idx as usize]
    }

    pub fn stats(&self) -> Stats {
        Stats {
            states: self.states.len(),
            transitions: self.transitions,
            elapsed: self.started.elapsed(),
        }
    }

    /// Adds an already normalized state; returns its index and whether it
    /// was new.
    pub fn insert(&mut self, s: ProtocolState, from: Option<(u32, Event)>) -> Result<(u32, bool), CheckError> {
        let (idx, new) = self.states.insert_full(s);
        if new {
            debug_assert!(crate::echo::well_formed(self.config, &s));
            let (pred, depth) = match from {
                Some((p, e)) => ((p, e), self.depth[p as usize] + 1),
                None => ((ROOT, Event::explorer(0, 0)), 0),
            };
            self.pred.push(pred);
            self.depth.push(depth);
            if let Some(budget) = self.budget {
                if self.states.len() > budget {
                    return Err(CheckError::BudgetExceeded {
                        budget,
                        stats: self.stats(),
                    });
                }
            }
        }
        Ok((idx as u32, new))
    }

    /// Normalized successors of state `idx`, in event order.
    pub fn successors(&mut self, idx: u32) -> Vec<(Event, ProtocolState)> {
        let s = self.states[idx as usize];
        let mut out = Vec::with_capacity(s.pending());
        for_each_enabled(self.config, &s, |e| {
            out.push((e, fire(self.config, &s, &e)));
        });
        self.transitions += out.len();
        for (_, t) in out.iter_mut() {
            *t = self.normalize(t);
        }
        out
    }

    /// Stored states from the initial state to `idx`.
    pub fn path_to(&self, idx: u32) -> Vec<ProtocolState> {
        let mut path = vec![self.states[idx as usize]];
        let mut cur = idx;
        while self.pred[cur as usize].0 != ROOT {
            cur = self.pred[cur as usize].0;
            path.push(self.states[cur as usize]);
        }
        path.reverse();
        path
    }

    /// Turns a path of stored states into a concrete trace. With `cycle`,
    /// the stored states following the last path state around a loop that
    /// closes back to it (empty for a self loop).
    pub fn lift(&self, path: &[ProtocolState], cycle: Option<&[ProtocolState]>) -> Result<Trace, CheckError> {
        let mut current = initial_state(self.config, self.variant)?;
        let mut events = Vec::new();
        for target in &path[1..] {
            let (e, next) = self.step_towards(&current, target);
            events.push(e);
            current = next;
        }
        let Some(cycle) = cycle else {
            return Ok(Trace::replay(self.config, self.variant, &events, None)?);
        };
        let entry = *path.last().expect("nonempty path");
        let lap: Vec<ProtocolState> = cycle.iter().copied().chain(std::iter::once(entry)).collect();
        // lap boundaries visit members of one orbit; repeat laps until a
        // boundary state recurs
        let mut boundaries = vec![(current, events.len())];
        loop {
            for target in &lap {
                let (e, next) = self.step_towards(&current, target);
                events.push(e);
                current = next;
            }
            if let Some(&(_, at)) = boundaries.iter().find(|(s, _)| *s == current) {
                return Ok(Trace::replay(self.config, self.variant, &events, Some(at))?);
            }
            boundaries.push((current, events.len()));
        }
    }

    fn step_towards(&self, from: &ProtocolState, target: &ProtocolState) -> (Event, ProtocolState) {
        let mut found = None;
        for_each_enabled(self.config, from, |e| {
            if found.is_none() {
                let next = fire(self.config, from, &e);
                if self.normalize(&next) == *target {
                    found = Some((e, next));
                }
            }
        });
        found.expect("stored path is realizable from an isomorphic state")
    }
}
