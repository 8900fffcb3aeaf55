//! Finite traces with either an implicit terminal stutter or an explicit
//! loop back to an earlier state.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::echo::{apply_event, initial_state, Event, ModelError, ProtocolState, Variant};
use crate::netconfig::Config;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("step {index}: {source}")]
    Step { index: usize, source: ModelError },
    #[error("state {index} differs from the replayed state")]
    StateMismatch { index: usize },
    #[error("{states} states need {expected} events, found {found}")]
    EventCount {
        states: usize,
        expected: usize,
        found: usize,
    },
    #[error("loop start {0} is outside the trace")]
    LoopStart(usize),
    #[error("the closing event does not return to the loop start")]
    LoopNotClosed,
    #[error("state index {index} outside 0..{len}")]
    Index { index: usize, len: usize },
}

/// A behaviour prefix. Without `loop_start` the last state repeats forever
/// by stuttering and there is one event per consecutive state pair. With
/// `loop_start = k` the final event leads from the last state back to state
/// `k`, so there are as many events as states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    config: Config,
    variant: Variant,
    states: Vec<ProtocolState>,
    events: Vec<Event>,
    loop_start: Option<usize>,
}

impl Trace {
    /// The one-state trace that stutters in the initial state.
    pub fn stutter(config: &Config, variant: Variant) -> Result<Self, TraceError> {
        Trace::replay(config, variant, &[], None)
    }

    /// Replays `events` from the initial state. With a loop start, the last
    /// event must close the loop.
    pub fn replay(
        config: &Config,
        variant: Variant,
        events: &[Event],
        loop_start: Option<usize>,
    ) -> Result<Self, TraceError> {
        let mut states = vec![initial_state(config, variant)?];
        for (index, e) in events.iter().enumerate() {
            let next = apply_event(config, &states[index], e)
                .map_err(|source| TraceError::Step { index, source })?;
            states.push(next);
        }
        if let Some(k) = loop_start {
            let closing = states.pop().expect("initial state present");
            if events.is_empty() || k >= states.len() {
                return Err(TraceError::LoopStart(k));
            }
            if closing != states[k] {
                return Err(TraceError::LoopNotClosed);
            }
        }
        Ok(Trace {
            config: config.clone(),
            variant,
            states,
            events: events.to_vec(),
            loop_start,
        })
    }

    /// Checks that the stored states are exactly what replaying the events
    /// produces.
    pub fn validate(&self) -> Result<(), TraceError> {
        let expected = self.states.len() - usize::from(self.loop_start.is_none());
        if self.events.len() != expected {
            return Err(TraceError::EventCount {
                states: self.states.len(),
                expected,
                found: self.events.len(),
            });
        }
        let replayed = Trace::replay(&self.config, self.variant, &self.events, self.loop_start)?;
        if let Some(index) = (0..self.states.len()).find(|&i| replayed.states[i] != self.states[i]) {
            return Err(TraceError::StateMismatch { index });
        }
        Ok(())
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn states(&self) -> &[ProtocolState] {
        &self.states
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn loop_start(&self) -> Option<usize> {
        self.loop_start
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last_state(&self) -> &ProtocolState {
        self.states.last().expect("traces are nonempty")
    }

    /// State following position `index`: the next state, the loop target
    /// for the final state of a lasso, or the same state when stuttering.
    pub fn successor_of(&self, index: usize) -> Option<(Option<&Event>, &ProtocolState)> {
        if index >= self.states.len() {
            return None;
        }
        if let Some(e) = self.events.get(index) {
            let target = match self.states.get(index + 1) {
                Some(s) => s,
                None => &self.states[self.loop_start.expect("lasso closing event")],
            };
            Some((Some(e), target))
        } else {
            Some((None, &self.states[index]))
        }
    }

    /// The stutter-terminated trace consisting of the first `index + 1`
    /// states.
    pub fn prefix(&self, index: usize) -> Result<Trace, TraceError> {
        if index >= self.states.len() {
            return Err(TraceError::Index {
                index,
                len: self.states.len(),
            });
        }
        Ok(Trace {
            config: self.config.clone(),
            variant: self.variant,
            states: self.states[..=index].to_vec(),
            events: self.events[..index].to_vec(),
            loop_start: None,
        })
    }

    /// Appends one event to a stutter-terminated trace.
    pub fn extended(&self, event: Event) -> Result<Trace, TraceError> {
        assert!(self.loop_start.is_none(), "cannot extend a lasso");
        let next = apply_event(&self.config, self.last_state(), &event).map_err(|source| {
            TraceError::Step {
                index: self.events.len(),
                source,
            }
        })?;
        let mut out = self.clone();
        out.states.push(next);
        out.events.push(event);
        Ok(out)
    }

    /// Hex SHA-256 over the configuration, variant, event sequence and loop
    /// start. Equal behaviours have equal digests.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.config.to_string().as_bytes());
        h.update(b"\n");
        h.update(self.variant.as_str().as_bytes());
        h.update(b"\n");
        for e in &self.events {
            h.update([e.node as u8, e.kind as u8, e.from as u8]);
        }
        h.update(b"\n");
        if let Some(k) = self.loop_start {
            h.update((k as u64).to_be_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct TraceJson {
    config: Config,
    variant: Variant,
    states: Vec<ProtocolState>,
    events: Vec<Event>,
    loop_start: Option<usize>,
}

impl Serialize for Trace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TraceJson {
            config: self.config.clone(),
            variant: self.variant,
            states: self.states.clone(),
            events: self.events.clone(),
            loop_start: self.loop_start,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Trace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = TraceJson::deserialize(d)?;
        if j.states.is_empty() {
            return Err(serde::de::Error::custom("trace has no states"));
        }
        let trace = Trace {
            config: j.config,
            variant: j.variant,
            states: j.states,
            events: j.events,
            loop_start: j.loop_start,
        };
        trace.validate().map_err(serde::de::Error::custom)?;
        Ok(trace)
    }
}
