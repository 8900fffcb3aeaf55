//! Exploration sessions: a current trace over one configuration, moved
//! around by the New Config / New Trace / New Init / New Fork operations.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use axum::http::StatusCode;
use echocheck::{enabled_events, finish, spanning_tree, Config, Event, ProtocolState, Trace, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::ServiceError;

/// Number of reseeded schedules tried before New Trace gives up.
pub const MAX_RESEEDS: u64 = 64;

pub struct Session {
    id: String,
    max_nodes: usize,
    variant: Variant,
    configs: Arc<Vec<Config>>,
    cursor: usize,
    trace: Trace,
    history: HashSet<String>,
    pub(crate) last_access: Instant,
}

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub session_id: String,
    pub max_nodes: usize,
    pub variant: Variant,
    pub config_index: usize,
    pub config_count: usize,
    pub traces_shown: usize,
    pub trace: Trace,
}

/// One transition of the current trace, with predicates evaluated on the
/// post-state. At the last index of a stuttering trace `event` is absent
/// and both states coincide.
#[derive(Debug, Clone, Serialize)]
pub struct StepView {
    pub index: usize,
    pub pre: ProtocolState,
    pub event: Option<Event>,
    pub post: ProtocolState,
    pub stutter: bool,
    pub enabled: Vec<Event>,
    pub finish: bool,
    pub spanning_tree: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fork {
    pub trace: Trace,
    pub enabled: Vec<Event>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Notice {
    pub code: &'static str,
    pub message: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct InitReply {
    pub notice: Notice,
    pub state: ProtocolState,
}

impl Session {
    /// A session positioned on the first configuration, showing its
    /// stuttering initial state.
    pub fn create(
        id: String,
        max_nodes: usize,
        variant: Variant,
        configs: Arc<Vec<Config>>,
    ) -> Result<Self, ServiceError> {
        let first = configs
            .first()
            .ok_or_else(|| ServiceError::bad_request("no configurations"))?;
        let trace = stutter(first, variant)?;
        let mut session = Session {
            id,
            max_nodes,
            variant,
            configs,
            cursor: 0,
            trace: trace.clone(),
            history: HashSet::new(),
            last_access: Instant::now(),
        };
        session.show(trace)?;
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn config(&self) -> &Config {
        &self.configs[self.cursor]
    }

    pub fn traces_shown(&self) -> usize {
        self.history.len()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            session_id: self.id.clone(),
            max_nodes: self.max_nodes,
            variant: self.variant,
            config_index: self.cursor,
            config_count: self.configs.len(),
            traces_shown: self.history.len(),
            trace: self.trace.clone(),
        }
    }

    /// Every trace handed out is replayed first.
    fn show(&mut self, trace: Trace) -> Result<&Trace, ServiceError> {
        trace
            .validate()
            .map_err(|e| ServiceError::internal(format!("refusing invalid trace: {e}")))?;
        self.history.insert(trace.digest());
        self.trace = trace;
        Ok(&self.trace)
    }

    /// Moves to the next configuration (wrapping around) and shows its
    /// stuttering initial state.
    pub fn new_config(&mut self) -> Result<&Trace, ServiceError> {
        self.cursor = (self.cursor + 1) % self.configs.len();
        let trace = stutter(&self.configs[self.cursor], self.variant)?;
        self.show(trace)
    }

    /// A maximal run of the current configuration not shown before. Runs are
    /// scheduled pseudo-randomly from a seed derived from the number of
    /// traces already shown.
    pub fn new_trace(&mut self) -> Result<&Trace, ServiceError> {
        let config = self.config().clone();
        let base = self.history.len() as u64;
        for attempt in 0..MAX_RESEEDS {
            let trace = seeded_run(&config, self.variant, base + attempt)?;
            if !self.history.contains(&trace.digest()) {
                return self.show(trace);
            }
        }
        Err(ServiceError::new(
            StatusCode::NOT_FOUND,
            "exhausted",
            "no further trace found for this configuration",
        ))
    }

    /// The initial state is a deterministic function of the configuration
    /// and variant, so there is never another one to show.
    pub fn new_init(&self) -> InitReply {
        InitReply {
            notice: Notice {
                code: "unique_initial_state",
                message: "the initial state is unique for this model",
            },
            state: self.trace.states()[0],
        }
    }

    /// Keeps the current trace up to `state_index` and continues with
    /// `event`, or with the first enabled event that differs from the one
    /// shown at that position.
    pub fn new_fork(&mut self, state_index: usize, event: Option<Event>) -> Result<Fork, ServiceError> {
        let len = self.trace.len();
        if state_index >= len {
            return Err(ServiceError::out_of_range(format!(
                "state index {state_index} outside 0..{len}"
            )));
        }
        let pre = self.trace.states()[state_index];
        let enabled = enabled_events(self.config(), &pre);
        let chosen = match event {
            Some(e) if enabled.contains(&e) => e,
            Some(e) => {
                return Err(ServiceError::new(
                    StatusCode::CONFLICT,
                    "not_enabled",
                    format!("event {e} is not enabled in state {state_index}"),
                )
                .with_enabled(enabled));
            }
            None => {
                let shown = self.trace.events().get(state_index);
                match enabled.iter().find(|e| Some(*e) != shown) {
                    Some(e) => *e,
                    None => {
                        let (code, message) = if enabled.is_empty() {
                            ("no_enabled_events", "no event is enabled in this state")
                        } else {
                            ("no_alternative", "the shown event is the only one enabled")
                        };
                        return Err(ServiceError::new(StatusCode::CONFLICT, code, message)
                            .with_enabled(enabled));
                    }
                }
            }
        };
        let forked = self
            .trace
            .prefix(state_index)
            .and_then(|p| p.extended(chosen))
            .map_err(|e| ServiceError::internal(e.to_string()))?;
        let trace = self.show(forked)?.clone();
        Ok(Fork { trace, enabled })
    }

    pub fn step(&self, index: i64) -> Result<StepView, ServiceError> {
        let len = self.trace.len();
        let idx = usize::try_from(index)
            .ok()
            .filter(|&i| i < len)
            .ok_or_else(|| ServiceError::out_of_range(format!("step {index} outside 0..{len}")))?;
        let pre = self.trace.states()[idx];
        let (event, post) = self.trace.successor_of(idx).expect("index checked");
        let post = *post;
        let config = self.config();
        Ok(StepView {
            index: idx,
            pre,
            event: event.copied(),
            post,
            stutter: event.is_none(),
            enabled: enabled_events(config, &pre),
            finish: finish(config, &post),
            spanning_tree: spanning_tree(config, &post),
        })
    }
}

fn stutter(config: &Config, variant: Variant) -> Result<Trace, ServiceError> {
    Trace::stutter(config, variant).map_err(|e| ServiceError::internal(e.to_string()))
}

/// Runs the protocol to quiescence, picking each step with a seeded RNG.
pub fn seeded_run(config: &Config, variant: Variant, seed: u64) -> Result<Trace, ServiceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = stutter(config, variant)?;
    loop {
        let enabled = enabled_events(config, trace.last_state());
        if enabled.is_empty() {
            return Ok(trace);
        }
        let e = enabled[rng.gen_range(0..enabled.len())];
        trace = trace
            .extended(e)
            .map_err(|e| ServiceError::internal(e.to_string()))?;
    }
}
