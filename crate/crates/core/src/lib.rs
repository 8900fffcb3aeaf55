//! Exhaustive verification of the Echo spanning-tree protocol.
//!
//! * [`netconfig`]: rooted network configurations, canonical forms and
//!   enumeration of every configuration up to a node bound.
//! * [`echo`]: protocol states, events and the state predicates.
//! * [`checker`]: breadth-first exploration, the correctness and
//!   termination checks, and sweeps over all configurations.
//! * [`trace`]: replayable traces shared by the checker, the command line
//!   and the exploration service.

pub mod checker;
pub mod echo;
pub mod netconfig;
pub mod nodeset;
pub mod trace;

pub use checker::{
    check, check_correctness, check_termination, explore, shortest_trace_to, sweep, CheckError,
    CheckOptions, Outcome, Property, Stats, SweepReport, Target, Verdict, ViolationReason,
};
pub use echo::{
    ancestors, apply_event, enabled_events, finish, initial_state, spanning_tree, well_formed,
    Event, MessageKind, ModelError, ProtocolState, Variant,
};
pub use netconfig::{
    automorphisms, canonical_form, count_labeled, enumerate_canonical, is_valid_config,
    reachable_set, relabel, Config, ConfigError, Permutation,
};
pub use nodeset::{node_name, NodeId, NodeSet, MAX_NODES};
pub use trace::{Trace, TraceError};
