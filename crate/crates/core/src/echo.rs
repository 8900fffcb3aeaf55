//! Echo protocol semantics.
//!
//! Each node keeps an optional parent, the set of neighbours it has received
//! echoes from, and an inbox. The inbox is a set of `(sender, kind)` messages
//! and is stored as two sender sets per node, one per message kind, so
//! duplicate messages coalesce.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netconfig::{Config, ConfigError};
use crate::nodeset::{node_name, NodeId, NodeSet, MAX_NODES};

/// Initial condition of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// No node has a parent initially.
    Chang,
    /// The initiator starts out as its own parent.
    Fixed,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Chang, Variant::Fixed];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Chang => "chang",
            Variant::Fixed => "fixed",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "chang" => Ok(Variant::Chang),
            "fixed" => Ok(Variant::Fixed),
            other => Err(format!("unknown variant `{other}` (expected chang or fixed)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MessageKind {
    Explorer,
    Echo,
}

/// Processing of one pending message: `node` consumes the `kind` message sent
/// by `from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Event {
    pub node: NodeId,
    pub kind: MessageKind,
    pub from: NodeId,
}

impl Event {
    pub fn new(node: NodeId, kind: MessageKind, from: NodeId) -> Self {
        Event { node, kind, from }
    }

    pub fn explorer(node: NodeId, from: NodeId) -> Self {
        Event::new(node, MessageKind::Explorer, from)
    }

    pub fn echo(node: NodeId, from: NodeId) -> Self {
        Event::new(node, MessageKind::Echo, from)
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            MessageKind::Explorer => "explorer",
            MessageKind::Echo => "echo",
        };
        write!(
            f,
            "{} receives {kind} from {}",
            node_name(self.node),
            node_name(self.from)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("event {0:?} is not enabled")]
    NotEnabled(Event),
    #[error("state does not match the configuration")]
    IllFormed,
}

/// The mutable part of a protocol instance.
///
/// Slots at or beyond `len` are always empty, so equality and hashing only
/// see the live nodes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProtocolState {
    len: u8,
    parent: [Option<u8>; MAX_NODES],
    received: [NodeSet; MAX_NODES],
    inbox_explorer: [NodeSet; MAX_NODES],
    inbox_echo: [NodeSet; MAX_NODES],
}

impl ProtocolState {
    /// A state for `len` nodes with no parents, nothing received and empty
    /// inboxes.
    pub fn empty(len: usize) -> Self {
        assert!(len <= MAX_NODES);
        ProtocolState {
            len: len as u8,
            parent: [None; MAX_NODES],
            received: [NodeSet::EMPTY; MAX_NODES],
            inbox_explorer: [NodeSet::EMPTY; MAX_NODES],
            inbox_echo: [NodeSet::EMPTY; MAX_NODES],
        }
    }

    /// Builds a state from per-node columns, which must have equal length of
    /// at most [`MAX_NODES`]. Identifiers are not checked against any
    /// configuration; use [`well_formed`] for that.
    pub fn from_parts(
        parent: &[Option<NodeId>],
        received: &[NodeSet],
        inbox_explorer: &[NodeSet],
        inbox_echo: &[NodeSet],
    ) -> Option<Self> {
        let len = parent.len();
        if len > MAX_NODES
            || received.len() != len
            || inbox_explorer.len() != len
            || inbox_echo.len() != len
            || parent.iter().flatten().any(|&p| p >= MAX_NODES)
        {
            return None;
        }
        let mut s = ProtocolState::empty(len);
        for n in 0..len {
            s.parent[n] = parent[n].map(|p| p as u8);
            s.received[n] = received[n];
            s.inbox_explorer[n] = inbox_explorer[n];
            s.inbox_echo[n] = inbox_echo[n];
        }
        Some(s)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.parent[n].map(NodeId::from)
    }

    pub fn received(&self, n: NodeId) -> NodeSet {
        self.received[n]
    }

    pub fn inbox(&self, n: NodeId, kind: MessageKind) -> NodeSet {
        match kind {
            MessageKind::Explorer => self.inbox_explorer[n],
            MessageKind::Echo => self.inbox_echo[n],
        }
    }

    fn inbox_mut(&mut self, n: NodeId, kind: MessageKind) -> &mut NodeSet {
        match kind {
            MessageKind::Explorer => &mut self.inbox_explorer[n],
            MessageKind::Echo => &mut self.inbox_echo[n],
        }
    }

    /// True when `event` names a pending message.
    pub fn has_pending(&self, event: &Event) -> bool {
        event.node < self.len() && self.inbox(event.node, event.kind).contains(event.from)
    }

    /// Renames node `n` to `mapping[n]` everywhere.
    #[must_use]
    pub fn permuted(&self, mapping: &[u8]) -> Self {
        let mut out = ProtocolState::empty(self.len());
        for n in 0..self.len() {
            let m = mapping[n] as usize;
            out.parent[m] = self.parent[n].map(|p| mapping[p as usize]);
            out.received[m] = self.received[n].map(mapping);
            out.inbox_explorer[m] = self.inbox_explorer[n].map(mapping);
            out.inbox_echo[m] = self.inbox_echo[n].map(mapping);
        }
        out
    }

    /// Total number of pending messages.
    pub fn pending(&self) -> usize {
        (0..self.len())
            .map(|n| self.inbox_explorer[n].len() + self.inbox_echo[n].len())
            .sum()
    }
}

impl fmt::Debug for ProtocolState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        f.debug_struct("ProtocolState")
            .field("parent", &&self.parent[..n])
            .field("received", &&self.received[..n])
            .field("inbox_explorer", &&self.inbox_explorer[..n])
            .field("inbox_echo", &&self.inbox_echo[..n])
            .finish()
    }
}

/// The unique initial state for `c` under `variant`: the initiator has sent
/// an explorer to each of its neighbours.
pub fn initial_state(c: &Config, variant: Variant) -> Result<ProtocolState, ModelError> {
    c.validate().map_err(ConfigError::Invalid)?;
    let mut s = ProtocolState::empty(c.node_count());
    let init = c.initiator();
    for n in c.neighbours(init) {
        s.inbox_explorer[n].insert(init);
    }
    if variant == Variant::Fixed {
        s.parent[init] = Some(init as u8);
    }
    Ok(s)
}

/// One event per pending message, ordered by node, then Explorer before Echo,
/// then sender.
pub fn enabled_events(c: &Config, s: &ProtocolState) -> Vec<Event> {
    let mut out = Vec::with_capacity(s.pending());
    for_each_enabled(c, s, |e| out.push(e));
    out
}

pub(crate) fn for_each_enabled(_c: &Config, s: &ProtocolState, mut f: impl FnMut(Event)) {
    for node in 0..s.len() {
        for from in s.inbox_explorer[node] {
            f(Event::explorer(node, from));
        }
        for from in s.inbox_echo[node] {
            f(Event::echo(node, from));
        }
    }
}

/// Successor of `s` under `e`, which must be enabled.
pub fn apply_event(c: &Config, s: &ProtocolState, e: &Event) -> Result<ProtocolState, ModelError> {
    if s.len() != c.node_count() {
        return Err(ModelError::IllFormed);
    }
    if !s.has_pending(e) {
        return Err(ModelError::NotEnabled(*e));
    }
    Ok(fire(c, s, e))
}

/// [`apply_event`] without the guard check.
pub(crate) fn fire(c: &Config, s: &ProtocolState, e: &Event) -> ProtocolState {
    let mut next = *s;
    let (n, m) = (e.node, e.from);
    match e.kind {
        MessageKind::Explorer => {
            let first = s.parent[n].is_none();
            if first {
                next.parent[n] = Some(m as u8);
            }
            next.inbox_explorer[n].remove(m);
            let others = c.neighbours(n).without(m);
            if first && !others.is_empty() {
                for x in others {
                    next.inbox_explorer[x].insert(n);
                }
            } else {
                next.inbox_echo[m].insert(n);
            }
        }
        MessageKind::Echo => {
            next.received[n].insert(m);
            next.inbox_echo[n].remove(m);
            if n != c.initiator() {
                if let Some(p) = s.parent(n) {
                    if next.received[n] == c.neighbours(n).without(p) {
                        next.inbox_mut(p, MessageKind::Echo).insert(n);
                    }
                }
            }
        }
    }
    next
}

/// The initiator has received echoes from exactly its neighbours.
pub fn finish(c: &Config, s: &ProtocolState) -> bool {
    s.received(c.initiator()) == c.neighbours(c.initiator())
}

/// Nodes reachable from `n` in one or more parent steps.
pub fn ancestors(s: &ProtocolState, n: NodeId) -> NodeSet {
    let mut found = NodeSet::EMPTY;
    let mut cursor = s.parent(n);
    while let Some(p) = cursor {
        if found.contains(p) {
            break;
        }
        found.insert(p);
        cursor = s.parent(p);
    }
    found
}

/// Every non-initiator has the initiator among its ancestors.
pub fn spanning_tree(c: &Config, s: &ProtocolState) -> bool {
    let init = c.initiator();
    c.nodes()
        .filter(|&n| n != init)
        .all(|n| ancestors(s, n).contains(init))
}

/// Runtime type check: the state has one entry per node and every recorded
/// identifier is a node of `c`.
pub fn well_formed(c: &Config, s: &ProtocolState) -> bool {
    let n = c.node_count();
    if s.len() != n {
        return false;
    }
    let universe = NodeSet::full(n);
    (0..n).all(|i| {
        s.parent(i).is_none_or(|p| p < n)
            && s.received[i].is_subset(universe)
            && s.inbox_explorer[i].is_subset(universe)
            && s.inbox_echo[i].is_subset(universe)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct MessageJson {
    from: NodeId,
    #[serde(rename = "type")]
    kind: MessageKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct StateJson {
    parent: Vec<Option<NodeId>>,
    received: Vec<Vec<NodeId>>,
    inbox: Vec<Vec<MessageJson>>,
}

impl Serialize for ProtocolState {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let n = self.len();
        let json = StateJson {
            parent: (0..n).map(|i| self.parent(i)).collect(),
            received: (0..n).map(|i| self.received[i].iter().collect()).collect(),
            inbox: (0..n)
                .map(|i| {
                    let explorers = self.inbox_explorer[i].iter().map(|from| MessageJson {
                        from,
                        kind: MessageKind::Explorer,
                    });
                    let echoes = self.inbox_echo[i].iter().map(|from| MessageJson {
                        from,
                        kind: MessageKind::Echo,
                    });
                    explorers.chain(echoes).collect()
                })
                .collect(),
        };
        json.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ProtocolState {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let json = StateJson::deserialize(de)?;
        let len = json.parent.len();
        if json.received.len() != len || json.inbox.len() != len {
            return Err(D::Error::custom("state columns differ in length"));
        }
        let to_set = |items: &mut dyn Iterator<Item = NodeId>| -> Result<NodeSet, D::Error> {
            let mut set = NodeSet::EMPTY;
            for i in items {
                if i >= MAX_NODES {
                    return Err(D::Error::custom(format!("node {i} out of range")));
                }
                set.insert(i);
            }
            Ok(set)
        };
        let mut received = Vec::with_capacity(len);
        let mut explorers = Vec::with_capacity(len);
        let mut echoes = Vec::with_capacity(len);
        for i in 0..len {
            received.push(to_set(&mut json.received[i].iter().copied())?);
            let inbox = &json.inbox[i];
            explorers.push(to_set(
                &mut inbox
                    .iter()
                    .filter(|m| m.kind == MessageKind::Explorer)
                    .map(|m| m.from),
            )?);
            echoes.push(to_set(
                &mut inbox
                    .iter()
                    .filter(|m| m.kind == MessageKind::Echo)
                    .map(|m| m.from),
            )?);
        }
        ProtocolState::from_parts(&json.parent, &received, &explorers, &echoes)
            .ok_or_else(|| D::Error::custom("state exceeds the node limit"))
    }
}
