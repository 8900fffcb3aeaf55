//! Network configurations: rooted, connected, undirected graphs without self
//! loops, together with canonical forms modulo relabeling of the non-initiator
//! nodes and exhaustive enumeration of all configurations up to a node bound.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nodeset::{NodeId, NodeSet, MAX_NODES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("node count {0} outside 1..={MAX_NODES}")]
    NodeCount(usize),
    #[error("adjacency has {got} entries, expected {expected}")]
    AdjacencyLength { expected: usize, got: usize },
    #[error("node {node} lists neighbour {member}, outside 0..{node_count}")]
    MemberOutOfRange {
        node: NodeId,
        member: NodeId,
        node_count: usize,
    },
    #[error("invalid configuration: {0}")]
    Invalid(Violation),
    #[error("bound {requested} exceeds the resource limit of {limit}")]
    ResourceLimit { requested: usize, limit: usize },
    #[error("malformed configuration `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

/// The first configuration assumption a [`Config`] fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    InitiatorOutOfRange(NodeId),
    SelfLoop(NodeId),
    Asymmetric(NodeId, NodeId),
    Unreachable(NodeId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InitiatorOutOfRange(n) => write!(f, "initiator {n} is not a node"),
            Violation::SelfLoop(n) => write!(f, "self loop at node {n}"),
            Violation::Asymmetric(x, y) => write!(f, "edge {x}->{y} has no reverse"),
            Violation::Unreachable(n) => write!(f, "node {n} is unreachable from the initiator"),
        }
    }
}

/// A rooted network: `node_count` nodes numbered from zero, a distinguished
/// initiator and one neighbour set per node.
///
/// Construction only checks the shape; whether the network satisfies the
/// configuration assumptions is answered by [`is_valid_config`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    node_count: usize,
    initiator: NodeId,
    adjacency: Vec<NodeSet>,
}

impl Config {
    pub fn new(
        node_count: usize,
        initiator: NodeId,
        adjacency: Vec<NodeSet>,
    ) -> Result<Self, ConfigError> {
        if node_count == 0 || node_count > MAX_NODES {
            return Err(ConfigError::NodeCount(node_count));
        }
        if adjacency.len() != node_count {
            return Err(ConfigError::AdjacencyLength {
                expected: node_count,
                got: adjacency.len(),
            });
        }
        let universe = NodeSet::full(node_count);
        for (node, set) in adjacency.iter().enumerate() {
            if let Some(member) = set.difference(universe).iter().next() {
                return Err(ConfigError::MemberOutOfRange {
                    node,
                    member,
                    node_count,
                });
            }
        }
        Ok(Config {
            node_count,
            initiator,
            adjacency,
        })
    }

    /// Builds an undirected configuration from an edge list.
    pub fn from_edges(
        node_count: usize,
        initiator: NodeId,
        edges: &[(NodeId, NodeId)],
    ) -> Result<Self, ConfigError> {
        if node_count == 0 || node_count > MAX_NODES {
            return Err(ConfigError::NodeCount(node_count));
        }
        let mut adjacency = vec![NodeSet::EMPTY; node_count];
        for &(i, j) in edges {
            for (node, member) in [(i, j), (j, i)] {
                if node >= node_count || member >= node_count {
                    return Err(ConfigError::MemberOutOfRange {
                        node,
                        member,
                        node_count,
                    });
                }
                adjacency[node].insert(member);
            }
        }
        Config::new(node_count, initiator, adjacency)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn initiator(&self) -> NodeId {
        self.initiator
    }

    pub fn adjacency(&self) -> &[NodeSet] {
        &self.adjacency
    }

    pub fn neighbours(&self, n: NodeId) -> NodeSet {
        self.adjacency[n]
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.node_count
    }

    /// Edges `(i, j)` with `i < j`, ascending.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for i in self.nodes() {
            for j in self.adjacency[i].iter().filter(|&j| j > i) {
                out.push((i, j));
            }
        }
        out
    }

    /// Nodes reachable from `n` in one or more adjacency steps.
    pub fn reachable_set(&self, n: NodeId) -> NodeSet {
        assert!(n < self.node_count, "node {n} out of range");
        let mut reached = self.adjacency[n];
        let mut frontier = reached;
        while !frontier.is_empty() {
            let mut next = NodeSet::EMPTY;
            for x in frontier {
                next = next.union(self.adjacency[x]);
            }
            frontier = next.difference(reached);
            reached = reached.union(next);
        }
        reached
    }

    /// Checks the four configuration assumptions, reporting the first failure.
    pub fn validate(&self) -> Result<(), Violation> {
        if self.initiator >= self.node_count {
            return Err(Violation::InitiatorOutOfRange(self.initiator));
        }
        for n in self.nodes() {
            if self.adjacency[n].contains(n) {
                return Err(Violation::SelfLoop(n));
            }
        }
        for x in self.nodes() {
            for y in self.adjacency[x] {
                if !self.adjacency[y].contains(x) {
                    return Err(Violation::Asymmetric(x, y));
                }
            }
        }
        let reached = self.reachable_set(self.initiator);
        let others = NodeSet::full(self.node_count).without(self.initiator);
        if let Some(n) = others.difference(reached).iter().next() {
            return Err(Violation::Unreachable(n));
        }
        Ok(())
    }

    pub(crate) fn require_valid(&self) -> Result<(), ConfigError> {
        self.validate().map_err(ConfigError::Invalid)
    }

    /// Upper-triangle adjacency bits in column order `(0,1), (0,2), (1,2),
    /// (0,3), ...`, first slot most significant.
    pub fn encoding(&self) -> u32 {
        let identity: Vec<NodeId> = self.nodes().collect();
        encode_order(&self.adjacency, &identity)
    }
}

/// True iff `c` satisfies every configuration assumption: the initiator is a
/// node, there are no self loops, adjacency is symmetric and every other node
/// is reachable from the initiator.
pub fn is_valid_config(c: &Config) -> bool {
    c.validate().is_ok()
}

/// Nodes reachable from `n` by one or more adjacency steps.
pub fn reachable_set(c: &Config, n: NodeId) -> NodeSet {
    c.reachable_set(n)
}

/// A bijection on `0..len`, mapping old identifiers to new ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u8>);

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation((0..len as u8).collect())
    }

    pub fn new(mapping: Vec<NodeId>) -> Option<Self> {
        let len = mapping.len();
        if len > MAX_NODES {
            return None;
        }
        let image: NodeSet = mapping.iter().copied().filter(|&m| m < len).collect();
        if image.len() != len || mapping.iter().any(|&m| m >= len) {
            return None;
        }
        Some(Permutation(mapping.into_iter().map(|m| m as u8).collect()))
    }

    pub fn apply(&self, n: NodeId) -> NodeId {
        self.0[n] as NodeId
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &m)| i == m as usize)
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &m) in self.0.iter().enumerate() {
            inv[m as usize] = i as u8;
        }
        Permutation(inv)
    }
}

/// Renames every node `n` of `c` to `p(n)`, initiator included.
pub fn relabel(c: &Config, p: &Permutation) -> Config {
    assert_eq!(p.len(), c.node_count, "permutation size mismatch");
    let mut adjacency = vec![NodeSet::EMPTY; c.node_count];
    for n in c.nodes() {
        adjacency[p.apply(n)] = c.adjacency[n].map(p.as_slice());
    }
    let initiator = if c.initiator < c.node_count {
        p.apply(c.initiator)
    } else {
        c.initiator
    };
    Config {
        node_count: c.node_count,
        initiator,
        adjacency,
    }
}

fn column(adjacency: &[NodeSet], placed: &[NodeId], v: NodeId) -> u32 {
    placed
        .iter()
        .fold(0, |acc, &u| (acc << 1) | u32::from(adjacency[u].contains(v)))
}

/// Encoding of the graph after renaming `order[i]` to `i`.
fn encode_order(adjacency: &[NodeSet], order: &[NodeId]) -> u32 {
    (1..order.len()).fold(0, |code, d| {
        (code << d) | column(adjacency, &order[..d], order[d])
    })
}

/// Branch-and-bound search for the labeling with the smallest encoding among
/// those that put `root` first.
struct CanonSearch<'a> {
    adjacency: &'a [NodeSet],
    n: usize,
    order: Vec<NodeId>,
    cols: Vec<u32>,
    best: Option<(Vec<NodeId>, Vec<u32>)>,
}

impl CanonSearch<'_> {
    fn run(&mut self, used: NodeSet) {
        let depth = self.order.len();
        if depth == self.n {
            let better = match &self.best {
                None => true,
                Some((_, best_cols)) => self.cols < *best_cols,
            };
            if better {
                self.best = Some((self.order.clone(), self.cols.clone()));
            }
            return;
        }
        for v in NodeSet::full(self.n).difference(used) {
            let col = column(self.adjacency, &self.order, v);
            if let Some((_, best_cols)) = &self.best {
                // prune only when the extended prefix is strictly worse
                let prefix = self.cols[..depth - 1].iter().chain(std::iter::once(&col));
                if prefix.cmp(best_cols[..depth].iter()) == std::cmp::Ordering::Greater {
                    continue;
                }
            }
            self.order.push(v);
            self.cols.push(col);
            self.run(used.with(v));
            self.order.pop();
            self.cols.pop();
        }
    }
}

/// Returns `order` with `order[new] = old` for the canonical labeling.
fn canonical_order(c: &Config) -> Vec<NodeId> {
    let mut search = CanonSearch {
        adjacency: &c.adjacency,
        n: c.node_count,
        order: vec![c.initiator],
        cols: Vec::with_capacity(c.node_count),
        best: None,
    };
    search.run(NodeSet::singleton(c.initiator));
    search.best.expect("at least one labeling").0
}

/// Representative of the rooted-isomorphism class of `c`: the initiator is
/// renamed to 0 and the remaining nodes are ordered so that
/// [`Config::encoding`] is minimal.
pub fn canonical_form(c: &Config) -> Result<Config, ConfigError> {
    c.require_valid()?;
    Ok(canonicalize_unchecked(c))
}

fn canonicalize_unchecked(c: &Config) -> Config {
    let order = canonical_order(c);
    let mut mapping = vec![0; c.node_count];
    for (new, &old) in order.iter().enumerate() {
        mapping[old] = new;
    }
    let p = Permutation::new(mapping).expect("labeling is a bijection");
    relabel(c, &p)
}

/// All permutations fixing the initiator that map the adjacency onto itself.
pub fn automorphisms(c: &Config) -> Result<Vec<Permutation>, ConfigError> {
    c.require_valid()?;
    let n = c.node_count;
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    image[c.initiator] = c.initiator;
    extend_automorphism(c, 0, &mut image, NodeSet::singleton(c.initiator), &mut out);
    Ok(out)
}

fn extend_automorphism(
    c: &Config,
    next: NodeId,
    image: &mut Vec<NodeId>,
    taken: NodeSet,
    out: &mut Vec<Permutation>,
) {
    if next == c.node_count {
        out.push(Permutation::new(image.clone()).expect("bijection"));
        return;
    }
    if next == c.initiator {
        return extend_automorphism(c, next + 1, image, taken, out);
    }
    for target in NodeSet::full(c.node_count).difference(taken) {
        image[next] = target;
        let consistent = (0..c.node_count)
            .filter(|&u| u == c.initiator || u < next)
            .chain(std::iter::once(next))
            .all(|u| c.adjacency[u].contains(next) == c.adjacency[image[u]].contains(target));
        if consistent {
            extend_automorphism(c, next + 1, image, taken.with(target), out);
        }
        image[next] = usize::MAX;
    }
}

/// Largest bound accepted by the enumeration and counting routines.
pub const ENUMERATION_LIMIT: usize = MAX_NODES;

/// Every rooted-isomorphism class of valid configurations with
/// `1..=max_nodes` nodes, as canonical forms sorted by node count and then
/// by encoding.
///
/// Classes with `k` nodes are obtained from those with `k - 1` by adding a
/// node attached to a nonempty neighbour set: every connected rooted graph
/// with at least two nodes has a non-initiator node (a leaf of a spanning
/// tree) whose removal leaves it connected.
pub fn enumerate_canonical(max_nodes: usize) -> Result<Vec<Config>, ConfigError> {
    if max_nodes == 0 || max_nodes > ENUMERATION_LIMIT {
        return Err(ConfigError::ResourceLimit {
            requested: max_nodes,
            limit: ENUMERATION_LIMIT,
        });
    }
    let single = Config::new(1, 0, vec![NodeSet::EMPTY]).expect("one node");
    let mut level = vec![single];
    let mut out = level.clone();
    for k in 2..=max_nodes {
        let candidates: Vec<(u32, Config)> = level
            .par_iter()
            .flat_map_iter(|g| {
                (1..(1u16 << (k - 1))).map(move |mask| {
                    let attach = NodeSet::from_bits(mask as u8);
                    let mut adjacency = g.adjacency.clone();
                    for x in attach {
                        adjacency[x].insert(k - 1);
                    }
                    adjacency.push(attach);
                    let h = Config {
                        node_count: k,
                        initiator: 0,
                        adjacency,
                    };
                    let canon = canonicalize_unchecked(&h);
                    (canon.encoding(), canon)
                })
            })
            .collect();
        let classes: BTreeMap<u32, Config> = candidates.into_iter().collect();
        level = classes.into_values().collect();
        out.extend(level.iter().cloned());
    }
    Ok(out)
}

/// Number of connected labeled graphs on `k` nodes, by checking every edge
/// subset.
pub fn connected_labeled_graphs(k: usize) -> Result<u64, ConfigError> {
    if k == 0 || k > ENUMERATION_LIMIT {
        return Err(ConfigError::ResourceLimit {
            requested: k,
            limit: ENUMERATION_LIMIT,
        });
    }
    let slots: Vec<(usize, usize)> = (0..k)
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .collect();
    let subsets = 1u64 << slots.len();
    let count = (0..subsets)
        .into_par_iter()
        .filter(|&mask| {
            let mut adjacency = [NodeSet::EMPTY; MAX_NODES];
            for (bit, &(i, j)) in slots.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    adjacency[i].insert(j);
                    adjacency[j].insert(i);
                }
            }
            spans(&adjacency[..k])
        })
        .count();
    Ok(count as u64)
}

fn spans(adjacency: &[NodeSet]) -> bool {
    let mut reached = NodeSet::singleton(0);
    let mut frontier = reached;
    while !frontier.is_empty() {
        let mut next = NodeSet::EMPTY;
        for x in frontier {
            next = next.union(adjacency[x]);
        }
        frontier = next.difference(reached);
        reached = reached.union(next);
    }
    reached.len() == adjacency.len()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of distinct labeled configurations whose nodes are a nonempty
/// subset of a universe of `universe_size` identifiers:
/// `sum over k of C(U, k) * k * Conn(k)`.
pub fn count_labeled(universe_size: usize) -> Result<u64, ConfigError> {
    if universe_size == 0 || universe_size > ENUMERATION_LIMIT {
        return Err(ConfigError::ResourceLimit {
            requested: universe_size,
            limit: ENUMERATION_LIMIT,
        });
    }
    let u = universe_size as u64;
    let mut total = 0;
    for k in 1..=universe_size {
        total += binomial(u, k as u64) * k as u64 * connected_labeled_graphs(k)?;
    }
    Ok(total)
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} init={} edges=", self.node_count, self.initiator)?;
        for (idx, (i, j)) in self.edges().into_iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}-{j}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Config({self})")
    }
}

fn check_edge_order(edges: &[(NodeId, NodeId)]) -> Result<(), String> {
    for &(i, j) in edges {
        if i >= j {
            return Err(format!("edge {i}-{j} must satisfy i < j"));
        }
    }
    for w in edges.windows(2) {
        if w[0] >= w[1] {
            return Err(format!(
                "edges {}-{} and {}-{} are not strictly ascending",
                w[0].0, w[0].1, w[1].0, w[1].1
            ));
        }
    }
    Ok(())
}

impl FromStr for Config {
    type Err = ConfigError;

    /// Parses `n=<count> init=<id> edges=<i-j>[,<i-j>...]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |reason: String| ConfigError::Parse {
            input: s.to_string(),
            reason,
        };
        let fields: Vec<&str> = s.trim().split(' ').collect();
        let [n, init, edges] = fields.as_slice() else {
            return Err(parse_err("expected three space-separated fields".into()));
        };
        let field = |text: &'static str, part: &str| -> Result<String, ConfigError> {
            part.strip_prefix(text)
                .map(str::to_string)
                .ok_or_else(|| parse_err(format!("expected `{text}`")))
        };
        let number = |v: &str| -> Result<usize, ConfigError> {
            v.parse::<usize>()
                .map_err(|_| parse_err(format!("`{v}` is not a node number")))
        };
        let node_count = number(&field("n=", n)?)?;
        let initiator = number(&field("init=", init)?)?;
        let edge_text = field("edges=", edges)?;
        let mut edge_list = Vec::new();
        if !edge_text.is_empty() {
            for item in edge_text.split(',') {
                let (i, j) = item
                    .split_once('-')
                    .ok_or_else(|| parse_err(format!("edge `{item}` is not `i-j`")))?;
                edge_list.push((number(i)?, number(j)?));
            }
        }
        check_edge_order(&edge_list).map_err(parse_err)?;
        Config::from_edges(node_count, initiator, &edge_list)
    }
}

/// Wire form of a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub nodes: usize,
    pub initiator: NodeId,
    pub edges: Vec<[NodeId; 2]>,
}

impl From<&Config> for ConfigJson {
    fn from(c: &Config) -> Self {
        ConfigJson {
            nodes: c.node_count,
            initiator: c.initiator,
            edges: c.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl TryFrom<ConfigJson> for Config {
    type Error = ConfigError;

    fn try_from(j: ConfigJson) -> Result<Self, Self::Error> {
        let edges: Vec<(NodeId, NodeId)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        check_edge_order(&edges).map_err(|reason| ConfigError::Parse {
            input: format!("{j:?}"),
            reason,
        })?;
        Config::from_edges(j.nodes, j.initiator, &edges)
    }
}

impl Serialize for Config {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ConfigJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Config {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ConfigJson::deserialize(d)?;
        Config::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Reads a configuration in either the text or the JSON form.
pub fn parse_config(input: &str) -> Result<Config, ConfigError> {
    let trimmed = input.trim();
    if trimmed.starts_with('{') {
        serde_json::from_str(trimmed).map_err(|e| ConfigError::Parse {
            input: trimmed.to_string(),
            reason: e.to_string(),
        })
    } else {
        let lines: Vec<&str> = trimmed
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        match lines.as_slice() {
            [line] => line.parse(),
            _ => Err(ConfigError::Parse {
                input: trimmed.to_string(),
                reason: format!("expected exactly one configuration line, found {}", lines.len()),
            }),
        }
    }
}
