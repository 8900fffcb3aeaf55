//! Human-readable output. Nodes are printed as letters (0 -> a).

use std::fmt::Write;

use echocheck::checker::{ConfigResult, SweepOutcome};
use echocheck::echo::MessageKind;
use echocheck::{node_name, NodeId, NodeSet, ProtocolState, Stats, SweepReport, Trace};

fn parent(s: &ProtocolState, n: NodeId) -> String {
    s.parent(n).map_or_else(|| "none".to_string(), |p| node_name(p).to_string())
}

fn set(nodes: NodeSet) -> String {
    let names: Vec<String> = nodes.iter().map(|n| node_name(n).to_string()).collect();
    format!("{{{}}}", names.join(", "))
}

fn inbox(s: &ProtocolState, n: NodeId) -> String {
    let explorers = s
        .inbox(n, MessageKind::Explorer)
        .iter()
        .map(|m| format!("explorer from {}", node_name(m)));
    let echoes = s
        .inbox(n, MessageKind::Echo)
        .iter()
        .map(|m| format!("echo from {}", node_name(m)));
    format!("{{{}}}", explorers.chain(echoes).collect::<Vec<_>>().join(", "))
}

type Field = fn(&ProtocolState, NodeId) -> String;

const FIELDS: [(&str, Field); 3] = [
    ("parent", parent),
    ("received", |s, n| set(s.received(n))),
    ("inbox", inbox),
];

fn full_state(out: &mut String, s: &ProtocolState) {
    for (name, field) in FIELDS {
        let entries: Vec<String> = (0..s.len())
            .map(|n| format!("{} |-> {}", node_name(n), field(s, n)))
            .collect();
        let _ = writeln!(out, "  /\\ {name} = [{}]", entries.join(", "));
    }
}

/// Only the per-node variables whose value differs from the previous state.
fn state_diff(out: &mut String, before: &ProtocolState, after: &ProtocolState) {
    for (name, field) in FIELDS {
        for n in 0..after.len() {
            let value = field(after, n);
            if field(before, n) != value {
                let _ = writeln!(out, "  /\\ {name}[{}] = {value}", node_name(n));
            }
        }
    }
}

/// A trace in the style of a model checker's error trace: the initial
/// state in full, then each step's event and the variables it changed.
pub fn trace(t: &Trace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "config: {}", t.config());
    let _ = writeln!(out, "variant: {}", t.variant());
    let states = t.states();
    let _ = writeln!(out, "State 1: <initial>");
    full_state(&mut out, &states[0]);
    for (i, e) in t.events().iter().enumerate().take(states.len() - 1) {
        let _ = writeln!(out, "State {}: <{e}>", i + 2);
        state_diff(&mut out, &states[i], &states[i + 1]);
    }
    match t.loop_start() {
        Some(k) => {
            let e = t.events().last().expect("lasso has a closing event");
            let _ = writeln!(out, "Back to state {}: <{e}>", k + 1);
        }
        None => {
            let _ = writeln!(out, "Stuttering");
        }
    }
    out
}

fn stats(s: &Stats, timing: bool) -> String {
    let mut line = format!("states={} transitions={}", s.states, s.transitions);
    if timing {
        let _ = write!(line, " time={}ms", s.elapsed.as_millis());
    }
    line
}

fn result_line(r: &ConfigResult, timing: bool) -> String {
    let mut line = format!("{}  {}", r.config, r.outcome.as_str());
    if let Some(reason) = r.reason {
        let _ = write!(line, " ({})", reason.as_str());
    }
    let _ = write!(line, "  {}", stats(&r.stats, timing));
    line
}

pub fn report(r: &SweepReport, timing: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "check {} variant={} max_nodes={}",
        r.property, r.variant, r.max_nodes
    );
    for result in &r.results {
        let _ = writeln!(out, "{}", result_line(result, timing));
    }
    let _ = writeln!(
        out,
        "summary: {} configurations, {} violations, {} inconclusive, {}",
        r.results.len(),
        r.violation_count(),
        r.inconclusive_count(),
        stats(&r.totals(), timing)
    );
    for (i, result) in r.violations().enumerate() {
        if let Some(w) = &result.witness {
            let _ = writeln!(out, "\nViolation {}: {}", i + 1, result.config);
            out.push_str(&trace(w));
        }
    }
    if r.results.iter().any(|x| x.outcome == SweepOutcome::Inconclusive) {
        let _ = writeln!(out, "\nsome configurations exceeded the state budget");
    }
    out
}
