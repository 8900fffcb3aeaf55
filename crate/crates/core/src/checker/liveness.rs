//! Termination under weak fairness.
//!
//! A weakly fair behaviour that never finishes either stutters forever in a
//! state with nothing to process, or takes infinitely many steps through
//! non-finished states. On a finite graph both show up in the subgraph of
//! states reachable through non-finished states: the first as a state with
//! no enabled event, the second as a cycle.

use std::collections::VecDeque;

use super::{CheckError, CheckOptions, StateStore, Verdict, ViolationReason};
use crate::echo::{finish, Event, ProtocolState, Variant};
use crate::netconfig::Config;

/// Passes iff every weakly fair behaviour eventually reaches a finished
/// state. Deadlocks are preferred as witnesses (shortest one found); cycles
/// are reported as lassos.
pub fn check_termination(c: &Config, variant: Variant, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let mut store = StateStore::new(c, variant, opts)?;
    let init = store.initial()?;
    if finish(c, &init) {
        store.insert(init, None)?;
        return Ok(Verdict::pass(store.stats()));
    }
    let (root, _) = store.insert(init, None)?;
    let mut edges: Vec<Vec<(Event, u32)>> = Vec::new();
    let mut queue = VecDeque::from([root]);
    while let Some(idx) = queue.pop_front() {
        let succs = store.successors(idx);
        if succs.is_empty() {
            let witness = store.lift(&store.path_to(idx), None)?;
            return Ok(Verdict::violation(ViolationReason::Deadlock, witness, store.stats()));
        }
        let mut out = Vec::with_capacity(succs.len());
        for (event, succ) in succs {
            if finish(c, &succ) {
                continue;
            }
            let (to, new) = store.insert(succ, Some((idx, event)))?;
            if new {
                queue.push_back(to);
            }
            out.push((event, to));
        }
        if edges.len() <= idx as usize {
            edges.resize(idx as usize + 1, Vec::new());
        }
        edges[idx as usize] = out;
    }
    edges.resize(store.len(), Vec::new());
    match find_cycle(&edges, root) {
        None => Ok(Verdict::pass(store.stats())),
        Some(cycle) => {
            let entry = cycle[0];
            let path = store.path_to(entry);
            let around: Vec<ProtocolState> = cycle[1..].iter().map(|&i| *store.state(i)).collect();
            let witness = store.lift(&path, Some(&around))?;
            Ok(Verdict::violation(ViolationReason::NonProgressCycle, witness, store.stats()))
        }
    }
}

/// Iterative depth-first search for a cycle reachable from `root`. Returns
/// the cycle's nodes starting at the node the back edge points to.
pub(crate) fn find_cycle(edges: &[Vec<(Event, u32)>], root: u32) -> Option<Vec<u32>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        OnStack,
        Done,
    }
    let mut mark = vec![Mark::New; edges.len()];
    let mut stack: Vec<(u32, usize)> = vec![(root, 0)];
    mark[root as usize] = Mark::OnStack;
    while let Some(&mut (node, ref mut next_edge)) = stack.last_mut() {
        let out = &edges[node as usize];
        if *next_edge == out.len() {
            mark[node as usize] = Mark::Done;
            stack.pop();
            continue;
        }
        let (_, to) = out[*next_edge];
        *next_edge += 1;
        match mark[to as usize] {
            Mark::New => {
                mark[to as usize] = Mark::OnStack;
                stack.push((to, 0));
            }
            Mark::OnStack => {
                let start = stack.iter().position(|&(n, _)| n == to).expect("on stack");
                return Some(stack[start..].iter().map(|&(n, _)| n).collect());
            }
            Mark::Done => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::Outcome;

    fn graph(adj: &[&[u32]]) -> Vec<Vec<(Event, u32)>> {
        adj.iter()
            .map(|outs| outs.iter().map(|&t| (Event::explorer(0, 0), t)).collect())
            .collect()
    }

    #[test]
    fn finds_cycles() {
        assert_eq!(find_cycle(&graph(&[&[1], &[2], &[1]]), 0), Some(vec![1, 2]));
        assert_eq!(find_cycle(&graph(&[&[0]]), 0), Some(vec![0]));
        assert_eq!(find_cycle(&graph(&[&[1, 2], &[2], &[]]), 0), None);
        // unreachable cycle is ignored
        assert_eq!(find_cycle(&graph(&[&[], &[2], &[1]]), 0), None);
    }

    #[test]
    fn two_node_terminates() {
        let c = Config::from_edges(2, 0, &[(0, 1)]).unwrap();
        for v in Variant::ALL {
            let verdict = check_termination(&c, v, &CheckOptions::default()).unwrap();
            assert_eq!(verdict.outcome, Outcome::Pass);
        }
    }

    #[test]
    fn single_node_terminates_immediately() {
        let c = Config::from_edges(1, 0, &[]).unwrap();
        let verdict = check_termination(&c, Variant::Fixed, &CheckOptions::default()).unwrap();
        assert!(verdict.passed());
        assert_eq!(verdict.stats.states, 1);
    }
}
