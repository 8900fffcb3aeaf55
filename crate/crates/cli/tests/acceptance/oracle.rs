//! Reference procedures the checker is compared against. They rebuild the
//! full reachable graph with a plain hash map and share nothing with the
//! checker's search code.

use std::collections::{HashMap, VecDeque};

use echocheck::{apply_event, enabled_events, finish, initial_state, spanning_tree, Config, ProtocolState, Variant};

pub struct Graph {
    pub states: Vec<ProtocolState>,
    pub succ: Vec<Vec<usize>>,
    pub dist: Vec<usize>,
}

pub fn reachable(c: &Config, v: Variant) -> Graph {
    let init = initial_state(c, v).unwrap();
    let mut index = HashMap::from([(init, 0usize)]);
    let mut states = vec![init];
    let mut succ = vec![Vec::new()];
    let mut dist = vec![0];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let s = states[i];
        for e in enabled_events(c, &s) {
            let t = apply_event(c, &s, &e).unwrap();
            let j = *index.entry(t).or_insert_with(|| {
                states.push(t);
                succ.push(Vec::new());
                dist.push(dist[i] + 1);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            succ[i].push(j);
        }
    }
    Graph { states, succ, dist }
}

/// Some reachable state has finished without forming a spanning tree.
pub fn correctness_violated(c: &Config, g: &Graph) -> bool {
    g.states.iter().any(|s| finish(c, s) && !spanning_tree(c, s))
}

/// Fewest states on a run from the initial state to a finished state.
pub fn shortest_finish(c: &Config, g: &Graph) -> Option<usize> {
    (0..g.states.len())
        .filter(|&i| finish(c, &g.states[i]))
        .map(|i| g.dist[i] + 1)
        .min()
}

/// Termination fails when an unfinished state has no successor, or when
/// unfinished states form a cycle (a nontrivial strongly connected
/// component or a self-loop).
pub fn termination_violated(c: &Config, g: &Graph) -> bool {
    let open: Vec<bool> = g.states.iter().map(|s| !finish(c, s)).collect();
    if (0..g.states.len()).any(|i| open[i] && g.succ[i].is_empty()) {
        return true;
    }
    let edges: Vec<Vec<usize>> = (0..g.states.len())
        .map(|i| {
            if open[i] {
                g.succ[i].iter().copied().filter(|&j| open[j]).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    tarjan(&edges)
        .iter()
        .any(|comp| comp.len() > 1 || edges[comp[0]].contains(&comp[0]))
}

fn tarjan(edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct T<'a> {
        edges: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(t: &mut T, v: usize) {
        t.index[v] = Some(t.next);
        t.low[v] = t.next;
        t.next += 1;
        t.stack.push(v);
        t.on_stack[v] = true;
        for &w in &t.edges[v] {
            match t.index[w] {
                None => {
                    visit(t, w);
                    t.low[v] = t.low[v].min(t.low[w]);
                }
                Some(iw) if t.on_stack[w] => t.low[v] = t.low[v].min(iw),
                _ => {}
            }
        }
        if Some(t.low[v]) == t.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = t.stack.pop().unwrap();
                t.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            t.out.push(comp);
        }
    }
    let n = edges.len();
    let mut t = T {
        edges,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            visit(&mut t, v);
        }
    }
    t.out
}

/// Connected labeled graphs on `k` nodes, by union-find over every edge
/// subset.
pub fn connected_graphs(k: usize) -> u64 {
    let slots: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let mut count = 0;
    for mask in 0u64..(1 << slots.len()) {
        let mut root: Vec<usize> = (0..k).collect();
        fn find(root: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while root[x] != x {
                root[x] = root[root[x]];
                x = root[x];
            }
            x
        }
        let mut parts = k;
        for (b, &(i, j)) in slots.iter().enumerate() {
            if mask >> b & 1 == 1 {
                let (ri, rj) = (find(&mut root, i), find(&mut root, j));
                if ri != rj {
                    root[ri] = rj;
                    parts -= 1;
                }
            }
        }
        if parts == 1 {
            count += 1;
        }
    }
    count
}

/// Labeled configurations over a universe of `u` identifiers, counted by
/// listing every node subset, every graph on it, and every initiator.
pub fn labeled_configs(u: usize) -> u64 {
    let mut total = 0;
    for subset in 1u32..(1 << u) {
        let k = subset.count_ones() as usize;
        total += k as u64 * connected_graphs(k);
    }
    total
}
