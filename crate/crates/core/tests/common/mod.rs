#![allow(dead_code)]

use echocheck::netconfig::Permutation;
use echocheck::{relabel, Config, NodeSet};

/// Every permutation of `0..n` that sends `root` to 0.
pub fn root_first_permutations(n: usize, root: usize) -> Vec<Permutation> {
    let others: Vec<usize> = (0..n).filter(|&x| x != root).collect();
    let mut out = Vec::new();
    permute(&others, &mut Vec::new(), &mut |order| {
        let mut mapping = vec![0; n];
        mapping[root] = 0;
        for (new, &old) in order.iter().enumerate() {
            mapping[old] = new + 1;
        }
        out.push(Permutation::new(mapping).unwrap());
    });
    out
}

fn permute(rest: &[usize], acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if rest.is_empty() {
        f(acc);
        return;
    }
    for i in 0..rest.len() {
        let mut remaining = rest.to_vec();
        let x = remaining.remove(i);
        acc.push(x);
        permute(&remaining, acc, f);
        acc.pop();
    }
}

/// Brute-force canonical form: try every relabeling with the initiator
/// first and keep the smallest encoding.
pub fn brute_canonical(c: &Config) -> Config {
    root_first_permutations(c.node_count(), c.initiator())
        .iter()
        .map(|p| relabel(c, p))
        .min_by_key(|r| r.encoding())
        .unwrap()
}

/// All labeled connected graphs on `k` nodes rooted at `root`.
pub fn labeled_connected(k: usize, root: usize) -> Vec<Config> {
    let slots: Vec<(usize, usize)> = (0..k).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    (0u64..1 << slots.len())
        .filter_map(|mask| {
            let edges: Vec<_> = slots
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &e)| e)
                .collect();
            let c = Config::from_edges(k, root, &edges).unwrap();
            echocheck::is_valid_config(&c).then_some(c)
        })
        .collect()
}

/// Counts (node subset, initiator, adjacency function) triples over a
/// universe, keeping those that satisfy the configuration assumptions.
pub fn brute_labeled_count(universe: usize) -> u64 {
    let mut total = 0;
    for subset in 1u32..1 << universe {
        let k = subset.count_ones() as usize;
        // valuations are independent of which identifiers are chosen, so
        // each subset is checked on 0..k
        for init in 0..k {
            let functions = 1u64 << (k * k);
            for f in 0..functions {
                let adjacency: Vec<NodeSet> = (0..k)
                    .map(|n| NodeSet::from_bits(((f >> (n * k)) & ((1 << k) - 1)) as u8))
                    .collect();
                let c = Config::new(k, init, adjacency).unwrap();
                if echocheck::is_valid_config(&c) {
                    total += 1;
                }
            }
        }
    }
    total
}

pub fn complete(n: usize) -> Config {
    let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    Config::from_edges(n, 0, &edges).unwrap()
}

/// The network with edges a-b, a-c, b-c, b-d, c-d and initiator a.
pub fn buggy() -> Config {
    Config::from_edges(4, 0, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap()
}

/// `buggy()` without the c-d edge.
pub fn buggy_without_cd() -> Config {
    Config::from_edges(4, 0, &[(0, 1), (0, 2), (1, 2), (1, 3)]).unwrap()
}
