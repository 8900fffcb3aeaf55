//! Randomized model invariants, run with a fixed case count.

use std::sync::OnceLock;

use echocheck::netconfig::Permutation;
use echocheck::*;
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestRunner};

pub const CASES: u32 = 1000;

fn classes() -> &'static [Config] {
    static CONFIGS: OnceLock<Vec<Config>> = OnceLock::new();
    CONFIGS.get_or_init(|| enumerate_canonical(5).unwrap())
}

fn permutation(n: usize, keys: &[u32]) -> Permutation {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (keys[i], i));
    Permutation::new(order).unwrap()
}

fn config() -> impl Strategy<Value = Config> {
    (0..classes().len(), prop::collection::vec(any::<u32>(), 5)).prop_map(|(i, keys)| {
        let c = &classes()[i];
        relabel(c, &permutation(c.node_count(), &keys))
    })
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Chang), Just(Variant::Fixed)]
}

fn schedule() -> impl Strategy<Value = Vec<u16>> {
    prop::collection::vec(any::<u16>(), 0..40)
}

fn walk(c: &Config, v: Variant, choices: &[u16]) -> Vec<ProtocolState> {
    let mut s = initial_state(c, v).unwrap();
    let mut out = vec![s];
    for &choice in choices {
        let enabled = enabled_events(c, &s);
        if enabled.is_empty() {
            break;
        }
        s = apply_event(c, &s, &enabled[choice as usize % enabled.len()]).unwrap();
        out.push(s);
    }
    out
}

fn runner() -> TestRunner {
    TestRunner::new(RunnerConfig {
        cases: CASES,
        failure_persistence: None,
        ..RunnerConfig::default()
    })
}

/// Applies `step_check` to every state of a random walk and each of its
/// successors.
fn over_steps(
    check: impl Fn(&Config, &ProtocolState, &ProtocolState) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    runner()
        .run(&(config(), variant(), schedule()), |(c, v, choices)| {
            for s in walk(&c, v, &choices) {
                for e in enabled_events(&c, &s) {
                    check(&c, &s, &apply_event(&c, &s, &e).unwrap())?;
                }
            }
            Ok(())
        })
        .map(|_| CASES)
        .map_err(|e| e.to_string())
}

pub fn received_monotone() -> Result<u32, String> {
    over_steps(|c, s, t| {
        for n in c.nodes() {
            prop_assert!(s.received(n).is_subset(t.received(n)));
        }
        Ok(())
    })
}

pub fn parent_written_once() -> Result<u32, String> {
    over_steps(|c, s, t| {
        for n in c.nodes() {
            if s.parent(n).is_some() {
                prop_assert_eq!(s.parent(n), t.parent(n));
            }
        }
        Ok(())
    })
}

pub fn finish_stable() -> Result<u32, String> {
    over_steps(|c, s, t| {
        if finish(c, s) {
            prop_assert!(finish(c, t));
        }
        Ok(())
    })
}

pub fn well_formed_preserved() -> Result<u32, String> {
    over_steps(|c, s, t| {
        prop_assert!(well_formed(c, s) && well_formed(c, t));
        Ok(())
    })
}

pub fn canonical_relabeling_invariant() -> Result<u32, String> {
    runner()
        .run(&(config(), prop::collection::vec(any::<u32>(), 5)), |(c, keys)| {
            let canon = canonical_form(&c).unwrap();
            let renamed = relabel(&c, &permutation(c.node_count(), &keys));
            prop_assert_eq!(&canonical_form(&renamed).unwrap(), &canon);
            Ok(())
        })
        .map(|_| CASES)
        .map_err(|e| e.to_string())
}

/// Checker witnesses for every class up to four nodes replay, reach their
/// target, and keep doing so after a random relabeling.
pub fn witnesses_replay() -> Result<u32, String> {
    let small = &classes()[..16];
    let mut witnesses = Vec::new();
    for c in small {
        for v in Variant::ALL {
            let opts = CheckOptions::default();
            let run = shortest_trace_to(c, v, Target::Finish, &opts).unwrap().unwrap();
            let bad = check_correctness(c, v, &opts).unwrap().witness;
            witnesses.push((c.clone(), v, run, bad));
        }
    }
    runner()
        .run(&(0..witnesses.len(), prop::collection::vec(any::<u32>(), 5)), |(i, keys)| {
            let (c, v, run, bad) = &witnesses[i];
            let p = permutation(c.node_count(), &keys);
            let renamed = relabel(c, &p);
            let moved = |t: &Trace| {
                let events: Vec<Event> = t
                    .events()
                    .iter()
                    .map(|e| Event::new(p.apply(e.node), e.kind, p.apply(e.from)))
                    .collect();
                Trace::replay(&renamed, *v, &events, None)
            };
            prop_assert!(run.validate().is_ok());
            prop_assert!(finish(c, run.last_state()));
            let run2 = moved(run).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(finish(&renamed, run2.last_state()));
            if let Some(bad) = bad {
                prop_assert!(bad.validate().is_ok());
                prop_assert!(Target::FinishAndNotSpanningTree.holds(c, bad.last_state()));
                let bad2 = moved(bad).map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert!(Target::FinishAndNotSpanningTree.holds(&renamed, bad2.last_state()));
            }
            Ok(())
        })
        .map(|_| CASES)
        .map_err(|e| e.to_string())
}
