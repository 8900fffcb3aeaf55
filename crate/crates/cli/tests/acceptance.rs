//! Exit criteria. Each test prints one `PASS`/`FAIL` line to stderr, even
//! when the harness captures output.

#[path = "acceptance/oracle.rs"]
mod oracle;
#[path = "acceptance/props.rs"]
mod props;

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use echocheck::*;

/// Runs `body`, prints its verdict line and fails the test on a miss or on
/// exceeding `limit`.
fn criterion(id: u32, name: &str, limit: Duration, body: impl FnOnce() -> Result<String, String>) {
    let started = Instant::now();
    let result = body();
    let elapsed = started.elapsed();
    let result = match result {
        Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}")),
        other => other,
    };
    let (tag, detail) = match &result {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    let line = format!("[acceptance] {tag} {id}. {name} ({elapsed:.1?}): {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(d) = result {
        panic!("criterion {id} failed: {d}");
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn class_counts(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().map(|&n| enumerate_canonical(n).unwrap().len()).collect()
}

#[test]
fn c1_symmetric_counts() {
    criterion(1, "canonical configuration counts", Duration::from_secs(30), || {
        let expected = vec![5, 16, 74, 531];
        let got = class_counts(&[3, 4, 5, 6]);
        ensure!(got == expected, "expected {expected:?}, got {got:?}");
        Ok(format!("{got:?}"))
    });
}

#[test]
fn c2_labeled_counts() {
    criterion(2, "labeled configuration counts", Duration::from_secs(60), || {
        let got: Vec<u64> = (3..=5).map(|u| count_labeled(u).unwrap()).collect();
        ensure!(got == [21, 216, 4545], "expected [21, 216, 4545], got {got:?}");
        for u in 1..=4 {
            let (formula, brute) = (count_labeled(u).unwrap(), oracle::labeled_configs(u));
            ensure!(formula == brute, "universe {u}: formula {formula}, enumeration {brute}");
        }
        // per-k components by edge-subset enumeration, combined by hand
        let by_parts: u64 = (1..=6u64)
            .map(|k| {
                let choose = (0..k).fold(1, |acc, i| acc * (6 - i) / (i + 1));
                choose * k * oracle::connected_graphs(k as usize)
            })
            .sum();
        let six = count_labeled(6).unwrap();
        ensure!(six == by_parts, "universe 6: formula {six}, components {by_parts}");
        ensure!(six == 184_620, "universe 6: {six} differs from recorded 184620");
        Ok(format!("{got:?}, universe 6 = {six}"))
    });
}

#[test]
fn c3_bug_reproduction() {
    criterion(3, "bug reproduction", Duration::from_secs(120), || {
        let report = sweep(4, Variant::Chang, Property::Correctness, &CheckOptions::default()).unwrap();
        let bad: Vec<&Config> = report.violations().map(|r| &r.config).collect();
        ensure!(bad.len() == 2, "expected 2 violations, got {}", bad.len());
        // a=0 b=1 c=2 d=3
        let full = Config::from_edges(4, 0, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
        let cut = Config::from_edges(4, 0, &[(0, 1), (0, 2), (1, 2), (1, 3)]).unwrap();
        let expected = [canonical_form(&full).unwrap(), canonical_form(&cut).unwrap()];
        for e in &expected {
            ensure!(bad.contains(&e), "{e} not among violations {bad:?}");
        }
        for r in report.violations() {
            let w = r.witness.as_ref().ok_or("violation without witness")?;
            w.validate().map_err(|e| e.to_string())?;
            let replayed = Trace::replay(&r.config, Variant::Chang, w.events(), None).map_err(|e| e.to_string())?;
            let last = replayed.last_state();
            ensure!(
                finish(&r.config, last) && !spanning_tree(&r.config, last),
                "witness for {} does not end in a bad finished state",
                r.config
            );
        }
        Ok(format!("violations {} and {}", expected[0], expected[1]))
    });
}

#[test]
fn c4_fix_verification() {
    criterion(4, "fixed variant verification", Duration::from_secs(300), || {
        let mut lines = Vec::new();
        for p in [Property::Correctness, Property::Termination] {
            let report = sweep(4, Variant::Fixed, p, &CheckOptions::default()).unwrap();
            ensure!(report.results.len() == 16, "{} configs checked", report.results.len());
            ensure!(
                report.violation_count() == 0 && report.inconclusive_count() == 0,
                "{p}: {} violations, {} inconclusive",
                report.violation_count(),
                report.inconclusive_count()
            );
            lines.push(format!("{p}: 16/16 pass"));
        }
        Ok(lines.join(", "))
    });
}

#[test]
fn c5_minimal_run() {
    criterion(5, "minimal finishing run", Duration::from_secs(60), || {
        let k4 = Config::from_edges(4, 0, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut lens = Vec::new();
        for v in [Variant::Fixed, Variant::Chang] {
            let t = shortest_trace_to(&k4, v, Target::Finish, &CheckOptions::default())
                .unwrap()
                .ok_or("finish unreachable")?;
            t.validate().map_err(|e| e.to_string())?;
            let reference = oracle::shortest_finish(&k4, &oracle::reachable(&k4, v));
            ensure!(Some(t.len()) == reference, "{v}: {} states, oracle {reference:?}", t.len());
            lens.push(t.len());
        }
        ensure!(lens[0] == 19, "fixed: expected 19 states, got {}", lens[0]);
        ensure!(lens[1] == 11, "chang: {} states differs from recorded 11", lens[1]);
        Ok(format!("fixed {} states, chang {} states", lens[0], lens[1]))
    });
}

#[test]
fn c6_stretch_five_nodes() {
    criterion(6, "five-node sweep with symmetry reduction", Duration::from_secs(30 * 60), || {
        let reduced = CheckOptions {
            symmetry: true,
            ..Default::default()
        };
        for v in Variant::ALL {
            for p in [Property::Correctness, Property::Termination] {
                let a = sweep(4, v, p, &CheckOptions::default()).unwrap();
                let b = sweep(4, v, p, &reduced).unwrap();
                for (x, y) in a.results.iter().zip(&b.results) {
                    ensure!(
                        x.outcome == y.outcome && x.reason == y.reason,
                        "{v} {p} {}: unreduced {:?}, reduced {:?}",
                        x.config,
                        x.outcome,
                        y.outcome
                    );
                }
            }
        }
        let report = sweep(5, Variant::Fixed, Property::Correctness, &reduced).unwrap();
        ensure!(report.results.len() == 74, "{} configs", report.results.len());
        ensure!(report.inconclusive_count() == 0, "{} inconclusive", report.inconclusive_count());
        Ok(format!(
            "74 configs, {} violations, {} states stored",
            report.violation_count(),
            report.totals().states
        ))
    });
}

#[test]
fn c7_oracle_agreement() {
    criterion(7, "checker agrees with reference procedures", Duration::from_secs(60), || {
        let mut compared = 0;
        for c in enumerate_canonical(3).unwrap() {
            for v in Variant::ALL {
                let g = oracle::reachable(&c, v);
                let opts = CheckOptions::default();
                let term = check_termination(&c, v, &opts).unwrap();
                let corr = check_correctness(&c, v, &opts).unwrap();
                ensure!(
                    term.passed() != oracle::termination_violated(&c, &g),
                    "termination disagrees on {c} {v}"
                );
                ensure!(
                    corr.passed() != oracle::correctness_violated(&c, &g),
                    "correctness disagrees on {c} {v}"
                );
                compared += 1;
            }
        }
        Ok(format!("{compared} config/variant pairs"))
    });
}

type Suite = fn() -> Result<u32, String>;

#[test]
fn c8_property_suites() {
    criterion(8, "randomized invariants", Duration::from_secs(600), || {
        let suites: [(&str, Suite); 6] = [
            ("received monotone", props::received_monotone),
            ("parent written once", props::parent_written_once),
            ("finish stable", props::finish_stable),
            ("well-formedness preserved", props::well_formed_preserved),
            ("canonical form ignores labels", props::canonical_relabeling_invariant),
            ("witnesses replay", props::witnesses_replay),
        ];
        let mut done = Vec::new();
        for (name, run) in suites {
            let cases = run().map_err(|e| format!("{name}: {e}"))?;
            ensure!(cases >= 1000, "{name}: only {cases} cases");
            done.push(format!("{name} x{cases}"));
        }
        Ok(done.join(", "))
    });
}

fn invoke(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_echocheck"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code(), out.stdout)
}

#[test]
fn c9_determinism() {
    criterion(9, "repeatable command output", Duration::from_secs(120), || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let k4 = dir.path().join("k4.cfg");
        std::fs::write(&k4, "n=4 init=0 edges=0-1,0-2,0-3,1-2,1-3,2-3\n").map_err(|e| e.to_string())?;
        let k4 = k4.to_str().unwrap();
        let commands: Vec<Vec<&str>> = vec![
            vec!["enumerate", "--max-nodes", "5"],
            vec!["enumerate", "--max-nodes", "4", "--format", "json"],
            vec!["check", "--property", "correctness", "--variant", "chang", "--max-nodes", "4", "--no-timing"],
            vec![
                "check", "--property", "termination", "--variant", "fixed", "--max-nodes", "4", "--no-timing",
                "--format", "json",
            ],
            vec!["run", "--config", k4, "--variant", "fixed", "--no-timing"],
            vec!["run", "--config", k4, "--variant", "chang", "--no-timing", "--format", "json"],
        ];
        for args in &commands {
            let first = invoke(args);
            let second = invoke(args);
            ensure!(!first.1.is_empty(), "{args:?} printed nothing");
            ensure!(first == second, "{args:?} differs between runs");
        }
        Ok(format!("{} invocations repeated byte-for-byte", commands.len()))
    });
}
