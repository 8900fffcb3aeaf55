//! Checking one property over every canonical configuration.

use rayon::prelude::*;

use super::{check, CheckError, CheckOptions, Outcome, Property, Stats, ViolationReason};
use crate::echo::Variant;
use crate::netconfig::{enumerate_canonical, Config, ConfigError};
use crate::trace::Trace;

/// Largest node bound accepted by [`sweep`].
pub const SWEEP_LIMIT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepOutcome {
    Pass,
    Violation,
    /// The state budget ran out before the check completed.
    Inconclusive,
}

impl SweepOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepOutcome::Pass => "pass",
            SweepOutcome::Violation => "violation",
            SweepOutcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConfigResult {
    pub config: Config,
    pub outcome: SweepOutcome,
    pub reason: Option<ViolationReason>,
    pub witness: Option<Trace>,
    pub stats: Stats,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub variant: Variant,
    pub property: Property,
    pub max_nodes: usize,
    /// One entry per configuration, in enumeration order.
    pub results: Vec<ConfigResult>,
}

impl SweepReport {
    pub fn violations(&self) -> impl Iterator<Item = &ConfigResult> {
        self.results
            .iter()
            .filter(|r| r.outcome == SweepOutcome::Violation)
    }

    pub fn violation_count(&self) -> usize {
        self.violations().count()
    }

    pub fn inconclusive_count(&self) -> usize {
        self.results
            .iter()
            .filter(|r| r.outcome == SweepOutcome::Inconclusive)
            .count()
    }

    pub fn totals(&self) -> Stats {
        let mut total = Stats::default();
        for r in &self.results {
            total.add(&r.stats);
        }
        total
    }
}

/// Checks one configuration, folding budget exhaustion into an inconclusive
/// result.
pub fn check_one(
    config: &Config,
    variant: Variant,
    property: Property,
    opts: &CheckOptions,
) -> Result<ConfigResult, CheckError> {
    match check(config, variant, property, opts) {
        Ok(verdict) => Ok(ConfigResult {
            config: config.clone(),
            outcome: match verdict.outcome {
                Outcome::Pass => SweepOutcome::Pass,
                Outcome::Violation => SweepOutcome::Violation,
            },
            reason: verdict.reason,
            witness: verdict.witness,
            stats: verdict.stats,
        }),
        Err(CheckError::BudgetExceeded { stats, .. }) => Ok(ConfigResult {
            config: config.clone(),
            outcome: SweepOutcome::Inconclusive,
            reason: None,
            witness: None,
            stats,
        }),
        Err(e) => Err(e),
    }
}

/// Runs `property` on every configuration of [`enumerate_canonical`]
/// (`max_nodes`). Configurations are checked in parallel; the report keeps
/// enumeration order.
pub fn sweep(
    max_nodes: usize,
    variant: Variant,
    property: Property,
    opts: &CheckOptions,
) -> Result<SweepReport, CheckError> {
    if max_nodes == 0 || max_nodes > SWEEP_LIMIT {
        return Err(ConfigError::ResourceLimit {
            requested: max_nodes,
            limit: SWEEP_LIMIT,
        }
        .into());
    }
    let configs = enumerate_canonical(max_nodes)?;
    let results = configs
        .par_iter()
        .map(|c| check_one(c, variant, property, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepReport {
        variant,
        property,
        max_nodes,
        results,
    })
}
