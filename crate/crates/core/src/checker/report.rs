//! JSON form of sweep reports.

use serde::{Deserialize, Serialize};

use super::{ConfigResult, Property, SweepOutcome, SweepReport, ViolationReason};
use crate::echo::Variant;
use crate::netconfig::Config;
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigResultJson {
    pub config: Config,
    pub outcome: String,
    pub reason: Option<String>,
    pub witness: Option<Trace>,
    pub states: usize,
    pub transitions: usize,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub property: Property,
    pub variant: Variant,
    pub max_nodes: usize,
    pub results: Vec<ConfigResultJson>,
    pub violations: usize,
}

impl ConfigResult {
    /// With `timing` off, `millis` is written as 0 so output is reproducible.
    pub fn to_json(&self, timing: bool) -> ConfigResultJson {
        ConfigResultJson {
            config: self.config.clone(),
            outcome: self.outcome.as_str().to_string(),
            reason: self.reason.map(|r| r.as_str().to_string()),
            witness: self.witness.clone(),
            states: self.stats.states,
            transitions: self.stats.transitions,
            millis: if timing {
                self.stats.elapsed.as_millis() as u64
            } else {
                0
            },
        }
    }
}

impl SweepReport {
    pub fn to_json(&self, timing: bool) -> ReportJson {
        ReportJson {
            property: self.property,
            variant: self.variant,
            max_nodes: self.max_nodes,
            results: self.results.iter().map(|r| r.to_json(timing)).collect(),
            violations: self.violation_count(),
        }
    }
}

impl ConfigResultJson {
    pub fn outcome(&self) -> Option<SweepOutcome> {
        [SweepOutcome::Pass, SweepOutcome::Violation, SweepOutcome::Inconclusive]
            .into_iter()
            .find(|o| o.as_str() == self.outcome)
    }

    pub fn reason(&self) -> Option<ViolationReason> {
        self.reason.as_deref().and_then(ViolationReason::parse)
    }
}
