//! Runtime-selected experiment strategies. Each experiment tag is one
//! implementation of [`Experiment`], registered by name; the config's
//! `experiment` field picks the strategy.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::config::{CliError, Resolved};
use crate::params::ParamReader;

/// How the run ended, before output formatting. Maps one-to-one onto the
/// exit codes 0/1/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Hold,
    Violation,
    HypothesisFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Hold => 0,
            Status::Violation => 1,
            Status::HypothesisFailed => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Hold => "hold",
            Status::Violation => "violation",
            Status::HypothesisFailed => "hypothesis_failed",
        }
    }
}

/// One finished run: the CSV body (header included), the experiment-specific
/// JSON results object, and the verdict.
pub struct Outcome {
    pub csv: String,
    pub results: Value,
    pub status: Status,
}

pub trait Experiment {
    fn name(&self) -> &'static str;
    fn run(&self, params: &ParamReader, resolved: &Resolved) -> Result<Outcome, CliError>;
}

pub struct ExperimentRegistry {
    entries: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    /// All shipped experiments, keyed by tag.
    pub fn standard() -> Self {
        let mut entries: BTreeMap<&'static str, Box<dyn Experiment>> = BTreeMap::new();
        for exp in crate::experiments::all() {
            let name = exp.name();
            let clash = entries.insert(name, exp);
            assert!(clash.is_none(), "duplicate experiment tag {name}");
        }
        ExperimentRegistry { entries }
    }

    pub fn get(&self, name: &str) -> Result<&dyn Experiment, CliError> {
        self.entries.get(name).map(Box::as_ref).ok_or_else(|| {
            let known: Vec<&str> = self.entries.keys().copied().collect();
            CliError::Input(format!(
                "unknown experiment \"{name}\"; known tags: {}",
                known.join(", ")
            ))
        })
    }
}
