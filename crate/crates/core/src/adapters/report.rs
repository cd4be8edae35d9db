use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::EngineError;
use crate::message::Word;
use crate::params::ModelKind;
use crate::routing::RoutingError;
use crate::trace::RunResult;

use super::Assignment;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdapterError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error("simulation refused: {0}")]
    Hypothesis(String),
    #[error("native run has {0} violation(s); nothing to simulate")]
    NativeViolations(usize),
}

/// Outcome of running a program on another model, with the bound checks
/// made on the simulated execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub source: ModelKind,
    pub target: ModelKind,
    pub algorithm: String,
    pub native: RunResult,
    pub simulated: RunResult,
    /// Simulated outputs regrouped per source participant; equal to
    /// `native.outputs` when the simulation is faithful.
    pub simulated_outputs: Vec<Vec<Word>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Assignment>,
    pub bound_checks: BTreeMap<String, bool>,
    pub measured_constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub flags: Vec<String>,
}

impl SimulationReport {
    pub fn failed_checks(&self) -> Vec<&str> {
        self.bound_checks
            .iter()
            .filter(|(_, &ok)| !ok)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.failed_checks().is_empty() && self.simulated.is_clean()
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} -> {} ({})\nnative rounds: {}\nsimulated rounds: {}\nsimulated participants: {}\n",
            self.source,
            self.target,
            self.algorithm,
            self.native.rounds,
            self.simulated.rounds,
            self.simulated.params.p
        );
        for (k, ok) in &self.bound_checks {
            out += &format!("{k}: {}\n", if *ok { "ok" } else { "FAILED" });
        }
        for (k, v) in &self.measured_constants {
            out += &format!("{k} = {v:.3}\n");
        }
        for f in &self.flags {
            out += &format!("flag: {f}\n");
        }
        out
    }
}
