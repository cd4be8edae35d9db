//! Model kinds, budgets and the constant factors that turn asymptotic
//! budgets into concrete word counts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::message::default_word_bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Congest,
    Clique,
    Mpc,
    Semimpc,
}

impl ModelKind {
    pub fn is_mpc(self) -> bool {
        matches!(self, ModelKind::Mpc | ModelKind::Semimpc)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Congest => "congest",
            ModelKind::Clique => "clique",
            ModelKind::Mpc => "mpc",
            ModelKind::Semimpc => "semimpc",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "congest" => Ok(ModelKind::Congest),
            "clique" | "congestedclique" => Ok(ModelKind::Clique),
            "mpc" => Ok(ModelKind::Mpc),
            "semimpc" => Ok(ModelKind::Semimpc),
            _ => Err(format!("unknown model {s:?}")),
        }
    }
}

/// Multipliers for the O(.) budgets plus adapter knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Constants {
    /// Semi-MPC space per machine is `c_space * n` words.
    pub c_space: usize,
    /// Routing demand rows/columns may sum to `c_traffic * n` words.
    pub c_traffic: usize,
    /// MPC total space bound `c_total * l^(1+delta) * log2(l)^polylog_exp`.
    pub c_total: f64,
    pub polylog_exp: f64,
    /// CONGEST→semi-MPC machine count multiplier.
    pub c_m: f64,
    /// CONGEST→semi-MPC per-machine degree-load multiplier.
    pub c_load: usize,
    /// Rounds charged per routing episode for distributed schedule bookkeeping.
    pub surcharge: usize,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            c_space: 4,
            c_traffic: 4,
            c_total: 4.0,
            polylog_exp: 1.0,
            c_m: 2.0,
            c_load: 2,
            surcharge: 2,
        }
    }
}

impl Constants {
    /// Applies a `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = |_| format!("invalid value {value:?} for {key}");
        match key {
            "c_space" => self.c_space = value.parse().map_err(bad)?,
            "c_traffic" => self.c_traffic = value.parse().map_err(bad)?,
            "c_total" => self.c_total = value.parse().map_err(|_| format!("invalid value {value:?} for {key}"))?,
            "polylog_exp" => self.polylog_exp = value.parse().map_err(|_| format!("invalid value {value:?} for {key}"))?,
            "c_m" | "c_M" => self.c_m = value.parse().map_err(|_| format!("invalid value {value:?} for {key}"))?,
            "c_load" => self.c_load = value.parse().map_err(bad)?,
            "surcharge" => self.surcharge = value.parse().map_err(bad)?,
            _ => return Err(format!("unknown constant {key:?}")),
        }
        if self.c_space == 0 || self.c_traffic == 0 || self.c_load == 0 {
            return Err("multipliers must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kind: ModelKind,
    /// Vertex count of the input graph (word width and semi-MPC space derive from it).
    pub n: usize,
    /// Participants: nodes for CONGEST/clique, machines for MPC/semi-MPC.
    pub p: usize,
    /// Space per machine in words. Unused by CONGEST/clique.
    pub s: usize,
    pub word_bits: u32,
    pub delta: f64,
    /// Total input size in words.
    pub input_size: usize,
    pub round_cap: usize,
    pub constants: Constants,
}

impl ModelParams {
    fn base(kind: ModelKind, n: usize, p: usize, s: usize, constants: Constants) -> Self {
        ModelParams {
            kind,
            n,
            p,
            s,
            word_bits: default_word_bits(n),
            delta: 0.0,
            input_size: 0,
            round_cap: 10 * n + 100,
            constants,
        }
    }

    pub fn clique(n: usize, constants: Constants) -> Self {
        Self::base(ModelKind::Clique, n, n, 0, constants)
    }

    pub fn congest(n: usize, constants: Constants) -> Self {
        Self::base(ModelKind::Congest, n, n, 0, constants)
    }

    /// `p` machines with `s = c_space * n` words each.
    pub fn semi_mpc(n: usize, p: usize, constants: Constants) -> Self {
        Self::base(ModelKind::Semimpc, n, p, constants.c_space * n, constants)
    }

    pub fn mpc(n: usize, p: usize, s: usize, delta: f64, constants: Constants) -> Self {
        let mut params = Self::base(ModelKind::Mpc, n, p, s, constants);
        params.delta = delta;
        params
    }

    pub fn with_input_size(mut self, words: usize) -> Self {
        self.input_size = words;
        self
    }

    /// Upper bound on `p * s` for the MPC model.
    pub fn total_space_limit(&self) -> f64 {
        let l = self.input_size.max(2) as f64;
        self.constants.c_total * l.powf(1.0 + self.delta) * l.log2().powf(self.constants.polylog_exp)
    }
}
