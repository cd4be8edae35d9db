//! Execution traces, violations and run results.

use serde::{Deserialize, Serialize};

use crate::message::Word;
use crate::params::ModelParams;
use crate::routing::RoutingEpisode;

/// Aggregated transfers of one round: `(src, dst, words)`, one entry per
/// ordered pair, sorted. Self-addressed messages are free and not listed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub transfers: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub per_round: Vec<RoundRecord>,
    /// `space_high_water[0]` is the footprint right after initialization;
    /// entry `r` is the footprint at the end of round `r`. One value per
    /// participant.
    pub space_high_water: Vec<Vec<usize>>,
}

impl RoundTrace {
    pub fn rounds(&self) -> usize {
        self.per_round.len()
    }

    pub fn sent_words(&self, round: usize, participants: usize) -> Vec<usize> {
        let mut out = vec![0; participants];
        for &(src, _, w) in &self.per_round[round - 1].transfers {
            out[src] += w;
        }
        out
    }

    pub fn recv_words(&self, round: usize, participants: usize) -> Vec<usize> {
        let mut out = vec![0; participants];
        for &(_, dst, w) in &self.per_round[round - 1].transfers {
            out[dst] += w;
        }
        out
    }

    /// Largest `max(sent, received)` of any participant in any round.
    pub fn max_traffic(&self) -> usize {
        let participants = self.participants();
        (1..=self.rounds())
            .flat_map(|r| {
                let sent = self.sent_words(r, participants);
                let recv = self.recv_words(r, participants);
                sent.into_iter().zip(recv).map(|(s, r)| s.max(r))
            })
            .max()
            .unwrap_or(0)
    }

    pub fn max_space(&self) -> usize {
        self.space_high_water
            .iter()
            .flat_map(|row| row.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn total_words(&self) -> usize {
        self.per_round
            .iter()
            .flat_map(|r| r.transfers.iter().map(|t| t.2))
            .sum()
    }

    fn participants(&self) -> usize {
        let from_space = self.space_high_water.first().map_or(0, Vec::len);
        let from_transfers = self
            .per_round
            .iter()
            .flat_map(|r| r.transfers.iter().map(|&(s, d, _)| s.max(d) + 1))
            .max()
            .unwrap_or(0);
        from_space.max(from_transfers)
    }

    /// Concatenates the rounds of `other` after the rounds of `self`.
    pub fn append_rounds(&mut self, other: &RoundTrace) {
        self.per_round.extend(other.per_round.iter().cloned());
        self.space_high_water
            .extend(other.space_high_water.iter().skip(1).cloned());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ViolationKind {
    /// More than one word on an ordered pair in one round (CONGEST/clique).
    PairCapacity { src: usize, dst: usize },
    /// CONGEST transfer between non-adjacent vertices.
    NonEdge { src: usize, dst: usize },
    SendBudget { participant: usize },
    RecvBudget { participant: usize },
    SpaceBudget { participant: usize },
    /// MPC law `p <= s`.
    MachinesExceedSpace,
    /// MPC law `p * s <= c_total * l^(1+delta) * polylog(l)`.
    TotalSpace,
}

impl ViolationKind {
    fn sort_key(&self) -> (u8, usize, usize) {
        match *self {
            ViolationKind::MachinesExceedSpace => (0, 0, 0),
            ViolationKind::TotalSpace => (1, 0, 0),
            ViolationKind::PairCapacity { src, dst } => (2, src, dst),
            ViolationKind::NonEdge { src, dst } => (3, src, dst),
            ViolationKind::SendBudget { participant } => (4, participant, 0),
            ViolationKind::RecvBudget { participant } => (5, participant, 0),
            ViolationKind::SpaceBudget { participant } => (6, participant, 0),
        }
    }
}

/// A budget breach. `round` 0 denotes a check made before the first round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub round: usize,
    #[serde(flatten)]
    pub kind: ViolationKind,
    pub measured: f64,
    pub allowed: f64,
    /// `measured / allowed`; `None` when nothing was allowed at all.
    pub ratio: Option<f64>,
}

impl Violation {
    pub fn new(round: usize, kind: ViolationKind, measured: f64, allowed: f64) -> Self {
        let ratio = (allowed > 0.0).then(|| measured / allowed);
        Violation {
            round,
            kind,
            measured,
            allowed,
            ratio,
        }
    }

    pub fn sort_key(&self) -> (usize, (u8, usize, usize)) {
        (self.round, self.kind.sort_key())
    }
}

pub(crate) fn sort_violations(v: &mut [Violation]) {
    v.sort_by_key(Violation::sort_key);
}

/// Outcome of one engine run. Serializes to the run-report JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub model: String,
    pub params: ModelParams,
    pub rounds: usize,
    pub violations: Vec<Violation>,
    #[serde(flatten)]
    pub trace: RoundTrace,
    pub outputs: Vec<Vec<Word>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routing: Option<Vec<RoutingEpisode>>,
}

impl RunResult {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Short hex digest of the outputs (FNV-1a), for summaries.
    pub fn output_digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for (i, out) in self.outputs.iter().enumerate() {
            for w in std::iter::once(i as u64)
                .chain(std::iter::once(out.len() as u64))
                .chain(out.iter().copied())
            {
                for b in w.to_le_bytes() {
                    h ^= b as u64;
                    h = h.wrapping_mul(0x0100_0000_01b3);
                }
            }
        }
        format!("{h:016x}")
    }

    /// Human-readable one-screen summary.
    pub fn summary(&self) -> String {
        format!(
            "model: {}\nparticipants: {}\nrounds: {}\nmax traffic (words/round): {}\nmax space (words): {}\ntotal words moved: {}\nviolations: {}\noutput digest: {}\n",
            self.model,
            self.params.p,
            self.rounds,
            self.trace.max_traffic(),
            self.trace.max_space(),
            self.trace.total_words(),
            self.violations.len(),
            self.output_digest()
        )
    }
}
