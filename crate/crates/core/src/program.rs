//! The algorithm interface shared by all four models.

use crate::message::{Envelope, Message, Word};

/// Context handed to a participant for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundCtx {
    pub id: usize,
    /// 1-based round index.
    pub round: usize,
    pub participants: usize,
}

/// Result of one round of local computation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Step {
    pub outbox: Vec<Envelope>,
    pub halt: bool,
}

impl Step {
    pub fn send(outbox: Vec<Envelope>) -> Self {
        Step {
            outbox,
            halt: false,
        }
    }

    pub fn halt() -> Self {
        Step {
            outbox: Vec::new(),
            halt: true,
        }
    }
}

/// A deterministic per-participant state machine.
///
/// In round `r` every participant runs [`on_round`](NodeProgram::on_round) on
/// the messages sent to it in round `r - 1` (the inbox is ordered by source,
/// then by the sender's emission order), then the engine delivers the
/// outboxes. The run ends after the first round in which every participant
/// votes to halt; outboxes of that final round are still sent and accounted
/// but never processed. The number of rounds executed is the round count `T`.
pub trait NodeProgram: Sync {
    type State: Clone + Send + Sync;

    fn name(&self) -> &str;

    /// Builds the initial state from the participant's local input: the sorted
    /// neighbor list for CONGEST/clique nodes, the stored words for machines.
    fn init(&self, id: usize, input: &[Word]) -> Self::State;

    fn on_round(&self, ctx: RoundCtx, state: &mut Self::State, inbox: &[Message]) -> Step;

    fn output(&self, state: &Self::State) -> Vec<Word>;

    /// Words of retained memory held by `state`.
    fn space_words(&self, state: &Self::State) -> usize;
}
