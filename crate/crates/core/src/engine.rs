//! Round engines for the four models.
//!
//! All engines share one synchronous loop: every participant computes on its
//! inbox (in parallel), outboxes are validated and delivered in participant
//! order, the round's transfers are aggregated per ordered pair and checked
//! against the model's budgets. A round with violations aborts the run after
//! it has been recorded.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::Graph;
use crate::message::{fits_width, Message, Word};
use crate::params::{ModelKind, ModelParams};
use crate::program::{NodeProgram, RoundCtx, Step};
use crate::trace::{sort_violations, RoundRecord, RoundTrace, RunResult, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("{engine} engine cannot run {got} parameters")]
    ModelMismatch { engine: &'static str, got: ModelKind },
    #[error("expected {expected} participants, got {got}")]
    ParticipantMismatch { expected: usize, got: usize },
    #[error("no halt within the round cap of {cap} rounds")]
    RoundCap { cap: usize },
    #[error("round {round}: participant {src} addressed unknown participant {dst}")]
    UnknownDestination { round: usize, src: usize, dst: usize },
    #[error("round {round}: participant {src} sent an empty message to {dst}")]
    EmptyMessage { round: usize, src: usize, dst: usize },
    #[error("round {round}: word {value} from {src} to {dst} does not fit in {bits} bits")]
    WordOverflow {
        round: usize,
        src: usize,
        dst: usize,
        value: Word,
        bits: u32,
    },
}

/// Runs a congested-clique program. Node `v` starts from its sorted
/// neighbor list; every ordered pair may carry one word per round.
pub fn run_clique<P: NodeProgram>(
    prog: &P,
    g: &Graph,
    params: &ModelParams,
) -> Result<RunResult, EngineError> {
    if params.kind != ModelKind::Clique {
        return Err(EngineError::ModelMismatch {
            engine: "clique",
            got: params.kind,
        });
    }
    execute(prog, neighbor_inputs(g, params)?, params, None)
}

/// Clique run where each node's local input is given directly instead of
/// being derived from a graph.
pub fn run_clique_with_inputs<P: NodeProgram>(
    prog: &P,
    inputs: Vec<Vec<Word>>,
    params: &ModelParams,
) -> Result<RunResult, EngineError> {
    if params.kind != ModelKind::Clique {
        return Err(EngineError::ModelMismatch {
            engine: "clique",
            got: params.kind,
        });
    }
    if inputs.len() != params.p {
        return Err(EngineError::ParticipantMismatch {
            expected: params.p,
            got: inputs.len(),
        });
    }
    execute(prog, inputs, params, None)
}

/// Runs a CONGEST program: like the clique, but transfers must follow edges.
pub fn run_congest<P: NodeProgram>(
    prog: &P,
    g: &Graph,
    params: &ModelParams,
) -> Result<RunResult, EngineError> {
    if params.kind != ModelKind::Congest {
        return Err(EngineError::ModelMismatch {
            engine: "congest",
            got: params.kind,
        });
    }
    execute(prog, neighbor_inputs(g, params)?, params, Some(g))
}

/// Runs an MPC or semi-MPC program over caller-provided per-machine inputs.
/// Each machine may send and receive at most `s` words per round and hold at
/// most `s` words.
pub fn run_mpc<P: NodeProgram>(
    prog: &P,
    inputs: Vec<Vec<Word>>,
    params: &ModelParams,
) -> Result<RunResult, EngineError> {
    if !params.kind.is_mpc() {
        return Err(EngineError::ModelMismatch {
            engine: "mpc",
            got: params.kind,
        });
    }
    if inputs.len() != params.p {
        return Err(EngineError::ParticipantMismatch {
            expected: params.p,
            got: inputs.len(),
        });
    }
    execute(prog, inputs, params, None)
}

fn neighbor_inputs(g: &Graph, params: &ModelParams) -> Result<Vec<Vec<Word>>, EngineError> {
    if params.p != g.n() {
        return Err(EngineError::ParticipantMismatch {
            expected: g.n(),
            got: params.p,
        });
    }
    Ok((0..g.n())
        .map(|v| g.neighbors(v).iter().map(|&u| u as Word).collect())
        .collect())
}

fn start_violations(params: &ModelParams, initial_space: &[usize]) -> Vec<Violation> {
    let mut out = Vec::new();
    if !params.kind.is_mpc() {
        return out;
    }
    if params.p > params.s {
        out.push(Violation::new(
            0,
            ViolationKind::MachinesExceedSpace,
            params.p as f64,
            params.s as f64,
        ));
    }
    // Semi-MPC fixes s and leaves the machine count as a cost to report, so
    // the total-space law is only enforced for general MPC.
    if params.kind == ModelKind::Mpc {
        let total = (params.p * params.s) as f64;
        let limit = params.total_space_limit();
        if total > limit {
            out.push(Violation::new(0, ViolationKind::TotalSpace, total, limit));
        }
    }
    for (participant, &words) in initial_space.iter().enumerate() {
        if words > params.s {
            out.push(Violation::new(
                0,
                ViolationKind::SpaceBudget { participant },
                words as f64,
                params.s as f64,
            ));
        }
    }
    out
}

fn execute<P: NodeProgram>(
    prog: &P,
    inputs: Vec<Vec<Word>>,
    params: &ModelParams,
    graph: Option<&Graph>,
) -> Result<RunResult, EngineError> {
    let p = inputs.len();
    let mut states: Vec<P::State> = inputs
        .par_iter()
        .enumerate()
        .map(|(id, input)| prog.init(id, input))
        .collect();

    let initial_space: Vec<usize> = states.iter().map(|s| prog.space_words(s)).collect();
    let mut trace = RoundTrace {
        per_round: Vec::new(),
        space_high_water: vec![initial_space.clone()],
    };
    let mut violations = start_violations(params, &initial_space);
    let mut inboxes: Vec<Vec<Message>> = vec![Vec::new(); p];
    let mut round = 0;

    while violations.is_empty() {
        round += 1;
        if round > params.round_cap {
            return Err(EngineError::RoundCap {
                cap: params.round_cap,
            });
        }
        let steps: Vec<Step> = states
            .par_iter_mut()
            .zip(inboxes.par_iter())
            .enumerate()
            .map(|(id, (state, inbox))| {
                let ctx = RoundCtx {
                    id,
                    round,
                    participants: p,
                };
                prog.on_round(ctx, state, inbox)
            })
            .collect();

        let mut next: Vec<Vec<Message>> = vec![Vec::new(); p];
        let mut pair_load: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut all_halt = true;
        for (src, step) in steps.into_iter().enumerate() {
            all_halt &= step.halt;
            for env in step.outbox {
                let dst = env.dst;
                if dst >= p {
                    return Err(EngineError::UnknownDestination { round, src, dst });
                }
                if env.payload.is_empty() {
                    return Err(EngineError::EmptyMessage { round, src, dst });
                }
                if let Some(&value) = env.payload.iter().find(|&&w| !fits_width(w, params.word_bits)) {
                    return Err(EngineError::WordOverflow {
                        round,
                        src,
                        dst,
                        value,
                        bits: params.word_bits,
                    });
                }
                if src != dst {
                    *pair_load.entry((src, dst)).or_default() += env.payload.len();
                }
                next[dst].push(Message {
                    src,
                    dst,
                    payload: env.payload,
                    round,
                });
            }
        }

        let space: Vec<usize> = states.iter().map(|s| prog.space_words(s)).collect();
        violations = round_violations(round, &pair_load, &space, params, graph);
        trace.per_round.push(RoundRecord {
            transfers: pair_load.into_iter().map(|((s, d), w)| (s, d, w)).collect(),
        });
        trace.space_high_water.push(space);

        if all_halt {
            break;
        }
        inboxes = next;
    }

    sort_violations(&mut violations);
    Ok(RunResult {
        model: params.kind.name().to_string(),
        params: params.clone(),
        rounds: round,
        violations,
        trace,
        outputs: states.iter().map(|s| prog.output(s)).collect(),
        routing: None,
    })
}

fn round_violations(
    round: usize,
    pair_load: &BTreeMap<(usize, usize), usize>,
    space: &[usize],
    params: &ModelParams,
    graph: Option<&Graph>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    match params.kind {
        ModelKind::Clique | ModelKind::Congest => {
            for (&(src, dst), &words) in pair_load {
                if let Some(g) = graph {
                    if !g.has_edge(src, dst) {
                        out.push(Violation::new(
                            round,
                            ViolationKind::NonEdge { src, dst },
                            words as f64,
                            0.0,
                        ));
                    }
                }
                if words > 1 {
                    out.push(Violation::new(
                        round,
                        ViolationKind::PairCapacity { src, dst },
                        words as f64,
                        1.0,
                    ));
                }
            }
        }
        ModelKind::Mpc | ModelKind::Semimpc => {
            let p = space.len();
            let mut sent = vec![0usize; p];
            let mut recv = vec![0usize; p];
            for (&(src, dst), &words) in pair_load {
                sent[src] += words;
                recv[dst] += words;
            }
            let s = params.s as f64;
            for participant in 0..p {
                if sent[participant] > params.s {
                    out.push(Violation::new(
                        round,
                        ViolationKind::SendBudget { participant },
                        sent[participant] as f64,
                        s,
                    ));
                }
                if recv[participant] > params.s {
                    out.push(Violation::new(
                        round,
                        ViolationKind::RecvBudget { participant },
                        recv[participant] as f64,
                        s,
                    ));
                }
                if space[participant] > params.s {
                    out.push(Violation::new(
                        round,
                        ViolationKind::SpaceBudget { participant },
                        space[participant] as f64,
                        s,
                    ));
                }
            }
        }
    }
    out
}
