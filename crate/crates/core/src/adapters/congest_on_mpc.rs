//! CONGEST on semi-MPC with O(T·m/n) machines.
//!
//! Edges start evenly spread over `M` machines. Three setup rounds place
//! every vertex on a machine:
//!
//! 1. each machine sends its partial degrees `(v, d_{v,a})` to the
//!    aggregator of `v`, machine `floor(v * M / n)`;
//! 2. each aggregator sums its block and sends the block's degrees to every
//!    machine;
//! 3. every machine now holds the full degree table, computes the same
//!    [`Assignment`] and ships each local edge to the hosts of both
//!    endpoints.
//!
//! Afterwards machine `a` runs every CONGEST round for the vertices it hosts.
//! A message from `u` to `v` travels as `[u, v, payload...]` to the host of
//! `v`. With a single machine the setup is skipped.

use std::collections::BTreeMap;

use crate::engine::{run_congest, run_mpc};
use crate::graph::{distribute_edges, edges_to_words, Graph};
use crate::message::{Envelope, Message, Word};
use crate::params::{Constants, ModelKind, ModelParams};
use crate::program::{NodeProgram, RoundCtx, Step};
use crate::trace::RunResult;

use super::{compute_node_assignment, AdapterError, SimulationReport};

pub const SETUP_ROUNDS: usize = 3;

struct CongestOnMachines<'a, P> {
    inner: &'a P,
    n: usize,
    machines: usize,
}

#[derive(Clone)]
struct MachineState<S> {
    edges: Vec<(usize, usize)>,
    host: Vec<usize>,
    nodes: Vec<(usize, S)>,
}

impl<P: NodeProgram> CongestOnMachines<'_, P> {
    fn setup_rounds(&self) -> usize {
        if self.machines > 1 {
            SETUP_ROUNDS
        } else {
            0
        }
    }

    fn aggregator(&self, v: usize) -> usize {
        v * self.machines / self.n
    }

    fn block(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.aggregator(v) == a)
    }

    /// Builds the hosted nodes from `(vertex, neighbor)` pairs and runs their
    /// first round.
    fn start_nodes(
        &self,
        ctx: RoundCtx,
        state: &mut MachineState<P::State>,
        pairs: impl Iterator<Item = (usize, usize)>,
    ) -> Step {
        let mut neighbors: BTreeMap<usize, Vec<Word>> = (0..self.n)
            .filter(|&v| state.host[v] == ctx.id)
            .map(|v| (v, Vec::new()))
            .collect();
        for (x, y) in pairs {
            neighbors.get_mut(&x).expect("edge shipped to its host").push(y as Word);
        }
        state.nodes = neighbors
            .into_iter()
            .map(|(v, mut nb)| {
                nb.sort_unstable();
                (v, self.inner.init(v, &nb))
            })
            .collect();
        self.replay(ctx, state, Vec::new())
    }

    fn replay(&self, ctx: RoundCtx, state: &mut MachineState<P::State>, mut inbox: Vec<Message>) -> Step {
        let round = ctx.round - self.setup_rounds();
        inbox.sort_by_key(|m| m.src);
        let mut outbox = Vec::new();
        let mut halt = true;
        for (v, node) in state.nodes.iter_mut() {
            let node_inbox: Vec<Message> = inbox.iter().filter(|m| m.dst == *v).cloned().collect();
            let node_ctx = RoundCtx {
                id: *v,
                round,
                participants: self.n,
            };
            let step = self.inner.on_round(node_ctx, node, &node_inbox);
            halt &= step.halt;
            for env in step.outbox {
                let mut payload = vec![*v as Word, env.dst as Word];
                payload.extend(env.payload);
                outbox.push(Envelope::new(state.host[env.dst], payload));
            }
        }
        Step { outbox, halt }
    }
}

fn batch(per_dst: BTreeMap<usize, Vec<Word>>) -> Vec<Envelope> {
    per_dst.into_iter().map(|(dst, words)| Envelope::new(dst, words)).collect()
}

impl<P: NodeProgram> NodeProgram for CongestOnMachines<'_, P> {
    type State = MachineState<P::State>;

    fn name(&self) -> &str {
        self.inner.name()
    }

    fn init(&self, _id: usize, input: &[Word]) -> Self::State {
        MachineState {
            edges: input.chunks_exact(2).map(|c| (c[0] as usize, c[1] as usize)).collect(),
            host: Vec::new(),
            nodes: Vec::new(),
        }
    }

    fn on_round(&self, ctx: RoundCtx, state: &mut Self::State, inbox: &[Message]) -> Step {
        if self.machines == 1 && ctx.round == 1 {
            state.host = vec![0; self.n];
            let edges = std::mem::take(&mut state.edges);
            let pairs = edges.into_iter().flat_map(|(u, v)| [(u, v), (v, u)]);
            return self.start_nodes(ctx, state, pairs);
        }
        match ctx.round {
            r if r > self.setup_rounds() + 1 => {
                let decoded = inbox
                    .iter()
                    .map(|m| Message {
                        src: m.payload[0] as usize,
                        dst: m.payload[1] as usize,
                        payload: m.payload[2..].to_vec(),
                        round: m.round - self.setup_rounds(),
                    })
                    .collect();
                self.replay(ctx, state, decoded)
            }
            1 => {
                let mut partial: BTreeMap<usize, usize> = BTreeMap::new();
                for &(u, v) in &state.edges {
                    *partial.entry(u).or_default() += 1;
                    *partial.entry(v).or_default() += 1;
                }
                let mut per_dst: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
                for (v, d) in partial {
                    per_dst.entry(self.aggregator(v)).or_default().extend([v as Word, d as Word]);
                }
                Step::send(batch(per_dst))
            }
            2 => {
                let mut degree: BTreeMap<usize, usize> = self.block(ctx.id).map(|v| (v, 0)).collect();
                for m in inbox {
                    for c in m.payload.chunks_exact(2) {
                        *degree.get_mut(&(c[0] as usize)).expect("vertex in block") += c[1] as usize;
                    }
                }
                let words: Vec<Word> = degree.into_values().map(|d| d as Word).collect();
                if words.is_empty() {
                    return Step::default();
                }
                Step::send((0..self.machines).map(|b| Envelope::new(b, words.clone())).collect())
            }
            3 => {
                let mut degrees = vec![0; self.n];
                for m in inbox {
                    for (v, &d) in self.block(m.src).zip(&m.payload) {
                        degrees[v] = d as usize;
                    }
                }
                state.host = compute_node_assignment(&degrees, self.machines).machine_of;
                let mut per_dst: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
                for (u, v) in std::mem::take(&mut state.edges) {
                    per_dst.entry(state.host[u]).or_default().extend([u as Word, v as Word]);
                    per_dst.entry(state.host[v]).or_default().extend([v as Word, u as Word]);
                }
                Step::send(batch(per_dst))
            }
            _ => {
                let pairs: Vec<(usize, usize)> = inbox
                    .iter()
                    .flat_map(|m| m.payload.chunks_exact(2).map(|c| (c[0] as usize, c[1] as usize)))
                    .collect();
                self.start_nodes(ctx, state, pairs.into_iter())
            }
        }
    }

    /// `[v, len, output...]` for every hosted vertex.
    fn output(&self, state: &Self::State) -> Vec<Word> {
        let mut out = Vec::new();
        for (v, node) in &state.nodes {
            let words = self.inner.output(node);
            out.push(*v as Word);
            out.push(words.len() as Word);
            out.extend(words);
        }
        out
    }

    fn space_words(&self, state: &Self::State) -> usize {
        2 * state.edges.len()
            + state.host.len()
            + state
                .nodes
                .iter()
                .map(|(_, s)| self.inner.space_words(s))
                .sum::<usize>()
    }
}

/// Regroups machine outputs `[v, len, output...]*` per vertex.
pub fn decode_node_outputs(n: usize, machine_outputs: &[Vec<Word>]) -> Vec<Vec<Word>> {
    let mut per_node = vec![Vec::new(); n];
    for out in machine_outputs {
        let mut at = 0;
        while at < out.len() {
            let (v, len) = (out[at] as usize, out[at + 1] as usize);
            per_node[v] = out[at + 2..at + 2 + len].to_vec();
            at += 2 + len;
        }
    }
    per_node
}

/// Checks that every node's retained state stays within
/// `c_space * (input words + words received so far + 1)`.
fn memory_hypothesis(native: &RunResult, g: &Graph, c_space: usize) -> Result<(), String> {
    let n = g.n();
    let mut received = vec![0usize; n];
    for (r, row) in native.trace.space_high_water.iter().enumerate() {
        if r > 0 {
            for (v, w) in native.trace.recv_words(r, n).into_iter().enumerate() {
                received[v] += w;
            }
        }
        for (v, &space) in row.iter().enumerate() {
            let allowed = c_space * (g.degree(v) + received[v] + 1);
            if space > allowed {
                return Err(format!(
                    "node {v} holds {space} words after round {r}, more than {allowed}"
                ));
            }
        }
    }
    Ok(())
}

/// Machine count `min(max(1, ceil(c_M * T * m / n)), p_max, s)`; one machine
/// for an edgeless graph.
pub fn machine_count(n: usize, m: usize, t: usize, constants: &Constants, p_max: usize) -> usize {
    if m == 0 || n == 0 {
        return 1;
    }
    let wanted = (constants.c_m * t as f64 * m as f64 / n as f64).ceil() as usize;
    wanted.max(1).min(p_max).min(constants.c_space * n).max(1)
}

/// Runs `prog` natively on CONGEST and then on semi-MPC machines.
///
/// `t_budget` defaults to the native round count and may not be smaller;
/// `p_max` (default `n`) caps the machine count.
pub fn simulate_congest_on_semimpc<P: NodeProgram>(
    prog: &P,
    g: &Graph,
    constants: Constants,
    t_budget: Option<usize>,
    p_max: Option<usize>,
) -> Result<SimulationReport, AdapterError> {
    let (n, m) = (g.n(), g.m());
    let native = run_congest(prog, g, &ModelParams::congest(n, constants))?;
    if !native.is_clean() {
        return Err(AdapterError::NativeViolations(native.violations.len()));
    }
    memory_hypothesis(&native, g, constants.c_space).map_err(AdapterError::Hypothesis)?;
    let t = t_budget.unwrap_or(native.rounds);
    if t < native.rounds {
        return Err(AdapterError::Hypothesis(format!(
            "round budget {t} is below the native round count {}",
            native.rounds
        )));
    }

    let p_max = p_max.unwrap_or(n).max(1);
    let machines = machine_count(n, m, t, &constants, p_max);
    let placement = distribute_edges(g, machines, 0);
    let params = ModelParams::semi_mpc(n, machines, constants).with_input_size(2 * m);
    let host = CongestOnMachines {
        inner: prog,
        n,
        machines,
    };
    let simulated = run_mpc(&host, edges_to_words(&placement), &params)?;
    let simulated_outputs = decode_node_outputs(n, &simulated.outputs);

    let assignment = compute_node_assignment(&g.degrees(), machines);
    let max_d = g.max_degree();
    let avg_load = 2.0 * m as f64 / machines as f64;
    let load_limit = constants.c_load as f64 * avg_load.max(max_d as f64);
    let machine_limit = machine_count(n, m, t, &constants, n);
    let traffic = simulated.trace.max_traffic();
    let space = simulated.trace.max_space();
    let per_n = |x: usize| x as f64 / n.max(1) as f64;

    let bound_checks = BTreeMap::from([
        ("rounds_ok".to_string(), simulated.rounds <= t + SETUP_ROUNDS),
        ("machines_ok".to_string(), machines <= machine_limit),
        ("load_ok".to_string(), assignment.max_load() as f64 <= load_limit),
        ("traffic_ok".to_string(), traffic <= params.s),
        ("space_ok".to_string(), space <= params.s),
        ("outputs_match".to_string(), simulated_outputs == native.outputs),
    ]);
    let mut flags = Vec::new();
    if max_d * t > n {
        flags.push(format!(
            "high_degree: max degree {max_d} exceeds n/T = {:.2}; the O(n/T) load claim does not apply",
            n as f64 / t as f64
        ));
    }
    let measured_constants = BTreeMap::from([
        ("machines".to_string(), machines as f64),
        ("setup_rounds".to_string(), host.setup_rounds() as f64),
        ("max_load".to_string(), assignment.max_load() as f64),
        ("load_over_n_per_t".to_string(), assignment.max_load() as f64 * t as f64 / n.max(1) as f64),
        ("traffic_over_n".to_string(), per_n(traffic)),
        ("space_over_n".to_string(), per_n(space)),
    ]);
    Ok(SimulationReport {
        source: ModelKind::Congest,
        target: ModelKind::Semimpc,
        algorithm: prog.name().to_string(),
        native,
        simulated,
        simulated_outputs,
        assignment: Some(assignment),
        bound_checks,
        measured_constants,
        flags,
    })
}
