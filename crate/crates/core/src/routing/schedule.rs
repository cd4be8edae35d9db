use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::coloring::{edge_color_bipartite, BipartiteMultigraph, ColoringError};
use crate::engine::{run_clique_with_inputs, EngineError};
use crate::message::{Envelope, Message, Word};
use crate::params::ModelParams;
use crate::program::{NodeProgram, RoundCtx, Step};
use crate::trace::RunResult;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoutingError {
    #[error("demand matrix must be square and non-empty")]
    NotSquare,
    #[error("{line} {index} sums to {sum} words, over the limit of {limit}")]
    Precondition {
        line: &'static str,
        index: usize,
        sum: usize,
        limit: usize,
    },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("payload for ({src}, {dst}) has {got} words, demand is {want}")]
    PayloadMismatch {
        src: usize,
        dst: usize,
        got: usize,
        want: usize,
    },
    #[error("clique engine: {0}")]
    Engine(#[from] EngineError),
    #[error("schedule replay violated the clique budget in round {round}")]
    Inconsistent { round: usize },
    #[error("malformed demand JSON: {0}")]
    Json(String),
}

/// Word counts `counts[src][dst]` for one routing episode on `n` nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandMatrix {
    n: usize,
    counts: Vec<Vec<usize>>,
}

impl DemandMatrix {
    pub fn new(counts: Vec<Vec<usize>>) -> Result<Self, RoutingError> {
        let n = counts.len();
        if n == 0 || counts.iter().any(|row| row.len() != n) {
            return Err(RoutingError::NotSquare);
        }
        Ok(DemandMatrix { n, counts })
    }

    pub fn zeros(n: usize) -> Self {
        DemandMatrix {
            n,
            counts: vec![vec![0; n]; n],
        }
    }

    /// Parses a dense JSON array of arrays.
    pub fn from_json(text: &str) -> Result<Self, RoutingError> {
        let counts: Vec<Vec<usize>> =
            serde_json::from_str(text).map_err(|e| RoutingError::Json(e.to_string()))?;
        Self::new(counts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, src: usize, dst: usize) -> usize {
        self.counts[src][dst]
    }

    pub fn add(&mut self, src: usize, dst: usize, words: usize) {
        self.counts[src][dst] += words;
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn row_sum(&self, src: usize) -> usize {
        self.counts[src].iter().sum()
    }

    pub fn col_sum(&self, dst: usize) -> usize {
        self.counts.iter().map(|row| row[dst]).sum()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// Largest row or column sum, i.e. the bipartite maximum degree.
    pub fn max_line_sum(&self) -> usize {
        (0..self.n)
            .map(|i| self.row_sum(i).max(self.col_sum(i)))
            .max()
            .unwrap_or(0)
    }

    /// Rejects matrices whose rows or columns exceed `limit` words.
    pub fn check_limit(&self, limit: usize) -> Result<(), RoutingError> {
        for i in 0..self.n {
            for (line, sum) in [("row", self.row_sum(i)), ("column", self.col_sum(i))] {
                if sum > limit {
                    return Err(RoutingError::Precondition {
                        line,
                        index: i,
                        sum,
                        limit,
                    });
                }
            }
        }
        Ok(())
    }
}

/// One demanded word and its route `src → intermediate → dst`.
/// Rounds are 0-based and global: phase A occupies `0..rounds_per_phase`,
/// phase B `rounds_per_phase..2 * rounds_per_phase`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutedWord {
    pub src: usize,
    pub dst: usize,
    /// Position of the word within the `(src, dst)` stream.
    pub seq: usize,
    pub color: usize,
    pub intermediate: usize,
    pub phase_a_round: usize,
    pub phase_b_round: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub n: usize,
    pub max_degree: usize,
    pub colors: usize,
    pub rounds_per_phase: usize,
    /// Ordered by `(src, dst, seq)`.
    pub words: Vec<RoutedWord>,
}

/// A hop `(from, to, word index)` in a given round.
pub type Hop = (usize, usize, usize);

impl Schedule {
    pub fn total_rounds(&self) -> usize {
        2 * self.rounds_per_phase
    }

    /// Hops grouped as `[phase A, phase B]`, each a list of rounds.
    pub fn phases(&self) -> [Vec<Vec<Hop>>; 2] {
        let r = self.rounds_per_phase;
        let mut a = vec![Vec::new(); r];
        let mut b = vec![Vec::new(); r];
        for (i, w) in self.words.iter().enumerate() {
            a[w.phase_a_round].push((w.src, w.intermediate, i));
            b[w.phase_b_round - r].push((w.intermediate, w.dst, i));
        }
        [a, b]
    }

    /// Largest number of words on any ordered pair `from != to` in any round.
    pub fn max_link_load(&self) -> usize {
        let mut load: HashMap<(usize, usize, usize), usize> = HashMap::new();
        for (phase, rounds) in self.phases().iter().enumerate() {
            for (r, hops) in rounds.iter().enumerate() {
                for &(from, to, _) in hops {
                    if from != to {
                        *load.entry((phase * self.rounds_per_phase + r, from, to)).or_default() += 1;
                    }
                }
            }
        }
        load.into_values().max().unwrap_or(0)
    }
}

/// Plans a two-phase route for every demanded word.
///
/// Each word is an edge of the bipartite source/destination multigraph. A
/// proper edge coloring with Δ colors sends the word of color `k` through
/// intermediate `k mod n` in round `k / n` of each phase: words sharing a
/// source (phase A) or a destination (phase B) have distinct colors, so no
/// ordered pair carries two words in the same round. With row and column
/// sums at most `n` this takes exactly two rounds.
pub fn plan_routing(dm: &DemandMatrix, c_traffic: usize) -> Result<Schedule, RoutingError> {
    let n = dm.n();
    dm.check_limit(c_traffic * n)?;

    let mut words = Vec::with_capacity(dm.total());
    let mut edges = Vec::with_capacity(dm.total());
    for src in 0..n {
        for dst in 0..n {
            for seq in 0..dm.get(src, dst) {
                edges.push((src, dst));
                words.push((src, dst, seq));
            }
        }
    }
    let mg = BipartiteMultigraph::new(n, n, edges)?;
    let max_degree = mg.max_degree();
    let coloring = edge_color_bipartite(&mg, max_degree)?;
    let colors = coloring.iter().max().map_or(0, |&c| c + 1);
    let rounds_per_phase = colors.div_ceil(n);

    let words = words
        .into_iter()
        .zip(coloring)
        .map(|((src, dst, seq), color)| RoutedWord {
            src,
            dst,
            seq,
            color,
            intermediate: color % n,
            phase_a_round: color / n,
            phase_b_round: rounds_per_phase + color / n,
        })
        .collect();
    Ok(Schedule {
        n,
        max_degree,
        colors,
        rounds_per_phase,
        words,
    })
}

/// Routing summary attached to run reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingEpisode {
    /// Round of the simulated program whose traffic this episode carries.
    pub round: usize,
    pub words: usize,
    pub rounds: usize,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeliveredWord {
    pub src: usize,
    pub dst: usize,
    pub seq: usize,
    pub value: Word,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    /// Communication rounds used (the schedule's length).
    pub rounds: usize,
    /// Sorted by `(src, dst, seq)`.
    pub delivered: Vec<DeliveredWord>,
    pub run: RunResult,
}

struct RelayPlan {
    comm_rounds: usize,
    half: usize,
    words: Vec<RoutedWord>,
    /// `sourced[node]` lists the words the node injects, in word order.
    sourced: Vec<Vec<usize>>,
    /// `sends[node][round]` lists `(to, word)`.
    sends: Vec<Vec<Vec<(usize, usize)>>>,
    arrivals: HashMap<(usize, usize, usize), usize>,
}

impl RelayPlan {
    fn new(sched: &Schedule) -> Self {
        let n = sched.n;
        let comm_rounds = sched.total_rounds();
        let mut sourced = vec![Vec::new(); n];
        let mut sends = vec![vec![Vec::new(); comm_rounds]; n];
        let mut arrivals = HashMap::new();
        for (i, w) in sched.words.iter().enumerate() {
            sourced[w.src].push(i);
            sends[w.src][w.phase_a_round].push((w.intermediate, i));
            sends[w.intermediate][w.phase_b_round].push((w.dst, i));
            let fresh_a = arrivals.insert((w.phase_a_round, w.src, w.intermediate), i);
            let fresh_b = arrivals.insert((w.phase_b_round, w.intermediate, w.dst), i);
            assert!(
                fresh_a.is_none() && fresh_b.is_none(),
                "schedule places two words on one link in one round"
            );
        }
        RelayPlan {
            comm_rounds,
            half: sched.rounds_per_phase,
            words: sched.words.clone(),
            sourced,
            sends,
            arrivals,
        }
    }
}

/// Clique program that replays a schedule. Every node knows the schedule, so
/// messages carry only the payload word and tags are recovered from
/// `(round, sender)`.
struct Relay {
    plan: Arc<RelayPlan>,
}

#[derive(Debug, Clone, Default)]
struct RelayState {
    held: BTreeMap<usize, Word>,
    delivered: Vec<(usize, Word)>,
}

impl NodeProgram for Relay {
    type State = RelayState;

    fn name(&self) -> &str {
        "relay"
    }

    fn init(&self, id: usize, input: &[Word]) -> RelayState {
        RelayState {
            held: self.plan.sourced[id].iter().copied().zip(input.iter().copied()).collect(),
            delivered: Vec::new(),
        }
    }

    fn on_round(&self, ctx: RoundCtx, state: &mut RelayState, inbox: &[Message]) -> Step {
        let plan = &self.plan;
        for msg in inbox {
            let sent_in = msg.round - 1;
            let word = plan.arrivals[&(sent_in, msg.src, ctx.id)];
            if sent_in < plan.half {
                state.held.insert(word, msg.payload[0]);
            } else {
                state.delivered.push((word, msg.payload[0]));
            }
        }
        let idx = ctx.round - 1;
        if idx >= plan.comm_rounds {
            return Step::halt();
        }
        let outbox = plan.sends[ctx.id][idx]
            .iter()
            .map(|&(to, word)| {
                let value = state.held.remove(&word).expect("word held before its hop");
                Envelope::single(to, value)
            })
            .collect();
        Step::send(outbox)
    }

    fn output(&self, state: &RelayState) -> Vec<Word> {
        let mut tagged: Vec<(usize, usize, Word)> = state
            .delivered
            .iter()
            .map(|&(w, value)| {
                let rw = &self.plan.words[w];
                (rw.src, rw.seq, value)
            })
            .collect();
        tagged.sort_unstable();
        tagged
            .into_iter()
            .flat_map(|(src, seq, value)| [src as Word, seq as Word, value])
            .collect()
    }

    fn space_words(&self, state: &RelayState) -> usize {
        state.held.len() + 3 * state.delivered.len()
    }
}

/// Replays `sched` on the clique engine. `payloads[(src, dst)]` holds the
/// words of that stream in sequence order and must match the demand.
pub fn execute_schedule(
    sched: &Schedule,
    payloads: &BTreeMap<(usize, usize), Vec<Word>>,
    params: &ModelParams,
) -> Result<Delivery, RoutingError> {
    let n = sched.n;
    let mut demand: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for w in &sched.words {
        *demand.entry((w.src, w.dst)).or_default() += 1;
    }
    for (&(src, dst), &want) in &demand {
        let got = payloads.get(&(src, dst)).map_or(0, Vec::len);
        if got != want {
            return Err(RoutingError::PayloadMismatch { src, dst, got, want });
        }
    }
    if let Some((&(src, dst), words)) = payloads
        .iter()
        .find(|(k, v)| !v.is_empty() && !demand.contains_key(k))
    {
        return Err(RoutingError::PayloadMismatch {
            src,
            dst,
            got: words.len(),
            want: 0,
        });
    }

    let plan = Arc::new(RelayPlan::new(sched));
    let relay = Relay { plan: plan.clone() };
    // The relay's local input is the sequence of words it injects.
    let mut injected = vec![Vec::new(); n];
    for &w in plan.sourced.iter().flatten() {
        let rw = &plan.words[w];
        injected[rw.src].push(payloads[&(rw.src, rw.dst)][rw.seq]);
    }
    let run = run_clique_with_inputs(&relay, injected, params)?;
    if let Some(v) = run.violations.first() {
        return Err(RoutingError::Inconsistent { round: v.round });
    }

    let mut delivered = Vec::with_capacity(sched.words.len());
    for (dst, out) in run.outputs.iter().enumerate() {
        for triple in out.chunks_exact(3) {
            delivered.push(DeliveredWord {
                src: triple[0] as usize,
                dst,
                seq: triple[1] as usize,
                value: triple[2],
            });
        }
    }
    delivered.sort_unstable();
    Ok(Delivery {
        rounds: sched.total_rounds(),
        delivered,
        run,
    })
}

/// Convenience wrapper: plans and executes one episode on a clique of
/// `params.p` nodes.
pub fn route_payloads(
    payloads: &BTreeMap<(usize, usize), Vec<Word>>,
    params: &ModelParams,
) -> Result<(Schedule, Delivery), RoutingError> {
    let mut dm = DemandMatrix::zeros(params.p);
    for (&(src, dst), words) in payloads {
        dm.add(src, dst, words.len());
    }
    let sched = plan_routing(&dm, params.constants.c_traffic)?;
    let delivery = execute_schedule(&sched, payloads, params)?;
    Ok((sched, delivery))
}
