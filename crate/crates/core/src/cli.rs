//! The `semimpc` command-line tool.
//!
//! Exit codes: 0 clean, 1 budget violation or failed bound, 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adapters::{
    simulate_cc_on_semimpc, simulate_congest_on_semimpc, simulate_semimpc_on_cc, AdapterError,
    SimulationReport,
};
use crate::algorithms::{Boruvka, Flood, ForestMerge};
use crate::checker::check_trace;
use crate::engine::{run_clique, run_congest, run_mpc};
use crate::graph::{distribute_edges, edges_to_words, gen_graph, load_graph, Graph, GraphKind};
use crate::message::Word;
use crate::params::{Constants, ModelKind, ModelParams};
use crate::routing::{execute_schedule, plan_routing, DemandMatrix, RoutingError, Schedule};
use crate::trace::{RunResult, Violation};

#[derive(Debug, Parser)]
#[command(name = "semimpc", version, about = "Distributed model simulator and cross-model adapters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph in the edge-list format.
    Gen(GenArgs),
    /// Run an algorithm on its native model.
    Run(RunArgs),
    /// Run an algorithm through a cross-model adapter.
    Simulate(SimulateArgs),
    /// Plan and execute one clique routing episode for a demand matrix.
    Route(RouteArgs),
    /// Re-check a run or simulation report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Path,
    Cycle,
    Complete,
    Star,
    Gnp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Boruvka,
    Flood,
    ForestMerge,
}

impl Algorithm {
    fn native_model(self) -> ModelKind {
        match self {
            Algorithm::Boruvka => ModelKind::Clique,
            Algorithm::Flood => ModelKind::Congest,
            Algorithm::ForestMerge => ModelKind::Semimpc,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Algorithm::Boruvka => "boruvka",
            Algorithm::Flood => "flood",
            Algorithm::ForestMerge => "forest-merge",
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability for `gnp`.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Where the input graph comes from: a file, or a generator.
#[derive(Debug, Args)]
pub struct GraphSource {
    #[arg(long, conflicts_with = "kind")]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub model: ModelKind,
    #[arg(long, value_enum)]
    pub algorithm: Algorithm,
    #[command(flatten)]
    pub source: GraphSource,
    /// Machine count for semi-MPC runs.
    #[arg(long)]
    pub machines: Option<usize>,
    /// `key=value` overrides of the model constants.
    #[arg(long = "constants", value_name = "KEY=VALUE")]
    pub constants: Vec<String>,
    #[arg(long, default_value = "run.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub from: ModelKind,
    #[arg(long)]
    pub to: ModelKind,
    #[arg(long, value_enum)]
    pub algorithm: Option<Algorithm>,
    #[command(flatten)]
    pub source: GraphSource,
    /// Machine count of a semi-MPC source program.
    #[arg(long)]
    pub machines: Option<usize>,
    /// Round budget `T` for CONGEST sources; defaults to the native count.
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long = "constants", value_name = "KEY=VALUE")]
    pub constants: Vec<String>,
    #[arg(long, default_value = "simulation.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    /// JSON file holding an n x n matrix of word counts.
    #[arg(long)]
    pub demand: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "constants", value_name = "KEY=VALUE")]
    pub constants: Vec<String>,
    #[arg(long, default_value = "route.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// A run report or simulation report.
    #[arg(long)]
    pub trace: PathBuf,
    /// Input graph, required for CONGEST traces.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

/// Outcome of a subcommand: an exit code plus text for stdout and stderr.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stdout: String, stderr: impl Into<String>) -> Self {
        let mut stderr = stderr.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome { code, stdout, stderr }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Self::fail(2, String::new(), msg)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome::usage(text)
            }
        }
    }
}

pub fn dispatch(cmd: Command) -> Outcome {
    let result = match cmd {
        Command::Gen(a) => cmd_gen(&a),
        Command::Run(a) => cmd_run(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Route(a) => cmd_route(&a),
        Command::Verify(a) => cmd_verify(&a),
    };
    result.unwrap_or_else(Outcome::usage)
}

type CmdResult = Result<Outcome, String>;

fn graph_kind(kind: Kind, p: Option<f64>) -> Result<GraphKind, String> {
    Ok(match kind {
        Kind::Path => GraphKind::Path,
        Kind::Cycle => GraphKind::Cycle,
        Kind::Complete => GraphKind::Complete,
        Kind::Star => GraphKind::Star,
        Kind::Gnp => {
            let p = p.ok_or("gnp needs --p")?;
            if !(0.0..=1.0).contains(&p) {
                return Err("probability out of range".into());
            }
            GraphKind::Gnp { p }
        }
    })
}

fn generate(kind: Kind, n: Option<usize>, p: Option<f64>, seed: u64) -> Result<Graph, String> {
    let kind = graph_kind(kind, p)?;
    let n = n.ok_or("--n is required")?;
    gen_graph(kind, n, seed).map_err(|e| e.to_string())
}

fn read_text(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_graph(path: &Path) -> Result<Graph, String> {
    load_graph(&read_text(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

impl GraphSource {
    fn load(&self) -> Result<Graph, String> {
        match (&self.graph, self.kind) {
            (Some(path), _) => read_graph(path),
            (None, Some(kind)) => generate(kind, self.n, self.p, self.seed),
            (None, None) => Err("give --graph FILE or a generator (--kind, --n)".into()),
        }
    }
}

fn parse_constants(overrides: &[String]) -> Result<Constants, String> {
    let mut c = Constants::default();
    for kv in overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("constant override {kv:?} is not KEY=VALUE"))?;
        c.set(k.trim(), v.trim())?;
    }
    Ok(c)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Default machine count for semi-MPC runs: enough machines that every
/// machine's share of the edges fits its space, at least 4, at most `n`.
fn default_machines(g: &Graph, c: &Constants) -> usize {
    let s = (c.c_space * g.n()).max(1);
    let needed = (2 * g.m()).div_ceil(s) + 1;
    needed.max(4).min(g.n()).max(1)
}

fn describe_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| {
            format!(
                "round {}: {:?} measured {} allowed {}\n",
                v.round, v.kind, v.measured, v.allowed
            )
        })
        .collect()
}

fn cmd_gen(a: &GenArgs) -> CmdResult {
    let g = generate(a.kind, a.n, a.p, a.seed)?;
    let text = g.to_edge_list();
    match &a.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(Outcome::ok(format!(
                "wrote {} (n = {}, m = {})\n",
                path.display(),
                g.n(),
                g.m()
            )))
        }
        None => Ok(Outcome::ok(text)),
    }
}

fn check_model(algorithm: Algorithm, model: ModelKind) -> Result<(), String> {
    if algorithm.native_model() != model {
        return Err(format!(
            "algorithm {} runs on {}, not {}",
            algorithm.name(),
            algorithm.native_model(),
            model
        ));
    }
    Ok(())
}

fn cmd_run(a: &RunArgs) -> CmdResult {
    check_model(a.algorithm, a.model)?;
    let c = parse_constants(&a.constants)?;
    let g = a.source.load()?;
    let n = g.n();
    let result = match a.algorithm {
        Algorithm::Boruvka => run_clique(&Boruvka, &g, &ModelParams::clique(n, c)),
        Algorithm::Flood => run_congest(&Flood, &g, &ModelParams::congest(n, c)),
        Algorithm::ForestMerge => {
            let p = a.machines.unwrap_or_else(|| default_machines(&g, &c));
            if p == 0 {
                return Err("--machines must be positive".into());
            }
            let params = ModelParams::semi_mpc(n, p, c).with_input_size(2 * g.m());
            let inputs = edges_to_words(&distribute_edges(&g, p, a.source.seed));
            run_mpc(&ForestMerge { n, p }, inputs, &params)
        }
    }
    .map_err(|e| e.to_string())?;
    write_json(&a.out, &result)?;
    let summary = result.summary();
    if result.is_clean() {
        Ok(Outcome::ok(summary))
    } else {
        Ok(Outcome::fail(1, summary, describe_violations(&result.violations)))
    }
}

fn cmd_simulate(a: &SimulateArgs) -> CmdResult {
    let expected = match (a.from, a.to) {
        (ModelKind::Clique, ModelKind::Semimpc) => Algorithm::Boruvka,
        (ModelKind::Semimpc, ModelKind::Clique) => Algorithm::ForestMerge,
        (ModelKind::Congest, ModelKind::Semimpc) => Algorithm::Flood,
        (from, to) => return Err(format!("unsupported pair: {from} -> {to}")),
    };
    let algorithm = a.algorithm.unwrap_or(expected);
    check_model(algorithm, a.from)?;
    let c = parse_constants(&a.constants)?;
    let g = a.source.load()?;
    let n = g.n();
    let report = match algorithm {
        Algorithm::Boruvka => simulate_cc_on_semimpc(&Boruvka, &g, c, None),
        Algorithm::Flood => simulate_congest_on_semimpc(&Flood, &g, c, a.rounds, None),
        Algorithm::ForestMerge => {
            let p = a.machines.unwrap_or_else(|| default_machines(&g, &c));
            if p == 0 {
                return Err("--machines must be positive".into());
            }
            let params = ModelParams::semi_mpc(n, p, c).with_input_size(2 * g.m());
            let inputs = edges_to_words(&distribute_edges(&g, p, a.source.seed));
            simulate_semimpc_on_cc(&ForestMerge { n, p }, inputs, &params)
        }
    };
    let report = match report {
        Ok(r) => r,
        Err(e @ (AdapterError::Hypothesis(_) | AdapterError::NativeViolations(_))) => {
            return Ok(Outcome::fail(1, String::new(), e.to_string()));
        }
        Err(e) => return Err(e.to_string()),
    };
    write_json(&a.out, &report)?;
    let summary = report.summary();
    if report.passed() {
        Ok(Outcome::ok(summary))
    } else {
        let mut failed: Vec<String> = report.failed_checks().into_iter().map(String::from).collect();
        if !report.simulated.is_clean() {
            failed.push("simulated run has budget violations".into());
        }
        Ok(Outcome::fail(1, summary, format!("failed bounds: {}\n", failed.join(", "))))
    }
}

#[derive(Debug, Serialize)]
struct RouteReport {
    schedule: Schedule,
    rounds: usize,
    max_link_load: usize,
    delivered_exactly: bool,
    run: RunResult,
}

fn cmd_route(a: &RouteArgs) -> CmdResult {
    let c = parse_constants(&a.constants)?;
    let dm = DemandMatrix::from_json(&read_text(&a.demand)?).map_err(|e| e.to_string())?;
    let n = dm.n();
    let sched = match plan_routing(&dm, c.c_traffic) {
        Ok(s) => s,
        Err(e @ RoutingError::Precondition { .. }) => return Ok(Outcome::fail(1, String::new(), e.to_string())),
        Err(e) => return Err(e.to_string()),
    };
    let params = ModelParams::clique(n, c);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut payloads = std::collections::BTreeMap::new();
    for src in 0..n {
        for dst in 0..n {
            let k = dm.get(src, dst);
            if k > 0 {
                let words: Vec<Word> = (0..k).map(|_| rng.gen_range(0..1u64 << params.word_bits)).collect();
                payloads.insert((src, dst), words);
            }
        }
    }
    let delivery = execute_schedule(&sched, &payloads, &params).map_err(|e| e.to_string())?;
    let mut got: std::collections::BTreeMap<(usize, usize), Vec<Word>> = Default::default();
    for w in &delivery.delivered {
        got.entry((w.src, w.dst)).or_default().push(w.value);
    }
    let report = RouteReport {
        max_link_load: sched.max_link_load(),
        rounds: delivery.rounds,
        delivered_exactly: got == payloads,
        schedule: sched,
        run: delivery.run,
    };
    write_json(&a.out, &report)?;
    let summary = format!(
        "nodes: {n}\nwords: {}\nmax line sum: {}\ncolors: {}\nrounds: {}\nmax link load: {}\ndelivered exactly: {}\n",
        dm.total(),
        dm.max_line_sum(),
        report.schedule.colors,
        report.rounds,
        report.max_link_load,
        report.delivered_exactly
    );
    if report.delivered_exactly && report.run.is_clean() {
        Ok(Outcome::ok(summary))
    } else {
        Ok(Outcome::fail(1, summary, "routing did not deliver every word within budget\n"))
    }
}

fn recheck(run: &RunResult, graph: Option<&Graph>, what: &str) -> Result<Vec<Violation>, String> {
    if run.params.kind == ModelKind::Congest && graph.is_none() {
        return Err(format!("{what}: CONGEST traces need --graph"));
    }
    if run.trace.per_round.len() != run.rounds {
        return Err(format!(
            "{what}: trace has {} rounds but reports {}",
            run.trace.per_round.len(),
            run.rounds
        ));
    }
    Ok(check_trace(&run.trace, &run.params, graph))
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let text = read_text(&a.trace)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: malformed JSON: {e}", a.trace.display()))?;
    let graph = a.graph.as_deref().map(read_graph).transpose()?;
    let malformed = |e: serde_json::Error| format!("{}: not a run or simulation report: {e}", a.trace.display());

    let mut found = Vec::new();
    let mut out = String::new();
    if value.get("native").is_some() {
        let report: SimulationReport = serde_json::from_value(value).map_err(malformed)?;
        let native_graph = if report.source == ModelKind::Congest { graph.as_ref() } else { None };
        for (what, run, g) in [
            ("native", &report.native, native_graph),
            ("simulated", &report.simulated, None),
        ] {
            let v = recheck(run, g, what)?;
            out += &format!("{what}: {} rounds, {} violation(s)\n", run.rounds, v.len());
            found.extend(v);
        }
    } else {
        let run: RunResult = serde_json::from_value(value).map_err(malformed)?;
        let v = recheck(&run, graph.as_ref(), "run")?;
        out += &format!("{}: {} rounds, {} violation(s)\n", run.model, run.rounds, v.len());
        found.extend(v);
    }
    if found.is_empty() {
        Ok(Outcome::ok(out))
    } else {
        Ok(Outcome::fail(1, out, describe_violations(&found)))
    }
}
