//! Round-based simulator for four distributed computation models
//! (CONGEST, congested clique, MPC and semi-MPC) with enforced bandwidth and
//! space budgets, plus adapters that run a program written for one model on
//! another and certify the round, machine, traffic and space bounds of the
//! resulting execution.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`], [`message`], [`trace`] and [`oracle`]: the data model shared by
//!   every engine, including the ground-truth connectivity labelings.
//! - [`params`], [`program`], [`engine`] and [`checker`]: model parameters, the
//!   [`NodeProgram`] interface and the constraint-enforcing round engines.
//! - [`routing`]: two-phase clique routing driven by bipartite edge coloring.
//! - [`adapters`]: clique→semi-MPC, semi-MPC→clique and CONGEST→semi-MPC.
//! - [`algorithms`]: reference connectivity programs for each model.

pub mod adapters;
pub mod algorithms;
pub mod checker;
pub mod cli;
pub mod engine;
pub mod graph;
pub mod message;
pub mod oracle;
pub mod params;
pub mod program;
pub mod routing;
pub mod trace;

pub use checker::check_trace;
pub use engine::{run_clique, run_congest, run_mpc, EngineError};
pub use graph::{Graph, GraphError, GraphKind};
pub use message::{Envelope, Message, Word};
pub use params::{Constants, ModelKind, ModelParams};
pub use program::{NodeProgram, RoundCtx, Step};
pub use trace::{RoundRecord, RoundTrace, RunResult, Violation, ViolationKind};
