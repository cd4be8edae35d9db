//! Cross-model simulation: run a program written for one model on another
//! and check the resulting execution against the expected bounds.

mod assignment;
mod cc_on_mpc;
mod congest_on_mpc;
mod mpc_on_cc;
mod report;

pub use assignment::{compute_node_assignment, Assignment};
pub use cc_on_mpc::simulate_cc_on_semimpc;
pub use congest_on_mpc::{decode_node_outputs, machine_count, simulate_congest_on_semimpc, SETUP_ROUNDS};
pub use mpc_on_cc::simulate_semimpc_on_cc;
pub use report::{AdapterError, SimulationReport};
