//! Compiles scenarios into transform programs and runs them.

mod audit;
mod exact;
mod montecarlo;
mod pathsum;
mod program;

pub use audit::{audit_counterfactuality, audit_program, AuditReport, DetectorAudit};
pub use exact::{run_exact, run_exact_from, RunResult};
pub use montecarlo::{run_monte_carlo, run_monte_carlo_with_workers, Outcome, OutcomeCounts, TrialModel};
pub use pathsum::{amplitudes_by_mode, path_sum, sink_probabilities, PathEnd, PathRecord, MAX_PATHS, MAX_PATH_DEPTH};
pub(crate) use program::compile_unchecked;
pub use program::{compile, compile_with_noise, standard_sinks, Logic, Origin, Program, Step, Transform};

pub const D0: &str = "D0";
pub const D1: &str = "D1";
pub const DF: &str = "Df";

pub const SINK_ENTRY: &str = "entry_loss";
pub const SINK_WRONG_BIN: &str = "wrong_bin";
pub const SINK_BOB_BLOCK: &str = "bob_block";
