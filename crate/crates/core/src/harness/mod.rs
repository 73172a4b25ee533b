//! Experiment configuration, decay curves, verification suites and their
//! CSV reports.

mod config;
mod decay;
mod report;
mod suites;

pub use config::{resolve_budget, ExperimentConfig, Mode, QuantumSuite, BUDGET_ENV};
pub use decay::{run_decay, DecayCurve, DecayRecord};
pub use report::{exit_code, number, CheckRow, Status, SuiteReport};
pub use suites::{
    depbreak_rows, entangled_table, event_from, optimal_product, phi_rows, read_deterministic, read_game,
    rounding_rows, run_depbreak_verify, run_quantum_check, run_verification_suite, toolbox_rows, ENTROPY_TOL,
    IDENTITY_TOL, TOOLBOX_INSTANCES,
};
