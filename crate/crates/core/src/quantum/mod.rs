//! Entangled strategies, entropic inequalities and the dependency-breaking
//! states built from an entangled strategy on a repeated anchored game.
//!
//! Everything here is double precision on dense complex matrices.

pub mod cq;
pub mod entropy;
pub mod linalg;
pub mod phi;
mod rounding;
mod seesaw;
mod strategy;
mod uhlmann;

pub use cq::{build_cq_states, cq_report, CqReport, CqState, CqStates};
pub use entropy::{
    check_chain_rule, check_fuchs_van_de_graaf, check_pinsker, check_quantum_raz, cq_relative_entropy, fidelity,
    max_relative_entropy, mutual_information, relative_entropy, trace_distance, von_neumann, MultiCq, ToolboxCheck,
};
pub use phi::{EntangledTable, PhiFamily, PhiReport, SideOperators, Slot};
pub use rounding::{quantum_rounding_value, QuantumRoundingReport};
pub use seesaw::{seesaw, SeesawConfig, SeesawResult, MONOTONE_TOL};
pub use strategy::{check_povm, deterministic_value, EntangledStrategy, MatrixRows, Povms, StrategyFile, VALIDITY_TOL};
pub use uhlmann::{apply_local, inner, reduced_fidelity, uhlmann_unitary, Register, UhlmannResult};
