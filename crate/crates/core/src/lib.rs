//! Simulation of probabilistic state transfer through imperfect ("analogous")
//! Bell channels `sin(pi/4 + d)|x> + cos(pi/4 + d)|y>`.
//!
//! The crate is `no_std` with `alloc`. IO, the command line and file formats
//! live in the `belltransfer` crate.

#![cfg_attr(not(test), no_std)]
// Tolerance checks are written `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channels;
pub mod error;
pub mod filterops;
pub mod ledger;
pub mod protocol;
pub mod published;
pub mod statevec;
pub mod sweep;

pub use num_complex::Complex64;

pub use channels::{
    analytic_success_probability, coefficient_products, make_channel, paper_channels, ChannelSpec, CoefficientProducts,
    Parity, Sign,
};
pub use error::{Error, Result};
pub use filterops::{
    build_filter, build_permutation, derive_permutation_for_branch, paper_filter_bipartite, paper_filter_tripartite,
    paper_permutation, verify_unitary, FilterPlan, OperatorKind, OperatorMatrix, Provenance,
};
pub use ledger::{audit, discrepancies, Audit, LedgerEntry, Severity};
pub use protocol::{
    bell_measure_pair, compose_correlated_state, paper_trace, run_full_protocol, BellOutcome, BranchOutcome,
    InputState, TraceReport, TransferReport,
};
pub use statevec::{fidelity, tensor, ProjectorSpec, StateVector};

/// Accepted deviation of an input state's norm from one.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Unitarity deviation allowed for any applied operator.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;
/// Probability and fidelity assertions.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;
/// Agreement between the analytic success probability and branch enumeration.
pub const ORACLE_TOLERANCE: f64 = 1e-10;
