//! JSON shapes for `transfer` and `trace`. Field order is the serialized key order.

use belltransfer_core::protocol::{TraceReport, TransferReport};
use belltransfer_core::statevec::basis_label;
use belltransfer_core::{Complex64, InputState, LedgerEntry, StateVector};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn amplitudes(s: &StateVector) -> Vec<[f64; 2]> {
    s.amplitudes().iter().copied().map(pair).collect()
}

#[derive(Debug, Serialize)]
pub struct LedgerJson {
    pub location: String,
    pub printed: String,
    pub derived: String,
    pub severity: &'static str,
}

impl From<&LedgerEntry> for LedgerJson {
    fn from(e: &LedgerEntry) -> Self {
        Self {
            location: e.location.clone(),
            printed: e.printed.clone(),
            derived: e.derived.clone(),
            severity: e.severity.as_str(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BranchJson {
    pub outcomes: String,
    pub measurement_probability: f64,
    pub branch_probability: f64,
    pub fidelity: Option<f64>,
    pub receiver_state: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize)]
pub struct TransferJson {
    pub version: &'static str,
    pub k: usize,
    pub deltas: Vec<f64>,
    pub input: Vec<[f64; 2]>,
    pub p_analytic: f64,
    pub p_simulated: f64,
    pub min_fidelity: Option<f64>,
    pub branches: Vec<BranchJson>,
    pub ledger: Vec<LedgerJson>,
}

impl TransferJson {
    pub fn new(report: &TransferReport, input: &InputState, ledger: &[LedgerEntry]) -> Self {
        Self {
            version: VERSION,
            k: report.k,
            deltas: report.departures.clone(),
            input: input.coefficients().iter().copied().map(pair).collect(),
            p_analytic: report.p_analytic,
            p_simulated: report.p_simulated,
            min_fidelity: report.min_fidelity,
            branches: report
                .branches
                .iter()
                .map(|b| BranchJson {
                    outcomes: b.outcome_label(),
                    measurement_probability: b.measurement_probability,
                    branch_probability: b.branch_probability,
                    fidelity: b.fidelity,
                    receiver_state: b.receiver_state.as_ref().map(amplitudes),
                })
                .collect(),
            ledger: ledger.iter().map(LedgerJson::from).collect(),
        }
    }
}

/// One nonzero amplitude; `index` is 1-based.
#[derive(Debug, Serialize)]
pub struct AmplitudeJson {
    pub index: usize,
    pub label: String,
    pub value: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct StageJson {
    pub name: &'static str,
    pub norm: f64,
    pub branch_mass: Option<f64>,
    pub amplitudes: Vec<AmplitudeJson>,
}

#[derive(Debug, Serialize)]
pub struct TraceJson {
    pub version: &'static str,
    pub k: usize,
    pub deltas: Vec<f64>,
    pub input: Vec<[f64; 2]>,
    pub products: Vec<f64>,
    /// 1-based.
    pub least_index: usize,
    pub stages: Vec<StageJson>,
    pub branch_probability: f64,
    pub total_probability: f64,
    pub ledger: Vec<LedgerJson>,
}

impl TraceJson {
    pub fn new(report: &TraceReport, deltas: &[f64], input: &InputState, ledger: &[LedgerEntry]) -> Self {
        Self {
            version: VERSION,
            k: report.k,
            deltas: deltas.to_vec(),
            input: input.coefficients().iter().copied().map(pair).collect(),
            products: report.products.values.clone(),
            least_index: report.products.least_index + 1,
            stages: report
                .stages
                .iter()
                .map(|s| StageJson {
                    name: s.name.as_str(),
                    norm: s.state.norm_tracked(),
                    branch_mass: s.branch_mass,
                    amplitudes: s
                        .state
                        .support(0.0)
                        .into_iter()
                        .map(|i| AmplitudeJson {
                            index: i + 1,
                            label: basis_label(i, s.state.num_qubits()),
                            value: pair(s.state.amplitude(i)),
                        })
                        .collect(),
                })
                .collect(),
            branch_probability: report.branch_probability,
            total_probability: report.total_probability,
            ledger: ledger.iter().map(LedgerJson::from).collect(),
        }
    }
}
