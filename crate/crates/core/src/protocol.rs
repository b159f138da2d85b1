//! The transfer protocol in two forms.
//!
//! *Trace* mode follows the published single-branch chain literally: composite
//! state, Bell operation on the first message qubit, measurement `M`, routing
//! permutation `U`, filter `F`, success projector. Stage vectors keep the scale
//! the printed equations use.
//!
//! *Full* mode is the physical protocol: genuine tensor product of the message
//! with every channel, a Bell measurement on each (message qubit, sender qubit)
//! pair, and for each of the `4^k` outcomes an outcome-dependent permutation,
//! a Procrustean filter on the receiver qubits plus one ancilla, and
//! post-selection on the ancilla.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float math for no_std targets; unused when another dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::channels::{coefficient_products, make_channel, ChannelSpec, CoefficientProducts};
use crate::error::{Error, Result};
use crate::filterops::{
    build_filter, build_permutation, derive_permutation_for_branch, paper_filter_bipartite, verify_unitary, FilterPlan,
    OperatorMatrix,
};
use crate::published;
use crate::statevec::{basis_index, fidelity, gates, tensor, ProjectorSpec, StateVector};
use crate::NORM_TOLERANCE;

/// Message to transfer: `2^k` amplitudes `c_1 ... c_(2^k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InputState {
    state: StateVector,
}

impl InputState {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        Ok(Self {
            state: StateVector::normalized(coefficients)?,
        })
    }

    pub fn k(&self) -> usize {
        self.state.num_qubits()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        self.state.amplitudes()
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }
}

/// Composite register of the published protocol: `k` message qubits followed by
/// one qubit pair per channel, with exactly `2^k` nonzero amplitudes `m_i c_i`.
///
/// Message label `i` is paired with channel `j`'s `a`-term ket when bit `j` of
/// `i` is 0 and with its `b`-term ket otherwise. The result is not normalized;
/// its norm is `sqrt(sum |m_i c_i|^2)`.
pub fn compose_correlated_state(input: &InputState, channels: &[ChannelSpec]) -> Result<StateVector> {
    let k = channels.len();
    if input.k() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: input.k(),
        });
    }
    let m = coefficient_products(channels)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << (3 * k)];
    for (i, index) in composed_term_indices(channels).into_iter().enumerate() {
        amplitudes[index] = input.coefficients()[i] * m.values[i];
    }
    StateVector::from_amplitudes(amplitudes)
}

/// Register index carrying `c_i` in the composite state, for every `i`.
pub fn composed_term_indices(channels: &[ChannelSpec]) -> Vec<usize> {
    let k = channels.len();
    (0..1usize << k)
        .map(|i| {
            let mut index = i;
            for (j, ch) in channels.iter().enumerate() {
                let bit = ((i >> (k - 1 - j)) & 1) as u8;
                index = (index << 2) | basis_index(ch.term_label(bit)).expect("static label");
            }
            index
        })
        .collect()
}

/// Qubit roles of the published layouts, read off their success projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct PaperLayout {
    pub k: usize,
    pub measurement: ProjectorSpec,
    pub success: ProjectorSpec,
    /// Qubits left free by the success projector, in register order.
    pub receivers: Vec<usize>,
}

impl PaperLayout {
    pub fn for_k(k: usize) -> Result<Self> {
        let success: &[(usize, u8)] = match k {
            2 => &published::BIPARTITE_SUCCESS,
            3 => &published::TRIPARTITE_SUCCESS,
            _ => return Err(Error::UnsupportedSize { k }),
        };
        let success = ProjectorSpec::new(success.to_vec())?;
        let receivers = (0..3 * k).filter(|q| !success.constrains(*q)).collect();
        Ok(Self {
            k,
            measurement: ProjectorSpec::new(published::MEASUREMENT.to_vec())?,
            success,
            receivers,
        })
    }

    pub fn num_qubits(&self) -> usize {
        3 * self.k
    }

    /// Register index where `c_x` must end up: projector bits everywhere, `x` on the receivers.
    pub fn target(&self, x: usize) -> usize {
        let n = self.num_qubits();
        let fixed = self
            .success
            .constraints()
            .iter()
            .filter(|&&(_, b)| b == 1)
            .fold(0usize, |acc, &(q, _)| acc | 1 << (n - 1 - q));
        self.receivers.iter().enumerate().fold(fixed, |acc, (p, &q)| {
            if (x >> (self.k - 1 - p)) & 1 == 1 {
                acc | 1 << (n - 1 - q)
            } else {
                acc
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageName {
    Composed,
    PostBell,
    PostM,
    PostU,
    PostF,
    PostPs,
}

impl StageName {
    pub fn as_str(self) -> &'static str {
        match self {
            StageName::Composed => "composed",
            StageName::PostBell => "post_bell",
            StageName::PostM => "post_M",
            StageName::PostU => "post_U",
            StageName::PostF => "post_F",
            StageName::PostPs => "post_Ps",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStage {
    pub name: StageName,
    pub state: StateVector,
    /// Probability of the measurement outcome kept at this stage (`post_M` only).
    pub branch_mass: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceReport {
    pub k: usize,
    pub products: CoefficientProducts,
    pub stages: Vec<TraceStage>,
    /// Where each `c_i` sits after the measurement.
    pub survivors: Vec<usize>,
    /// Where each `c_i` is routed by `U`.
    pub targets: Vec<usize>,
    /// Derived routing, zero-based (from, to).
    pub routing: Vec<(usize, usize)>,
    pub permutation: OperatorMatrix,
    pub filter: OperatorMatrix,
    /// Constructive filter over the same retained indices (used when the literal one is unusable).
    pub constructive_filter: OperatorMatrix,
    /// `|m_least|^2 sum |c_i|^2`: squared norm of the projected stage at printed scale.
    pub branch_probability: f64,
    /// `2^k` times the single-branch value.
    pub total_probability: f64,
    /// Receiver qubits after post-selection, normalized.
    pub receiver_state: StateVector,
}

impl TraceReport {
    pub fn stage(&self, name: StageName) -> &TraceStage {
        self.stages
            .iter()
            .find(|s| s.name == name)
            .expect("every stage is recorded")
    }
}

/// Constructive filter sending `m_i c_i` at `targets[i]` to `m_least c_i`.
pub fn constructive_filter(m: &CoefficientProducts, targets: &[usize], dim: usize) -> Result<OperatorMatrix> {
    let ratios = (0..targets.len()).map(|i| Complex64::new(m.ratio(i), 0.0)).collect();
    let plan = FilterPlan::with_lowest_junk(targets.to_vec(), ratios, targets, dim)?;
    build_filter(&plan, dim)
}

/// Runs the published single-branch chain for `k = 2` or `k = 3`.
///
/// Requires the all-`a` product `m_1` to be the least, as the literal filter
/// does. For `k = 2` the published filter is used; the published `k = 3`
/// filter is not unitary, so the constructive one stands in for it.
pub fn paper_trace(input: &InputState, channels: &[ChannelSpec]) -> Result<TraceReport> {
    let k = channels.len();
    let layout = PaperLayout::for_k(k)?;
    let m = coefficient_products(channels)?;
    if m.least_index != 0 {
        return Err(Error::AssumptionViolated {
            least_index: m.least_index,
        });
    }
    let n = layout.num_qubits();
    let dim = 1usize << n;

    let composed = compose_correlated_state(input, channels)?;
    let post_bell = composed.apply_gate(&gates::bell_operation(), &[0])?;
    let kept = post_bell.project_unnormalized(&layout.measurement)?;
    let mass = (kept.norm_tracked() / post_bell.norm_tracked()).powi(2);
    let post_m = kept.scaled(1.0 / mass.sqrt());

    let first_qubit = 1usize << (n - 1);
    let survivors: Vec<usize> = composed_term_indices(channels)
        .iter()
        .map(|i| i & !first_qubit)
        .collect();
    let targets: Vec<usize> = (0..1usize << k).map(|x| layout.target(x)).collect();
    let routing = derive_permutation_for_branch(&survivors, &targets, n)?;
    let permutation = build_permutation(&routing, dim)?;
    let post_u = post_m.apply_operator(&permutation)?;

    let constructive = constructive_filter(&m, &targets, dim)?;
    let filter = if k == 2 {
        paper_filter_bipartite(&m)?
    } else {
        constructive.clone()
    };
    let post_f = post_u.apply_operator(&filter)?;
    let post_ps = post_f.project_unnormalized(&layout.success)?;

    let branch_probability = post_ps.norm_tracked().powi(2);
    let receiver_state = post_ps
        .free_part(&layout.success)?
        .renormalized()
        .ok_or(Error::NotNormalized { norm: 0.0 })?;

    let stage = |name, state, branch_mass| TraceStage {
        name,
        state,
        branch_mass,
    };
    Ok(TraceReport {
        k,
        stages: vec![
            stage(StageName::Composed, composed, None),
            stage(StageName::PostBell, post_bell, None),
            stage(StageName::PostM, post_m, Some(mass)),
            stage(StageName::PostU, post_u, None),
            stage(StageName::PostF, post_f, None),
            stage(StageName::PostPs, post_ps, None),
        ],
        survivors,
        targets,
        routing,
        permutation,
        filter,
        constructive_filter: constructive,
        branch_probability,
        total_probability: (1usize << k) as f64 * branch_probability,
        receiver_state,
        products: m,
    })
}

/// Outcome of a Bell measurement on one qubit pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    /// Computational-basis bits `(first, second)` read after CNOT and the Bell operation.
    pub fn bits(self) -> (u8, u8) {
        match self {
            BellOutcome::PhiPlus => (0, 0),
            BellOutcome::PhiMinus => (1, 0),
            BellOutcome::PsiPlus => (0, 1),
            BellOutcome::PsiMinus => (1, 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PhiMinus => "phi-",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PsiMinus => "psi-",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellBranch {
    pub outcome: BellOutcome,
    pub probability: f64,
    /// Post-measurement state, normalized; `None` if the outcome cannot occur.
    pub state: Option<StateVector>,
}

fn bell_rotate(state: &StateVector, pair: (usize, usize)) -> Result<StateVector> {
    state
        .apply_gate(&gates::cnot(), &[pair.0, pair.1])?
        .apply_gate(&gates::bell_operation(), &[pair.0])
}

fn bell_projector(pair: (usize, usize), outcome: BellOutcome) -> Result<ProjectorSpec> {
    let (z, x) = outcome.bits();
    ProjectorSpec::new(vec![(pair.0, z), (pair.1, x)])
}

/// Bell-basis measurement of two qubits, all four outcomes.
pub fn bell_measure_pair(state: &StateVector, pair: (usize, usize)) -> Result<[BellBranch; 4]> {
    let rotated = bell_rotate(state, pair)?;
    let branch = |outcome| -> Result<BellBranch> {
        let p = rotated.project(&bell_projector(pair, outcome)?)?;
        Ok(BellBranch {
            outcome,
            probability: p.probability,
            state: p.state,
        })
    };
    Ok([
        branch(BellOutcome::PhiPlus)?,
        branch(BellOutcome::PhiMinus)?,
        branch(BellOutcome::PsiPlus)?,
        branch(BellOutcome::PsiMinus)?,
    ])
}

/// One of the `4^k` measurement records of the full protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchOutcome {
    pub outcomes: Vec<BellOutcome>,
    /// Probability of this measurement record.
    pub measurement_probability: f64,
    /// Probability of this record and a successful post-selection.
    pub branch_probability: f64,
    /// Receiver qubits after a successful post-selection.
    pub receiver_state: Option<StateVector>,
    pub fidelity: Option<f64>,
}

impl BranchOutcome {
    pub fn outcome_label(&self) -> alloc::string::String {
        let labels: Vec<&str> = self.outcomes.iter().map(|o| o.label()).collect();
        labels.join(",")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferReport {
    pub k: usize,
    pub departures: Vec<f64>,
    pub p_analytic: f64,
    pub p_simulated: f64,
    /// Smallest conditional fidelity over branches that can succeed.
    pub min_fidelity: Option<f64>,
    pub branches: Vec<BranchOutcome>,
    /// Worst unitarity deviation over all operators the run applied.
    pub max_unitarity_deviation: f64,
}

/// Tolerances for [`TransferReport::violations`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub probability_agreement: f64,
    pub fidelity: f64,
    pub conservation: f64,
    pub unitarity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            probability_agreement: crate::ORACLE_TOLERANCE,
            fidelity: crate::PROBABILITY_TOLERANCE,
            conservation: crate::PROBABILITY_TOLERANCE,
            unitarity: crate::UNITARITY_TOLERANCE,
        }
    }
}

/// A report invariant that failed, with the offending value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Violation {
    ProbabilityMismatch { simulated: f64, analytic: f64 },
    LowFidelity { fidelity: f64 },
    MassNotConserved { total: f64 },
    SuccessExceedsOne { total: f64 },
    NonUnitary { deviation: f64 },
}

impl TransferReport {
    pub fn measurement_total(&self) -> f64 {
        self.branches.iter().map(|b| b.measurement_probability).sum()
    }

    pub fn violations(&self, tol: &Tolerances) -> Vec<Violation> {
        let mut out = Vec::new();
        if !((self.p_simulated - self.p_analytic).abs() <= tol.probability_agreement) {
            out.push(Violation::ProbabilityMismatch {
                simulated: self.p_simulated,
                analytic: self.p_analytic,
            });
        }
        if let Some(f) = self.min_fidelity {
            if !(f >= 1.0 - tol.fidelity) {
                out.push(Violation::LowFidelity { fidelity: f });
            }
        }
        let total = self.measurement_total();
        if !((total - 1.0).abs() <= tol.conservation) {
            out.push(Violation::MassNotConserved { total });
        }
        if !(self.p_simulated <= 1.0 + tol.conservation) {
            out.push(Violation::SuccessExceedsOne {
                total: self.p_simulated,
            });
        }
        if !(self.max_unitarity_deviation <= tol.unitarity) {
            out.push(Violation::NonUnitary {
                deviation: self.max_unitarity_deviation,
            });
        }
        out
    }
}

/// Qubit indices of the full-protocol register: message qubits `0..k`, then
/// channel `j` on `(k + 2j, k + 2j + 1)`; the first of each pair is the sender's.
fn sender(k: usize, j: usize) -> usize {
    k + 2 * j
}

fn decode_outcomes(branch: usize, k: usize) -> Vec<BellOutcome> {
    (0..k)
        .map(|j| BellOutcome::ALL[(branch >> (2 * (k - 1 - j))) & 3])
        .collect()
}

fn record_projector(outcomes: &[BellOutcome]) -> Result<ProjectorSpec> {
    let k = outcomes.len();
    let mut constraints = Vec::with_capacity(2 * k);
    for (j, o) in outcomes.iter().enumerate() {
        let (z, x) = o.bits();
        constraints.push((j, z));
        constraints.push((sender(k, j), x));
    }
    ProjectorSpec::new(constraints)
}

/// Column `x` of a branch map holds the receiver amplitudes produced by message `|x>`.
/// Every column has exactly one nonzero entry: `(row, value)`.
fn monomial_columns(columns: &[StateVector]) -> Result<Vec<(usize, Complex64)>> {
    columns
        .iter()
        .enumerate()
        .map(|(x, col)| {
            let mut nonzero = col
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(_, a)| **a != Complex64::new(0.0, 0.0));
            match (nonzero.next(), nonzero.next()) {
                (Some((row, &value)), None) => Ok((row, value)),
                _ => Err(Error::NotMonomial { column: x }),
            }
        })
        .collect()
}

/// Enumerates every Bell-measurement record of the physical protocol and applies
/// the per-record correction, filter and post-selection.
///
/// The corrections are derived from the channels alone: each basis message
/// `|x>` is pushed through the Bell rotations to find, per record, where its
/// amplitude lands on the receivers and with what coefficient. All records are
/// filtered down to the smallest coefficient magnitude found over every record.
pub fn run_full_protocol(input: &InputState, channels: &[ChannelSpec]) -> Result<TransferReport> {
    let k = channels.len();
    if input.k() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: input.k(),
        });
    }
    let p_analytic = {
        let m = coefficient_products(channels)?;
        (1usize << k) as f64 * m.least_value * m.least_value
    };
    let channel_states: Vec<StateVector> = channels.iter().map(make_channel).collect();
    let pairs: Vec<(usize, usize)> = (0..k).map(|j| (j, sender(k, j))).collect();
    let records = 1usize << (2 * k);
    let messages = 1usize << k;

    // Branch maps from basis messages.
    let mut rotated_basis = Vec::with_capacity(messages);
    for x in 0..messages {
        let mut parts = vec![StateVector::basis(k, x)?];
        parts.extend(channel_states.iter().cloned());
        let mut s = tensor(&parts)?;
        for &pair in &pairs {
            s = bell_rotate(&s, pair)?;
        }
        rotated_basis.push(s);
    }
    let mut maps = Vec::with_capacity(records);
    for branch in 0..records {
        let proj = record_projector(&decode_outcomes(branch, k))?;
        let columns = rotated_basis
            .iter()
            .map(|s| s.free_part(&proj))
            .collect::<Result<Vec<_>>>()?;
        maps.push(monomial_columns(&columns)?);
    }
    let target = maps
        .iter()
        .flatten()
        .map(|(_, d)| d.norm())
        .fold(f64::INFINITY, f64::min);

    // Measurement of the actual message, pair by pair.
    let mut parts = vec![input.state().clone()];
    parts.extend(channel_states);
    let mut frontier = vec![(Vec::new(), 1.0, Some(tensor(&parts)?))];
    for &pair in &pairs {
        let mut next = Vec::with_capacity(frontier.len() * 4);
        for (outcomes, p, state) in frontier {
            match state {
                Some(s) => {
                    for b in bell_measure_pair(&s, pair)? {
                        let mut o: Vec<BellOutcome> = outcomes.clone();
                        o.push(b.outcome);
                        next.push((o, p * b.probability, b.state));
                    }
                }
                None => {
                    for outcome in BellOutcome::ALL {
                        let mut o: Vec<BellOutcome> = outcomes.clone();
                        o.push(outcome);
                        next.push((o, 0.0, None));
                    }
                }
            }
        }
        frontier = next;
    }

    let ext_dim = 1usize << (k + 1);
    let ancilla_zero = ProjectorSpec::new(vec![(k, 0)])?;
    let mut max_dev: f64 = 0.0;
    let mut branches = Vec::with_capacity(records);
    for ((outcomes, p_meas, state), map) in frontier.into_iter().zip(&maps) {
        let proj = record_projector(&outcomes)?;
        let survivors: Vec<usize> = map.iter().map(|(row, _)| row << 1).collect();
        let targets: Vec<usize> = (0..messages).map(|x| x << 1).collect();
        let routing = derive_permutation_for_branch(&survivors, &targets, k + 1)?;
        let perm = build_permutation(&routing, ext_dim)?;
        let ratios = map.iter().map(|(_, d)| Complex64::new(target, 0.0) / d).collect();
        let plan = FilterPlan::with_lowest_junk(targets.clone(), ratios, &targets, ext_dim)?;
        let filter = build_filter(&plan, ext_dim)?;
        max_dev = max_dev.max(verify_unitary(&perm)).max(verify_unitary(&filter));

        let (branch_probability, receiver_state) = match state {
            Some(s) if p_meas > 0.0 => {
                let received = s.free_part(&proj)?.scaled(p_meas.sqrt());
                let out = received
                    .kron(&StateVector::zero(1))
                    .apply_operator(&perm)?
                    .apply_operator(&filter)?
                    .project_unnormalized(&ancilla_zero)?;
                let success = out.norm_tracked().powi(2);
                (success, out.free_part(&ancilla_zero)?.renormalized())
            }
            _ => (0.0, None),
        };
        let fidelity = match &receiver_state {
            Some(r) => Some(fidelity(r, input.state())?),
            None => None,
        };
        branches.push(BranchOutcome {
            outcomes,
            measurement_probability: p_meas,
            branch_probability,
            receiver_state,
            fidelity,
        });
    }

    let p_simulated = branches.iter().map(|b| b.branch_probability).sum();
    let min_fidelity = branches
        .iter()
        .filter(|b| b.branch_probability > 0.0)
        .filter_map(|b| b.fidelity)
        .reduce(f64::min);
    Ok(TransferReport {
        k,
        departures: channels.iter().map(|c| c.departure()).collect(),
        p_analytic,
        p_simulated,
        min_fidelity,
        branches,
        max_unitarity_deviation: max_dev,
    })
}

/// Whether the trace's final receiver state and a full-protocol branch agree.
pub fn receiver_states_agree(a: &StateVector, b: &StateVector, tol: f64) -> bool {
    a.num_qubits() == b.num_qubits()
        && a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .all(|(x, y)| (x - y).norm() <= tol)
}

/// Normalizes raw coefficients into an [`InputState`], rejecting the zero vector.
pub fn normalize_input(raw: Vec<Complex64>) -> Result<InputState> {
    let s = StateVector::from_amplitudes(raw)?;
    let n = s.renormalized().ok_or(Error::NotNormalized { norm: 0.0 })?;
    debug_assert!((n.norm_tracked() - 1.0).abs() <= NORM_TOLERANCE);
    InputState::new(n.amplitudes().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::paper_channels;
    use crate::filterops::Provenance;
    use core::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sample_input(k: usize) -> InputState {
        let raw = (0..1usize << k)
            .map(|i| Complex64::new(0.3 + 0.1 * i as f64, 0.05 * i as f64 - 0.2))
            .collect();
        normalize_input(raw).unwrap()
    }

    #[test]
    fn composed_state_single_term() {
        let input = InputState::new(vec![c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        let s = compose_correlated_state(&input, &paper_channels(&[0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(s.support(0.0), vec![1]);
        assert!((s.amplitude(1).re - 0.5).abs() < 1e-15);
        assert!((s.norm_tracked() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn composed_state_support_before_bell_operation() {
        let s = compose_correlated_state(&sample_input(2), &paper_channels(&[-0.2, 0.1]).unwrap()).unwrap();
        // 1-based 2, 19, 46, 63
        assert_eq!(s.support(0.0), vec![1, 18, 45, 62]);
    }

    #[test]
    fn tripartite_composed_signs() {
        let input = normalize_input(vec![c(1.0); 8]).unwrap();
        let s = compose_correlated_state(&input, &paper_channels(&[0.0; 3]).unwrap()).unwrap();
        let scale = 1.0 / (2.0 * 2f64.sqrt()) / 8f64.sqrt();
        for (i, idx) in composed_term_indices(&paper_channels(&[0.0; 3]).unwrap())
            .into_iter()
            .enumerate()
        {
            let expected = if i & 1 == 1 { -scale } else { scale };
            assert!((s.amplitude(idx).re - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn layouts_read_from_success_projectors() {
        let two = PaperLayout::for_k(2).unwrap();
        assert_eq!(two.receivers, vec![3, 4]);
        assert_eq!((0..4).map(|x| two.target(x)).collect::<Vec<_>>(), vec![0, 2, 4, 6]);
        let three = PaperLayout::for_k(3).unwrap();
        assert_eq!(three.receivers, vec![3, 5, 7]);
        assert_eq!(three.target(0), 4);
        assert!(PaperLayout::for_k(4).is_err());
    }

    #[test]
    fn bell_measurement_of_product_zero_state() {
        let branches = bell_measure_pair(&StateVector::zero(2), (0, 1)).unwrap();
        assert!((branches[0].probability - 0.5).abs() < 1e-15);
        assert!((branches[1].probability - 0.5).abs() < 1e-15);
        assert_eq!(branches[2].probability, 0.0);
        assert_eq!(branches[3].probability, 0.0);
        assert!(branches[2].state.is_none());
    }

    #[test]
    fn bell_measurement_across_two_bell_pairs_is_uniform() {
        let bell = make_channel(&paper_channels(&[0.0]).unwrap()[0]);
        let s = tensor(&[bell.clone(), bell]).unwrap();
        for b in bell_measure_pair(&s, (0, 2)).unwrap() {
            assert!((b.probability - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_measurement_of_a_bell_pair_is_sharp() {
        let bell = make_channel(&paper_channels(&[0.0]).unwrap()[0]);
        let b = bell_measure_pair(&bell, (0, 1)).unwrap();
        assert!((b[0].probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_at_zero_departure() {
        let input = sample_input(2);
        let t = paper_trace(&input, &paper_channels(&[0.0, 0.0]).unwrap()).unwrap();
        assert!((t.total_probability - 1.0).abs() < 1e-12);
        assert!(receiver_states_agree(&t.receiver_state, input.state(), 1e-12));
        let post_f = &t.stage(StageName::PostF).state;
        for (i, &idx) in t.targets.iter().enumerate() {
            assert!((post_f.amplitude(idx) - input.coefficients()[i] * 0.5).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_measurement_keeps_half_the_mass() {
        let t = paper_trace(&sample_input(2), &paper_channels(&[-0.3, -0.1]).unwrap()).unwrap();
        assert!((t.stage(StageName::PostM).branch_mass.unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(t.survivors, vec![1, 18, 13, 30]);
    }

    #[test]
    fn trace_rejects_positive_departures() {
        let err = paper_trace(&sample_input(2), &paper_channels(&[0.1, 0.1]).unwrap()).unwrap_err();
        assert_eq!(err, Error::AssumptionViolated { least_index: 3 });
    }

    #[test]
    fn trace_uses_literal_filter_only_for_two_qubits() {
        let t2 = paper_trace(&sample_input(2), &paper_channels(&[-0.2, -0.2]).unwrap()).unwrap();
        assert_eq!(t2.filter.provenance(), Provenance::PaperLiteral);
        let t3 = paper_trace(&sample_input(3), &paper_channels(&[-0.2; 3]).unwrap()).unwrap();
        assert_eq!(t3.filter.provenance(), Provenance::Constructive);
    }

    #[test]
    fn full_protocol_at_minus_pi_over_12() {
        let r = run_full_protocol(&sample_input(2), &paper_channels(&[-PI / 12.0; 2]).unwrap()).unwrap();
        assert!((r.p_simulated - 0.25).abs() < 1e-10);
        assert!((r.p_analytic - 0.25).abs() < 1e-12);
        assert_eq!(r.branches.len(), 16);
        assert!(r.violations(&Tolerances::default()).is_empty());
    }

    #[test]
    fn full_protocol_near_the_boundary_stays_monomial() {
        let d = -core::f64::consts::FRAC_PI_4 + 1e-9;
        let r = run_full_protocol(&sample_input(2), &paper_channels(&[d, 0.3]).unwrap()).unwrap();
        assert!((r.p_simulated - r.p_analytic).abs() < 1e-10);
    }

    #[test]
    fn full_protocol_rejects_size_mismatch() {
        let err = run_full_protocol(&sample_input(3), &paper_channels(&[0.0, 0.0]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
