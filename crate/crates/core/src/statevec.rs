//! Dense complex state vectors over `n` qubits.
//!
//! Qubit 0 is the most significant bit: the basis label `b0 b1 ... b(n-1)`
//! lives at index `sum b_k * 2^(n-1-k)`. With this ordering a 1-based matrix
//! index in the published operator lists equals the zero-based index plus one.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float math for no_std targets; unused when another dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::filterops::OperatorMatrix;
use crate::NORM_TOLERANCE;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Maps a label such as `"000101"` to its zero-based basis index.
pub fn basis_index(label: &str) -> Result<usize> {
    if label.is_empty() || label.len() > usize::BITS as usize - 1 {
        return Err(Error::InvalidLabel);
    }
    label.bytes().try_fold(0usize, |acc, b| match b {
        b'0' => Ok(acc << 1),
        b'1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidLabel),
    })
}

/// Inverse of [`basis_index`] for an `n`-qubit register.
pub fn basis_label(index: usize, num_qubits: usize) -> String {
    (0..num_qubits)
        .map(|q| if bit(index, q, num_qubits) == 1 { '1' } else { '0' })
        .collect()
}

/// Value of qubit `qubit` inside basis index `index`.
#[inline]
pub fn bit(index: usize, qubit: usize, num_qubits: usize) -> u8 {
    ((index >> (num_qubits - 1 - qubit)) & 1) as u8
}

#[inline]
fn mask(qubit: usize, num_qubits: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

/// Single-qubit gates and the two-qubit CNOT used by the protocols, row-major.
pub mod gates {
    use num_complex::Complex64;

    const O: Complex64 = Complex64::new(0.0, 0.0);
    const I: Complex64 = Complex64::new(1.0, 0.0);

    /// The "Bell operation" |0> -> (|0>+|1>)/sqrt2, |1> -> (|0>-|1>)/sqrt2.
    pub fn bell_operation() -> [Complex64; 4] {
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        [h, h, h, -h]
    }

    pub fn identity() -> [Complex64; 4] {
        [I, O, O, I]
    }

    pub fn pauli_x() -> [Complex64; 4] {
        [O, I, I, O]
    }

    pub fn pauli_z() -> [Complex64; 4] {
        [I, O, O, -I]
    }

    /// Control is the first target, flip target the second.
    pub fn cnot() -> [Complex64; 16] {
        [
            I, O, O, O, //
            O, I, O, O, //
            O, O, O, I, //
            O, O, I, O,
        ]
    }
}

/// Complex amplitudes over `num_qubits` qubits plus the Euclidean norm they carry.
///
/// Most states are normalized. Trace stages are left at the
/// published scale, and `norm_tracked` records it.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
    norm: f64,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0).expect("index 0 is always valid")
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidIndex { index, bound: dim });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
            norm: 1.0,
        })
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Self::basis(label.len(), basis_index(label)?)
    }

    /// Wraps raw amplitudes without normalizing them. The length must be `2^n`, `n >= 1`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two().max(2),
                found: len,
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NotNormalized { norm: f64::NAN });
        }
        let num_qubits = len.trailing_zeros() as usize;
        let norm = norm_of(&amplitudes);
        Ok(Self {
            num_qubits,
            amplitudes,
            norm,
        })
    }

    /// Like [`StateVector::from_amplitudes`] but insists the input is already a unit vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::from_amplitudes(amplitudes)?;
        if (state.norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm: state.norm });
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// Euclidean norm of the stored amplitudes.
    pub fn norm_tracked(&self) -> f64 {
        self.norm
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm - 1.0).abs() <= NORM_TOLERANCE
    }

    /// Indices whose amplitude magnitude exceeds `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > threshold)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rescales to unit norm. Returns `None` for the zero vector.
    pub fn renormalized(&self) -> Option<StateVector> {
        if self.norm == 0.0 {
            return None;
        }
        Some(self.scaled(1.0 / self.norm))
    }

    pub fn scaled(&self, factor: f64) -> StateVector {
        let amplitudes: Vec<Complex64> = self.amplitudes.iter().map(|a| a * factor).collect();
        let norm = norm_of(&amplitudes);
        StateVector {
            num_qubits: self.num_qubits,
            amplitudes,
            norm,
        }
    }

    /// Tensor product of `self` (high qubits) with `other` (low qubits).
    pub fn kron(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        let norm = norm_of(&amplitudes);
        StateVector {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes,
            norm,
        }
    }

    /// Applies a `2^t x 2^t` row-major gate to the listed target qubits.
    ///
    /// The first target is the most significant bit of the gate's own index.
    pub fn apply_gate(&self, gate: &[Complex64], targets: &[usize]) -> Result<StateVector> {
        let n = self.num_qubits;
        let t = targets.len();
        if t == 0 || t > n {
            return Err(Error::DimensionMismatch { expected: n, found: t });
        }
        let gdim = 1usize << t;
        if gate.len() != gdim * gdim {
            return Err(Error::DimensionMismatch {
                expected: gdim * gdim,
                found: gate.len(),
            });
        }
        for (i, &q) in targets.iter().enumerate() {
            if q >= n {
                return Err(Error::InvalidIndex { index: q, bound: n });
            }
            if targets[..i].contains(&q) {
                return Err(Error::DuplicateMapping { index: q });
            }
        }

        let offsets: Vec<usize> = (0..gdim)
            .map(|j| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| (j >> (t - 1 - p)) & 1 == 1)
                    .fold(0, |acc, (_, &q)| acc | mask(q, n))
            })
            .collect();
        let target_mask = offsets[gdim - 1];

        let mut out = vec![ZERO; self.dim()];
        let mut local = vec![ZERO; gdim];
        for base in (0..self.dim()).filter(|i| i & target_mask == 0) {
            for (j, off) in offsets.iter().enumerate() {
                local[j] = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let coeffs = &gate[row * gdim..(row + 1) * gdim];
                out[base | off] = coeffs.iter().zip(&local).map(|(g, a)| g * a).sum();
            }
        }
        let norm = norm_of(&out);
        Ok(StateVector {
            num_qubits: n,
            amplitudes: out,
            norm,
        })
    }

    /// Full matrix-vector product with an operator of matching dimension.
    pub fn apply_operator(&self, op: &OperatorMatrix) -> Result<StateVector> {
        let amplitudes = op.apply(&self.amplitudes)?;
        let norm = norm_of(&amplitudes);
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amplitudes,
            norm,
        })
    }

    /// Zeroes every amplitude outside the projector's subspace, without rescaling.
    pub fn project_unnormalized(&self, proj: &ProjectorSpec) -> Result<StateVector> {
        proj.validate(self.num_qubits)?;
        let amplitudes: Vec<Complex64> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| if proj.accepts(i, self.num_qubits) { *a } else { ZERO })
            .collect();
        let norm = norm_of(&amplitudes);
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amplitudes,
            norm,
        })
    }

    /// Born-rule projection. The probability is relative to the state's own norm,
    /// so unnormalized inputs are handled; the post-measurement state is renormalized.
    pub fn project(&self, proj: &ProjectorSpec) -> Result<Projection> {
        let kept = self.project_unnormalized(proj)?;
        let total = self.norm * self.norm;
        let probability = if total == 0.0 {
            0.0
        } else {
            kept.norm * kept.norm / total
        };
        Ok(Projection {
            probability,
            state: kept.renormalized(),
        })
    }

    /// Amplitudes on the qubits the projector leaves free, taken from the slice
    /// where the constrained qubits hold their required bits. Free qubits keep
    /// their relative order.
    pub fn free_part(&self, proj: &ProjectorSpec) -> Result<StateVector> {
        let n = self.num_qubits;
        proj.validate(n)?;
        let free: Vec<usize> = (0..n).filter(|q| !proj.constrains(*q)).collect();
        if free.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let fixed = proj
            .constraints()
            .iter()
            .fold(0usize, |acc, &(q, b)| if b == 1 { acc | mask(q, n) } else { acc });
        let m = free.len();
        let amplitudes: Vec<Complex64> = (0..1usize << m)
            .map(|sub| {
                let idx = free.iter().enumerate().fold(fixed, |acc, (p, &q)| {
                    if (sub >> (m - 1 - p)) & 1 == 1 {
                        acc | mask(q, n)
                    } else {
                        acc
                    }
                });
                self.amplitudes[idx]
            })
            .collect();
        let norm = norm_of(&amplitudes);
        Ok(StateVector {
            num_qubits: m,
            amplitudes,
            norm,
        })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Outcome of [`StateVector::project`]. `state` is `None` when the probability is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub probability: f64,
    pub state: Option<StateVector>,
}

/// Tensor product of the parts in order; the first part holds the most significant qubits.
pub fn tensor(parts: &[StateVector]) -> Result<StateVector> {
    let (first, rest) = parts
        .split_first()
        .ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?;
    Ok(rest.iter().fold(first.clone(), |acc, p| acc.kron(p)))
}

/// `|<s1|s2>|^2` for two normalized states.
pub fn fidelity(s1: &StateVector, s2: &StateVector) -> Result<f64> {
    for s in [s1, s2] {
        if !s.is_normalized() {
            return Err(Error::NotNormalized { norm: s.norm });
        }
    }
    let overlap = s1.inner(s2)?.norm_sqr();
    Ok(overlap.clamp(0.0, 1.0))
}

/// Projector onto fixed values of some qubits, identity on the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectorSpec {
    constraints: Vec<(usize, u8)>,
}

impl ProjectorSpec {
    pub fn new(constraints: Vec<(usize, u8)>) -> Result<Self> {
        for (i, &(q, b)) in constraints.iter().enumerate() {
            if b > 1 {
                return Err(Error::InvalidLabel);
            }
            if constraints[..i].iter().any(|&(p, _)| p == q) {
                return Err(Error::DuplicateMapping { index: q });
            }
        }
        Ok(Self { constraints })
    }

    /// Constrains `qubits[i]` to bit `i` of `value` (first qubit most significant).
    pub fn from_bits(qubits: &[usize], value: usize) -> Result<Self> {
        let k = qubits.len();
        Self::new(
            qubits
                .iter()
                .enumerate()
                .map(|(p, &q)| (q, ((value >> (k - 1 - p)) & 1) as u8))
                .collect(),
        )
    }

    /// All `2^k` projectors over the given qubits; they resolve the identity.
    pub fn outcomes(qubits: &[usize]) -> Result<Vec<Self>> {
        (0..1usize << qubits.len())
            .map(|v| Self::from_bits(qubits, v))
            .collect()
    }

    pub fn constraints(&self) -> &[(usize, u8)] {
        &self.constraints
    }

    pub fn constrains(&self, qubit: usize) -> bool {
        self.constraints.iter().any(|&(q, _)| q == qubit)
    }

    pub fn accepts(&self, index: usize, num_qubits: usize) -> bool {
        self.constraints.iter().all(|&(q, b)| bit(index, q, num_qubits) == b)
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        match self.constraints.iter().find(|&&(q, _)| q >= num_qubits) {
            Some(&(q, _)) => Err(Error::InvalidIndex {
                index: q,
                bound: num_qubits,
            }),
            None => Ok(()),
        }
    }
}

pub(crate) fn norm_of(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn assert_close(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn labels_follow_msb_first_ordering() {
        assert_eq!(basis_index("000001").unwrap(), 1);
        assert_eq!(basis_index("010010").unwrap(), 18);
        assert_eq!(basis_label(13, 6), "001101");
        assert_eq!(basis_index("01x"), Err(Error::InvalidLabel));
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = tensor(&[
            StateVector::from_label("0").unwrap(),
            StateVector::from_label("1").unwrap(),
        ])
        .unwrap();
        assert_eq!(s.num_qubits(), 2);
        assert_eq!(s.amplitudes(), &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn tensor_distributes_over_superposition() {
        let plus = StateVector::normalized(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let s = tensor(&[plus, StateVector::zero(1)]).unwrap();
        assert_close(
            s.amplitudes(),
            &[c(FRAC_1_SQRT_2), c(0.0), c(FRAC_1_SQRT_2), c(0.0)],
            0.0,
        );
    }

    #[test]
    fn bell_operation_on_first_qubit() {
        let s = StateVector::zero(3).apply_gate(&gates::bell_operation(), &[0]).unwrap();
        let mut expected = vec![c(0.0); 8];
        expected[0] = c(FRAC_1_SQRT_2);
        expected[4] = c(FRAC_1_SQRT_2);
        assert_close(s.amplitudes(), &expected, 1e-15);
    }

    #[test]
    fn bell_operation_is_an_involution() {
        let s = StateVector::normalized(vec![c(0.6), Complex64::new(0.0, 0.8), c(0.0), c(0.0)]).unwrap();
        let twice = s
            .apply_gate(&gates::bell_operation(), &[1])
            .unwrap()
            .apply_gate(&gates::bell_operation(), &[1])
            .unwrap();
        assert_close(twice.amplitudes(), s.amplitudes(), 1e-15);
    }

    #[test]
    fn identity_gate_is_bit_exact() {
        let s = StateVector::normalized(vec![c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        assert_eq!(s.apply_gate(&gates::identity(), &[0]).unwrap(), s);
    }

    #[test]
    fn cnot_respects_target_order() {
        // control qubit 2, flip qubit 0: |001> -> |101>
        let s = StateVector::from_label("001")
            .unwrap()
            .apply_gate(&gates::cnot(), &[2, 0])
            .unwrap();
        assert_eq!(s, StateVector::from_label("101").unwrap());
    }

    #[test]
    fn gate_errors() {
        let s = StateVector::zero(2);
        assert!(matches!(
            s.apply_gate(&gates::cnot(), &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            s.apply_gate(&gates::cnot(), &[0, 0]),
            Err(Error::DuplicateMapping { .. })
        ));
        assert!(matches!(
            s.apply_gate(&gates::pauli_x(), &[2]),
            Err(Error::InvalidIndex { .. })
        ));
    }

    #[test]
    fn projection_on_basis_state() {
        let p = StateVector::zero(1)
            .project(&ProjectorSpec::new(vec![(0, 0)]).unwrap())
            .unwrap();
        assert_eq!(p.probability, 1.0);
        assert_eq!(p.state.unwrap(), StateVector::zero(1));
    }

    #[test]
    fn projection_on_equal_superposition() {
        let plus = StateVector::normalized(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let p = plus.project(&ProjectorSpec::new(vec![(0, 1)]).unwrap()).unwrap();
        assert!((p.probability - 0.5).abs() < 1e-15);
        assert_close(p.state.unwrap().amplitudes(), &[c(0.0), c(1.0)], 1e-15);
    }

    #[test]
    fn zero_probability_projection_is_flagged() {
        let p = StateVector::zero(1)
            .project(&ProjectorSpec::new(vec![(0, 1)]).unwrap())
            .unwrap();
        assert_eq!(p.probability, 0.0);
        assert!(p.state.is_none());
    }

    #[test]
    fn projector_rejects_duplicates_and_out_of_range() {
        assert!(ProjectorSpec::new(vec![(0, 0), (0, 1)]).is_err());
        let p = ProjectorSpec::new(vec![(3, 0)]).unwrap();
        assert!(matches!(
            StateVector::zero(2).project(&p),
            Err(Error::InvalidIndex { .. })
        ));
    }

    #[test]
    fn free_part_extracts_the_remaining_qubits() {
        // |1>|psi>|0> with psi = (0.6, 0.8)
        let psi = StateVector::normalized(vec![c(0.6), c(0.8)]).unwrap();
        let s = tensor(&[StateVector::from_label("1").unwrap(), psi.clone(), StateVector::zero(1)]).unwrap();
        let p = ProjectorSpec::new(vec![(0, 1), (2, 0)]).unwrap();
        assert_eq!(s.free_part(&p).unwrap(), psi);
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::zero(1);
        let one = StateVector::from_label("1").unwrap();
        let plus = StateVector::normalized(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        assert!((fidelity(&plus, &plus).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!((fidelity(&plus, &zero).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_errors() {
        let two = StateVector::zero(2);
        assert!(matches!(
            fidelity(&StateVector::zero(1), &two),
            Err(Error::DimensionMismatch { .. })
        ));
        let loose = StateVector::from_amplitudes(vec![c(1.0), c(0.1)]).unwrap();
        assert!(matches!(fidelity(&loose, &loose), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn normalized_rejects_loose_input() {
        assert!(StateVector::normalized(vec![c(1.0), c(1e-4)]).is_err());
        assert!(StateVector::normalized(vec![c(1.0), c(1e-5)]).is_ok());
        assert!(StateVector::from_amplitudes(vec![c(1.0); 3]).is_err());
    }
}
