//! Dense operators on the full register: the routing permutation `U`, the
//! Procrustean filter `F`, their published counterparts, and a unitarity check.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
// Float math for no_std targets; unused when another dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::channels::CoefficientProducts;
use crate::error::{Error, Result};
use crate::published::{self, FEntry};
use crate::UNITARITY_TOLERANCE;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Permutation,
    Filter,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Built from the operator's defining action.
    Constructive,
    /// Transcribed from the published element lists.
    PaperLiteral,
}

/// Square complex matrix of dimension `dim`, stored row-major.
///
/// Permutations also keep their index map so that applying them moves
/// amplitudes exactly instead of going through a floating-point product.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    kind: OperatorKind,
    provenance: Provenance,
    /// `destination[i]`: where basis state `i` is sent.
    destination: Option<Vec<usize>>,
}

impl OperatorMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Self {
            dim,
            entries,
            kind: OperatorKind::General,
            provenance: Provenance::Constructive,
            destination: None,
        }
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            dim,
            entries,
            kind: OperatorKind::General,
            provenance: Provenance::Constructive,
            destination: None,
        })
    }

    fn from_destination(destination: Vec<usize>) -> Self {
        let dim = destination.len();
        let mut entries = vec![ZERO; dim * dim];
        for (src, &dst) in destination.iter().enumerate() {
            entries[dst * dim + src] = ONE;
        }
        Self {
            dim,
            entries,
            kind: OperatorKind::Permutation,
            provenance: Provenance::Constructive,
            destination: Some(destination),
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    /// Index map of a permutation operator.
    pub fn destination(&self) -> Option<&[usize]> {
        self.destination.as_deref()
    }

    /// Unordered swap pairs of a permutation that is a product of disjoint transpositions.
    pub fn transpositions(&self) -> Option<Vec<(usize, usize)>> {
        let dest = self.destination.as_ref()?;
        let mut pairs = Vec::new();
        for (i, &d) in dest.iter().enumerate() {
            if d == i {
                continue;
            }
            if dest[d] != i {
                return None;
            }
            if i < d {
                pairs.push((i, d));
            }
        }
        Some(pairs)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        if let Some(dest) = &self.destination {
            let mut out = vec![ZERO; self.dim];
            for (src, &dst) in dest.iter().enumerate() {
                out[dst] = v[src];
            }
            return Ok(out);
        }
        Ok(self
            .entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).filter(|(m, _)| **m != ZERO).map(|(m, x)| m * x).sum())
            .collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> OperatorMatrix {
        let n = self.dim;
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        let destination = self.destination.as_ref().map(|d| {
            let mut inv = vec![0; n];
            for (src, &dst) in d.iter().enumerate() {
                inv[dst] = src;
            }
            inv
        });
        Self {
            dim: n,
            entries,
            kind: self.kind,
            provenance: self.provenance,
            destination,
        }
    }
}

/// Largest `|(O^dagger O - I)_ij|` or `|(O O^dagger - I)_ij|`.
pub fn verify_unitary(op: &OperatorMatrix) -> f64 {
    let n = op.dim;
    let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
    let mut cols: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n];
    for (r, row) in op.entries.chunks(n).enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v != ZERO {
                rows[r].push((c, v));
                cols[c].push((r, v));
            }
        }
    }
    // (O^dagger O)_ij = sum_k conj(O_ki) O_kj: accumulate over rows k.
    // (O O^dagger)_ij = sum_k O_ik conj(O_jk): accumulate over columns k.
    let gram = |groups: &[Vec<(usize, Complex64)>], conj_first: bool| {
        let mut g = vec![ZERO; n * n];
        for group in groups {
            for &(i, x) in group {
                for &(j, y) in group {
                    g[i * n + j] += if conj_first { x.conj() * y } else { x * y.conj() };
                }
            }
        }
        (0..n * n)
            .map(|idx| {
                let expected = if idx / n == idx % n { ONE } else { ZERO };
                (g[idx] - expected).norm()
            })
            .fold(0.0, f64::max)
    };
    gram(&rows, true).max(gram(&cols, false))
}

/// Permutation sending each `from` to its `to`, completed to a full permutation.
///
/// Pairs whose endpoints are untouched elsewhere become transpositions
/// (`U[from][to] = U[to][from] = 1`), which is how the published `U` lists are
/// written. Longer chains are closed back onto their start; all other indices
/// are fixed.
pub fn build_permutation(mapping: &[(usize, usize)], dim: usize) -> Result<OperatorMatrix> {
    let mut forward: Vec<Option<usize>> = vec![None; dim];
    let mut is_target = vec![false; dim];
    for &(from, to) in mapping {
        for idx in [from, to] {
            if idx >= dim {
                return Err(Error::InvalidIndex { index: idx, bound: dim });
            }
        }
        if forward[from].is_some() {
            return Err(Error::DuplicateMapping { index: from });
        }
        if is_target[to] {
            return Err(Error::DuplicateMapping { index: to });
        }
        forward[from] = Some(to);
        is_target[to] = true;
    }

    let mut destination: Vec<usize> = (0..dim).collect();
    for &(from, to) in mapping {
        destination[from] = to;
    }
    for &(start, _) in mapping.iter().filter(|(from, _)| !is_target[*from]) {
        let mut end = start;
        while let Some(next) = forward[end] {
            end = next;
        }
        destination[end] = start;
    }
    Ok(OperatorMatrix::from_destination(destination))
}

/// Mapping that routes `survivors[i]` to `targets[i]`; fixed points are dropped.
pub fn derive_permutation_for_branch(
    survivors: &[usize],
    targets: &[usize],
    num_qubits: usize,
) -> Result<Vec<(usize, usize)>> {
    if survivors.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            expected: survivors.len(),
            found: targets.len(),
        });
    }
    let dim = 1usize << num_qubits;
    for list in [survivors, targets] {
        for (i, &idx) in list.iter().enumerate() {
            if idx >= dim {
                return Err(Error::InvalidIndex { index: idx, bound: dim });
            }
            if list[..i].contains(&idx) {
                return Err(Error::DuplicateMapping { index: idx });
            }
        }
    }
    Ok(survivors
        .iter()
        .zip(targets)
        .filter(|(s, t)| s != t)
        .map(|(&s, &t)| (s, t))
        .collect())
}

/// Which basis states a filter rescales, by how much, and where the excess goes.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterPlan {
    retained: Vec<usize>,
    ratios: Vec<Complex64>,
    junk: Vec<usize>,
}

impl FilterPlan {
    pub fn new(retained: Vec<usize>, ratios: Vec<Complex64>, junk: Vec<usize>) -> Result<Self> {
        if retained.len() != ratios.len() {
            return Err(Error::DimensionMismatch {
                expected: retained.len(),
                found: ratios.len(),
            });
        }
        if retained.len() != junk.len() {
            return Err(Error::DimensionMismatch {
                expected: retained.len(),
                found: junk.len(),
            });
        }
        for (&s, r) in retained.iter().zip(&ratios) {
            let magnitude = r.norm();
            if !(magnitude <= 1.0 + UNITARITY_TOLERANCE) {
                return Err(Error::RatioOutOfRange { index: s, magnitude });
            }
        }
        let all: Vec<usize> = retained.iter().chain(&junk).copied().collect();
        for (i, &idx) in all.iter().enumerate() {
            if all[..i].contains(&idx) {
                return Err(Error::IndexCollision { index: idx });
            }
        }
        Ok(Self { retained, ratios, junk })
    }

    /// Pairs each retained index with the lowest free basis index, in increasing
    /// order. `occupied` lists every index that may carry amplitude.
    pub fn with_lowest_junk(
        retained: Vec<usize>,
        ratios: Vec<Complex64>,
        occupied: &[usize],
        dim: usize,
    ) -> Result<Self> {
        let junk: Vec<usize> = (0..dim)
            .filter(|i| !occupied.contains(i) && !retained.contains(i))
            .take(retained.len())
            .collect();
        if junk.len() < retained.len() {
            return Err(Error::DimensionMismatch {
                expected: retained.len(),
                found: junk.len(),
            });
        }
        Self::new(retained, ratios, junk)
    }

    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn ratios(&self) -> &[Complex64] {
        &self.ratios
    }

    pub fn junk(&self) -> &[usize] {
        &self.junk
    }
}

/// A ratio within the tie tolerance of unit magnitude is a pure phase; rounding in
/// the coefficient products would otherwise leak `sqrt(2 eps)` into the junk index.
fn snap_unit(r: Complex64) -> Complex64 {
    let mag = r.norm();
    if mag > 0.0 && (1.0 - mag).abs() <= crate::channels::TIE_TOLERANCE {
        r / mag
    } else {
        r
    }
}

/// Identity except for one `[[r, s], [-s, r*]]` block per (retained, junk) pair,
/// `s = sqrt(1 - |r|^2)`.
pub fn build_filter(plan: &FilterPlan, dim: usize) -> Result<OperatorMatrix> {
    if let Some(&max) = plan.retained.iter().chain(&plan.junk).max() {
        if max >= dim {
            return Err(Error::InvalidIndex { index: max, bound: dim });
        }
    }
    let mut op = OperatorMatrix::identity(dim);
    op.kind = OperatorKind::Filter;
    for ((&s, &t), &r) in plan.retained.iter().zip(&plan.junk).zip(&plan.ratios) {
        let r = snap_unit(r);
        let comp = Complex64::new((1.0 - r.norm_sqr()).max(0.0).sqrt(), 0.0);
        op.set(s, s, r);
        op.set(s, t, comp);
        op.set(t, s, -comp);
        op.set(t, t, r.conj());
    }
    Ok(op)
}

fn literal_filter(m: &CoefficientProducts, k: usize, elements: &[(usize, usize, FEntry)]) -> Result<OperatorMatrix> {
    if m.k() != k {
        return Err(Error::UnsupportedSize { k: m.k() });
    }
    if m.least_index != 0 {
        return Err(Error::AssumptionViolated {
            least_index: m.least_index,
        });
    }
    let ratio = |i: usize| snap_unit(Complex64::new(m.values[0] / m.values[i - 1], 0.0)).re;
    let comp = |i: usize| (1.0 - ratio(i) * ratio(i)).max(0.0).sqrt();
    let mut op = OperatorMatrix::identity(1 << (3 * k));
    op.kind = OperatorKind::Filter;
    op.provenance = Provenance::PaperLiteral;
    for &(row, col, entry) in elements {
        let value = match entry {
            FEntry::Ratio(i) | FEntry::ConjRatio(i) => ratio(i),
            FEntry::Compensator(i) => comp(i),
            FEntry::NegCompensator(i) => -comp(i),
            FEntry::One => 1.0,
            FEntry::Zero => 0.0,
        };
        op.set(row - 1, col - 1, Complex64::new(value, 0.0));
    }
    Ok(op)
}

/// The published 64x64 filter for two message qubits.
pub fn paper_filter_bipartite(m: &CoefficientProducts) -> Result<OperatorMatrix> {
    literal_filter(m, 2, published::BIPARTITE_F)
}

/// The published 512x512 filter for three message qubits, transcribed as printed.
/// Its index slip makes it non-unitary away from zero departure; see the ledger.
pub fn paper_filter_tripartite(m: &CoefficientProducts) -> Result<OperatorMatrix> {
    literal_filter(m, 3, published::TRIPARTITE_F)
}

/// The published routing permutation for `k` message qubits.
pub fn paper_permutation(k: usize) -> Result<OperatorMatrix> {
    let pairs: &[(usize, usize)] = match k {
        2 => &published::BIPARTITE_U,
        3 => &published::TRIPARTITE_U,
        _ => return Err(Error::UnsupportedSize { k }),
    };
    let mapping: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    Ok(build_permutation(&mapping, 1 << (3 * k))?.with_provenance(Provenance::PaperLiteral))
}
