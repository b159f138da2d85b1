//! Operator element lists, kets and coefficient patterns exactly as printed in
//! the source article, typos included. Indices are 1-based; kets use the
//! register ordering of [`crate::statevec`].
//!
//! Nothing here is used to drive the simulation directly. The protocol derives
//! its own operators, and [`crate::ledger`] compares the two.

/// Value of one published filter element, in terms of `m_1 / m_i` (`i` 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FEntry {
    Ratio(usize),
    Compensator(usize),
    NegCompensator(usize),
    ConjRatio(usize),
    One,
    Zero,
}

use FEntry::{Compensator as S, ConjRatio as J, NegCompensator as N, One, Ratio as R, Zero};

/// Swap pairs of the two-qubit routing permutation.
pub const BIPARTITE_U: [(usize, usize); 4] = [(1, 2), (3, 19), (5, 14), (7, 31)];

/// Swap pairs of the three-qubit routing permutation.
pub const TRIPARTITE_U: [(usize, usize); 7] = [
    (7, 72),
    (13, 137),
    (15, 204),
    (37, 307),
    (39, 366),
    (45, 441),
    (47, 508),
];

/// Non-default elements of the two-qubit filter; every other entry is the identity's.
pub const BIPARTITE_F: &[(usize, usize, FEntry)] = &[
    (3, 3, R(2)),
    (5, 5, R(3)),
    (7, 7, R(4)),
    (8, 8, Zero),
    (9, 9, Zero),
    (10, 10, Zero),
    (11, 11, Zero),
    (3, 9, S(2)),
    (8, 3, N(2)),
    (8, 9, J(2)),
    (5, 10, S(3)),
    (9, 5, N(3)),
    (9, 10, J(3)),
    (7, 11, S(4)),
    (10, 7, N(4)),
    (10, 11, J(4)),
    (11, 8, One),
];

/// Non-default elements of the three-qubit filter.
pub const TRIPARTITE_F: &[(usize, usize, FEntry)] = &[
    (7, 7, R(2)),
    (13, 13, R(3)),
    (17, 17, R(4)),
    (37, 37, R(5)),
    (39, 39, R(6)),
    (45, 45, R(7)),
    (47, 47, R(8)),
    (7, 65, S(2)),
    (64, 7, N(2)),
    (64, 65, J(2)),
    (13, 66, S(3)),
    (65, 13, N(3)),
    (65, 66, J(3)),
    (15, 67, S(4)),
    (66, 15, N(4)),
    (66, 67, J(4)),
    (37, 68, S(5)),
    (67, 37, N(5)),
    (67, 68, J(5)),
    (39, 69, S(6)),
    (68, 39, N(6)),
    (68, 69, J(6)),
    (45, 70, S(7)),
    (69, 45, N(7)),
    (69, 70, J(7)),
    (47, 71, S(8)),
    (70, 47, N(8)),
    (70, 71, J(8)),
    (64, 64, Zero),
    (65, 65, Zero),
    (66, 66, Zero),
    (67, 67, Zero),
    (68, 68, Zero),
    (69, 69, Zero),
    (70, 70, Zero),
    (71, 71, Zero),
    (71, 64, One),
];

/// One printed term: which `c_i` (1-based) and the full register ket.
pub type Term = (usize, &'static str);

/// Two-qubit composite state before the Bell operation.
pub const BIPARTITE_COMPOSED: [Term; 4] = [(1, "000001"), (2, "010010"), (3, "101101"), (4, "111110")];

/// Two-qubit state after the measurement `M`. Term 3 prints the B pair as `|00>`.
pub const BIPARTITE_MEASURED: [Term; 4] = [(1, "000001"), (2, "010010"), (3, "001100"), (4, "011110")];

/// Two-qubit state after `U`; the state after `F` has the same kets.
pub const BIPARTITE_ROUTED: [Term; 4] = [(1, "000000"), (2, "000010"), (3, "000100"), (4, "000110")];

/// Three-qubit composite state.
pub const TRIPARTITE_COMPOSED: [Term; 8] = [
    (1, "000000100"),
    (2, "001000111"),
    (3, "010001000"),
    (4, "011001011"),
    (5, "100110100"),
    (6, "101110111"),
    (7, "110111000"),
    (8, "111111011"),
];

/// Three-qubit state introduced with "after measurement".
pub const TRIPARTITE_AFTER_MEASUREMENT: [Term; 8] = [
    (1, "000000100"),
    (2, "000000110"),
    (3, "000001100"),
    (4, "000001110"),
    (5, "000100100"),
    (6, "000100110"),
    (7, "000101100"),
    (8, "000101110"),
];

/// Coefficient-product patterns (`a`/`b` per channel, A first).
pub const BIPARTITE_M: [&str; 4] = ["aa", "ab", "ba", "bb"];

/// The three-qubit list prints `m_3` and `m_4` identically.
pub const TRIPARTITE_M: [&str; 8] = ["aaa", "aab", "abb", "abb", "baa", "bab", "bba", "bbb"];

/// Coefficient patterns on the printed three-qubit composite terms.
pub const TRIPARTITE_COMPOSED_COEFFICIENTS: [&str; 8] = ["aaa", "aab", "abb", "abb", "baa", "bab", "bba", "bbb"];

/// The measurement `M`: first message qubit equal to 0.
pub const MEASUREMENT: [(usize, u8); 1] = [(0, 0)];

/// Success projector for two message qubits: qubits 1, 2, A1 and B2 all zero.
pub const BIPARTITE_SUCCESS: [(usize, u8); 4] = [(0, 0), (1, 0), (2, 0), (5, 0)];

/// Success projector for three message qubits: 1, 2, 3 and A2 zero, B2 one, C2 zero.
pub const TRIPARTITE_SUCCESS: [(usize, u8); 6] = [(0, 0), (1, 0), (2, 0), (4, 0), (6, 1), (8, 0)];
