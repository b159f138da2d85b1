use core::fmt;

/// Everything that can go wrong inside the simulator core.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operand sizes disagree (gate vs. target count, operator vs. state, ...).
    DimensionMismatch { expected: usize, found: usize },
    /// A state that must be normalized deviates by more than the input tolerance.
    NotNormalized { norm: f64 },
    /// A qubit or basis index lies outside the register.
    InvalidIndex { index: usize, bound: usize },
    /// A basis label contains something other than `0`/`1`.
    InvalidLabel,
    /// An index occurs more than once where uniqueness is required.
    DuplicateMapping { index: usize },
    /// A channel is at (or past) the product-state point, so filter ratios are undefined.
    DegenerateChannel { departure: f64 },
    /// A filter ratio exceeds one in magnitude.
    RatioOutOfRange { index: usize, magnitude: f64 },
    /// Two filter blocks claim the same basis index.
    IndexCollision { index: usize },
    /// The published operator lists assume the all-`a` coefficient product is the smallest.
    AssumptionViolated { least_index: usize },
    /// The published layouts exist only for two and three message qubits.
    UnsupportedSize { k: usize },
    /// A branch map was expected to be monomial (one entry per column) but is not.
    NotMonomial { column: usize },
    /// Grid bounds are empty or reach the degenerate boundary.
    InvalidGrid,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "DimensionMismatch: expected {expected}, found {found}")
            }
            Error::NotNormalized { norm } => write!(f, "NotNormalized: norm {norm}"),
            Error::InvalidIndex { index, bound } => {
                write!(f, "InvalidIndex: {index} is not below {bound}")
            }
            Error::InvalidLabel => write!(f, "InvalidLabel: basis labels use only 0 and 1"),
            Error::DuplicateMapping { index } => {
                write!(f, "DuplicateMapping: index {index} used more than once")
            }
            Error::DegenerateChannel { departure } => write!(
                f,
                "DegenerateChannel: departure {departure} reaches the product-state boundary"
            ),
            Error::RatioOutOfRange { index, magnitude } => {
                write!(f, "RatioOutOfRange: |r| = {magnitude} at basis index {index}")
            }
            Error::IndexCollision { index } => {
                write!(f, "IndexCollision: basis index {index} claimed twice")
            }
            Error::AssumptionViolated { least_index } => write!(
                f,
                "AssumptionViolated: least coefficient product is m{} rather than m1",
                least_index + 1
            ),
            Error::UnsupportedSize { k } => {
                write!(f, "UnsupportedSize: no published layout for k = {k}")
            }
            Error::NotMonomial { column } => {
                write!(f, "NotMonomial: branch map column {column} is not a single entry")
            }
            Error::InvalidGrid => write!(f, "InvalidGrid: need min < max inside (-pi/4, pi/4) and steps >= 2"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
