//! Analogous Bell channels `a|x> + s*b|y>` with `a = sin(pi/4 + d)`, `b = cos(pi/4 + d)`,
//! and the coefficient products `m_i` they attach to each message component.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
// Float math for no_std targets; unused when another dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::statevec::{basis_index, StateVector};

/// Below this magnitude a channel coefficient is treated as zero.
pub const DEGENERACY_CUTOFF: f64 = 1e-15;

/// Relative slack used when several `|m_i|` tie for the minimum.
pub(crate) const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// Spans `|00>` and `|11>`.
    Correlated,
    /// Spans `|01>` and `|10>`.
    Anticorrelated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    parity: Parity,
    sign: Sign,
    departure: f64,
}

impl ChannelSpec {
    /// Accepts departures in the closed interval `[-pi/4, pi/4]`; the endpoints are
    /// product states and report [`ChannelSpec::is_degenerate`]. Anything outside is
    /// past the product point and rejected as degenerate outright.
    pub fn new(parity: Parity, sign: Sign, departure: f64) -> Result<Self> {
        if !departure.is_finite() || departure.abs() > FRAC_PI_4 {
            return Err(Error::DegenerateChannel { departure });
        }
        Ok(Self {
            parity,
            sign,
            departure,
        })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn departure(&self) -> f64 {
        self.departure
    }

    pub fn a(&self) -> f64 {
        (FRAC_PI_4 + self.departure).sin()
    }

    /// Unsigned second coefficient `cos(pi/4 + d)`.
    pub fn b(&self) -> f64 {
        (FRAC_PI_4 + self.departure).cos()
    }

    /// Second coefficient including the channel's sign.
    pub fn signed_b(&self) -> f64 {
        self.sign.factor() * self.b()
    }

    /// `a` for bit 0, signed `b` for bit 1.
    pub fn coefficient(&self, bit: u8) -> f64 {
        if bit == 0 {
            self.a()
        } else {
            self.signed_b()
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.a().abs() <= DEGENERACY_CUTOFF || self.b().abs() <= DEGENERACY_CUTOFF
    }

    pub fn ensure_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegenerateChannel {
                departure: self.departure,
            })
        } else {
            Ok(())
        }
    }

    /// Two-qubit ket carrying coefficient `a` (bit 0) or `b` (bit 1).
    pub fn term_label(&self, bit: u8) -> &'static str {
        match (self.parity, bit) {
            (Parity::Correlated, 0) => "00",
            (Parity::Correlated, _) => "11",
            (Parity::Anticorrelated, 0) => "01",
            (Parity::Anticorrelated, _) => "10",
        }
    }
}

/// The three channels used for two and three message qubits: `A` correlated,
/// `B` anticorrelated, `C` correlated with a minus sign.
pub fn paper_channels(departures: &[f64]) -> Result<Vec<ChannelSpec>> {
    const TEMPLATE: [(Parity, Sign); 3] = [
        (Parity::Correlated, Sign::Plus),
        (Parity::Anticorrelated, Sign::Plus),
        (Parity::Correlated, Sign::Minus),
    ];
    if departures.is_empty() || departures.len() > TEMPLATE.len() {
        return Err(Error::UnsupportedSize { k: departures.len() });
    }
    departures
        .iter()
        .zip(TEMPLATE)
        .map(|(&d, (parity, sign))| ChannelSpec::new(parity, sign, d))
        .collect()
}

/// `a|x> + s*b|y>`.
pub fn make_channel(spec: &ChannelSpec) -> StateVector {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 4];
    for bit in 0..2u8 {
        let idx = basis_index(spec.term_label(bit)).expect("static label");
        amplitudes[idx] = Complex64::new(spec.coefficient(bit), 0.0);
    }
    StateVector::from_amplitudes(amplitudes).expect("four amplitudes")
}

/// Signed products `m_1 ... m_(2^k)`; bit `j` of the zero-based index picks `a` (0)
/// or signed `b` (1) from channel `j`, channel 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientProducts {
    pub values: Vec<f64>,
    /// Zero-based index of the smallest `|m_i|`; the lowest index wins near-ties.
    pub least_index: usize,
    pub least_value: f64,
}

impl CoefficientProducts {
    pub fn k(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    /// `m_least / m_i`.
    pub fn ratio(&self, index: usize) -> f64 {
        self.least_value / self.values[index]
    }
}

pub fn coefficient_products(channels: &[ChannelSpec]) -> Result<CoefficientProducts> {
    let k = channels.len();
    if k == 0 || k >= usize::BITS as usize {
        return Err(Error::UnsupportedSize { k });
    }
    for ch in channels {
        ch.ensure_nondegenerate()?;
    }
    let values: Vec<f64> = (0..1usize << k)
        .map(|i| {
            channels
                .iter()
                .enumerate()
                .map(|(j, ch)| ch.coefficient(((i >> (k - 1 - j)) & 1) as u8))
                .product()
        })
        .collect();
    let min = values.iter().fold(f64::INFINITY, |acc, m| acc.min(m.abs()));
    let least_index = values
        .iter()
        .position(|m| m.abs() <= min * (1.0 + TIE_TOLERANCE))
        .expect("non-empty");
    Ok(CoefficientProducts {
        least_value: values[least_index],
        values,
        least_index,
    })
}

/// `2^k * min_i |m_i|^2`.
pub fn analytic_success_probability(channels: &[ChannelSpec]) -> Result<f64> {
    let m = coefficient_products(channels)?;
    Ok(m.values.len() as f64 * m.least_value * m.least_value)
}
