//! Grid evaluation of success probability (and, optionally, the simulated
//! probability and worst conditional fidelity) over channel departures.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{analytic_success_probability, ChannelSpec, Parity, Sign};
use crate::error::{Error, Result};
use crate::protocol::{normalize_input, run_full_protocol, InputState};

/// Distance kept from the degenerate endpoints by the default grid.
pub const DEFAULT_MARGIN: f64 = 0.01;
/// About one degree of resolution across the open interval.
pub const DEFAULT_STEPS: usize = 91;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    min: f64,
    max: f64,
    steps: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        let inside = |d: f64| d.is_finite() && d.abs() < FRAC_PI_4;
        if !(min < max) || steps < 2 || !inside(min) || !inside(max) {
            return Err(Error::InvalidGrid);
        }
        Ok(Self { min, max, steps })
    }

    pub fn default_axis() -> Self {
        Self::new(-FRAC_PI_4 + DEFAULT_MARGIN, FRAC_PI_4 - DEFAULT_MARGIN, DEFAULT_STEPS).expect("valid")
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `i`-th grid value. Interpolating on `i / (steps - 1)` keeps symmetric
    /// grids symmetric and puts an exact zero in the middle of odd ones.
    pub fn value(&self, i: usize) -> f64 {
        let t = i as f64 / (self.steps - 1) as f64;
        self.min + (self.max - self.min) * t
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InputMode {
    /// Same message at every grid point.
    Fixed(InputState),
    /// Fresh random message per grid point, reproducible from the seed.
    Random { seed: u64 },
    /// Closed-form probability only.
    AnalyticOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    pub input_mode: InputMode,
    /// Parity and sign of each channel; departures come from the grid.
    pub template: Vec<(Parity, Sign)>,
}

impl GridSpec {
    /// Grid over the standard channel template (`A` correlated, `B` anticorrelated,
    /// `C` correlated with a minus sign).
    pub fn new(axes: Vec<Axis>, input_mode: InputMode) -> Result<Self> {
        const TEMPLATE: [(Parity, Sign); 3] = [
            (Parity::Correlated, Sign::Plus),
            (Parity::Anticorrelated, Sign::Plus),
            (Parity::Correlated, Sign::Minus),
        ];
        if axes.is_empty() || axes.len() > TEMPLATE.len() {
            return Err(Error::UnsupportedSize { k: axes.len() });
        }
        if let InputMode::Fixed(input) = &input_mode {
            if input.k() != axes.len() {
                return Err(Error::DimensionMismatch {
                    expected: axes.len(),
                    found: input.k(),
                });
            }
        }
        let template = TEMPLATE[..axes.len()].to_vec();
        Ok(Self {
            axes,
            input_mode,
            template,
        })
    }

    pub fn k(&self) -> usize {
        self.axes.len()
    }

    /// Number of grid points: the product of per-axis steps.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.steps).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Departures at row-major position `index` (first axis varies slowest).
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut out = alloc::vec![0.0; self.axes.len()];
        for (slot, axis) in out.iter_mut().zip(&self.axes).rev() {
            *slot = axis.value(rest % axis.steps);
            rest /= axis.steps;
        }
        out
    }

    pub fn channels(&self, departures: &[f64]) -> Result<Vec<ChannelSpec>> {
        self.template
            .iter()
            .zip(departures)
            .map(|(&(parity, sign), &d)| ChannelSpec::new(parity, sign, d))
            .collect()
    }

    pub fn simulates(&self) -> bool {
        !matches!(self.input_mode, InputMode::AnalyticOnly)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub deltas: Vec<f64>,
    pub p_analytic: f64,
    pub p_simulated: Option<f64>,
    pub fidelity_min: Option<f64>,
}

/// Uniform message amplitudes from a seeded ChaCha8 stream, one stream per grid point.
pub fn random_input(k: usize, seed: u64, stream: u64) -> InputState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut unit = move || ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64) * 2.0 - 1.0;
    loop {
        let raw: Vec<Complex64> = (0..1usize << k).map(|_| Complex64::new(unit(), unit())).collect();
        if let Ok(input) = normalize_input(raw) {
            return input;
        }
    }
}

/// Evaluates one grid point. All arithmetic is sequential, so the result does
/// not depend on which thread runs it.
pub fn evaluate_point(grid: &GridSpec, index: usize) -> Result<SweepRow> {
    let deltas = grid.point(index);
    let channels = grid.channels(&deltas)?;
    let p_analytic = analytic_success_probability(&channels)?;
    let input = match &grid.input_mode {
        InputMode::AnalyticOnly => None,
        InputMode::Fixed(input) => Some(input.clone()),
        InputMode::Random { seed } => Some(random_input(grid.k(), *seed, index as u64)),
    };
    let (p_simulated, fidelity_min) = match input {
        None => (None, None),
        Some(input) => {
            let report = run_full_protocol(&input, &channels)?;
            (Some(report.p_simulated), report.min_fidelity)
        }
    };
    Ok(SweepRow {
        deltas,
        p_analytic,
        p_simulated,
        fidelity_min,
    })
}

/// Every grid point in row-major order.
pub fn run_sweep(grid: &GridSpec) -> Result<Vec<SweepRow>> {
    (0..grid.len()).map(|i| evaluate_point(grid, i)).collect()
}
