//! Thread-pool evaluation of sweep grids.

use belltransfer_core::sweep::{evaluate_point, GridSpec, SweepRow};
use rayon::prelude::*;

use crate::CliError;

pub const THREADS_VAR: &str = "BELLTRANSFER_THREADS";

/// Thread cap from the environment; unset or `0` lets the pool decide.
pub fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{THREADS_VAR}: `{v}` is not a thread count"))),
    }
}

/// Rows in row-major order, identical to a sequential run for any thread count.
pub fn run_sweep_parallel(grid: &GridSpec, threads: usize) -> Result<Vec<SweepRow>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    let rows: belltransfer_core::Result<Vec<SweepRow>> = pool.install(|| {
        (0..grid.len())
            .into_par_iter()
            .map(|i| evaluate_point(grid, i))
            .collect()
    });
    Ok(rows?)
}
