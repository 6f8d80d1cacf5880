//! Monte Carlo sweeps and closed-form tables, with CSV/JSON output.
//!
//! Every random draw in a run comes from a stream keyed by
//! `(seed, n, trial, purpose)`, so results do not depend on how trials are
//! spread over threads.

mod concentration;
mod curve;
mod equivalence;
mod output;
mod tracking;

pub use concentration::{
    run_concentration_sweep, ConcentrationResult, ConcentrationRow, ConcentrationSpec, Statistic,
};
pub use curve::{run_factor_curve, CurveRow, CurveTable, LevelCrossover};
pub use equivalence::{
    run_strategy_equivalence, EquivalenceResult, EquivalenceRow, EquivalenceSpec,
};
pub use output::{sidecar_path, summary_path, write_csv, write_json};
pub use tracking::{
    run_tracking_sweep, tracking_defaults, Engine, SweepResult, SweepRow, SweepSpec,
};

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Default cap on the number of gains a single run may draw.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// `10^{x/10}`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Summary of one column of per-trial values at one `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub n: u64,
    pub trials: u64,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (`trials − 1` denominator; 0 for one trial).
    pub stddev: f64,
}

impl Aggregate {
    pub fn of(n: u64, values: &[f64]) -> Self {
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let stddev = if count > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if count % 2 == 1 {
            sorted[count / 2]
        } else {
            0.5 * (sorted[count / 2 - 1] + sorted[count / 2])
        };
        Aggregate {
            n,
            trials: count as u64,
            mean,
            median,
            stddev,
        }
    }

    /// Absolute distance of the median from 1, for ratio columns.
    pub fn median_gap(&self) -> f64 {
        (self.median - 1.0).abs()
    }
}

pub(crate) fn check_grid(n_grid: &[u64], trials: u64) -> Result<()> {
    if n_grid.is_empty() {
        return Err(domain("n grid is empty"));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain(format!(
            "n grid must be strictly increasing, got {n_grid:?}"
        )));
    }
    if trials < 1 {
        return Err(domain("need at least one trial"));
    }
    Ok(())
}

pub(crate) fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        return Err(Error::Budget {
            needed: needed.min(u64::MAX as u128) as u64,
            budget,
        });
    }
    Ok(())
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool if `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(domain("jobs must be at least 1")),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::Numerical(format!("could not start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
