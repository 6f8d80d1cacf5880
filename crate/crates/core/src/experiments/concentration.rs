use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_budget, check_grid, output, Aggregate, DEFAULT_BUDGET};
use crate::error::{domain, Error, Result};
use crate::gain::FadingModel;
use crate::order_stats::{ceil_power, lower_sum_concentration, max_concentration, sum_lowest};
use crate::rng::StreamKey;

/// Which order statistic a concentration sweep measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// Largest of `n` gains, normalized by `(ln n)/c`.
    Max,
    /// Sum of the `⌈n^e⌉` smallest of `n` gains.
    LowerSum,
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Max => "max",
            Statistic::LowerSum => "lower-sum",
        })
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "max" => Ok(Statistic::Max),
            "lower-sum" | "lower_sum" | "lowersum" => Ok(Statistic::LowerSum),
            other => Err(Error::Parse(format!(
                "unknown statistic `{other}` (expected max or lower-sum)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationSpec {
    pub model: FadingModel,
    pub statistic: Statistic,
    /// `f(n) = ⌈n^e⌉` for the lower sum; ignored for the maximum.
    pub f_exponent: f64,
    pub n_grid: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    pub budget: u64,
}

impl ConcentrationSpec {
    pub fn new(
        model: FadingModel,
        statistic: Statistic,
        n_grid: Vec<u64>,
        trials: u64,
        seed: u64,
    ) -> Self {
        ConcentrationSpec {
            model,
            statistic,
            f_exponent: 0.5,
            n_grid,
            trials,
            seed,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub n: u64,
    pub trial: u64,
    /// Number of order statistics summed (1 for the maximum).
    pub count: u64,
    pub value: f64,
    pub normalizer: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationResult {
    pub spec: ConcentrationSpec,
    pub rows: Vec<ConcentrationRow>,
    /// Per-`n` statistics of the ratio column.
    pub aggregates: Vec<Aggregate>,
}

impl ConcentrationResult {
    pub fn aggregate_at(&self, n: u64) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.n == n)
    }

    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        let summary = output::summary_path(path);
        let sidecar = output::sidecar_path(path);
        output::write_csv(path, &self.rows)?;
        output::write_csv(&summary, &self.aggregates)?;
        output::write_json(
            &sidecar,
            &serde_json::json!({
                "kind": "concentration-sweep",
                "seed": self.spec.seed,
                "spec": self.spec,
                "rows": self.rows.len(),
                "aggregates": self.aggregates,
            }),
        )?;
        Ok(vec![path.to_path_buf(), summary, sidecar])
    }
}

/// Draws `n` gains per trial and compares the statistic with its
/// concentration value.
pub fn run_concentration_sweep(spec: &ConcentrationSpec) -> Result<ConcentrationResult> {
    check_grid(&spec.n_grid, spec.trials)?;
    spec.model.validate()?;
    if spec.n_grid[0] < 2 {
        return Err(domain("concentration sweeps need n >= 2"));
    }
    if spec.statistic == Statistic::LowerSum && !(spec.f_exponent > 0.0 && spec.f_exponent <= 1.0) {
        return Err(domain(format!(
            "lower-sum exponent must lie in (0, 1], got {}",
            spec.f_exponent
        )));
    }
    let needed: u128 = spec
        .n_grid
        .iter()
        .map(|&n| n as u128 * spec.trials as u128)
        .sum();
    check_budget(needed, spec.budget)?;

    let tail = spec.model.tail_parameter();
    let low = spec.model.low_gain_params();
    let root = StreamKey::new(spec.seed);
    let tasks: Vec<(u64, u64)> = spec
        .n_grid
        .iter()
        .flat_map(|&n| (0..spec.trials).map(move |t| (n, t)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(n, trial)| {
            let mut rng = root.child(n).child(trial).rng(0);
            let mut draws = spec.model.sample(&mut rng, n as usize);
            let (count, value, normalizer) = match spec.statistic {
                Statistic::Max => (
                    1,
                    draws.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    max_concentration(tail, n)?,
                ),
                Statistic::LowerSum => {
                    let k = ceil_power(n, spec.f_exponent).clamp(1, n);
                    (
                        k,
                        sum_lowest(&mut draws, k as usize),
                        lower_sum_concentration(low, n, k)?,
                    )
                }
            };
            Ok(ConcentrationRow {
                n,
                trial,
                count,
                value,
                normalizer,
                ratio: value / normalizer,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let aggregates = spec
        .n_grid
        .iter()
        .map(|&n| {
            let ratios: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.ratio).collect();
            Aggregate::of(n, &ratios)
        })
        .collect();
    Ok(ConcentrationResult {
        spec: spec.clone(),
        rows,
        aggregates,
    })
}
