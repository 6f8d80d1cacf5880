use std::path::{Path, PathBuf};

use serde::Serialize;

use super::output;
use crate::asymptotics::{crossover_ranges, factor_curve, Interval};
use crate::error::{domain, Error, Result};
use crate::exact::Scalar;
use crate::network::{CoexistenceLevel, Scenario};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub level: CoexistenceLevel,
    pub f: f64,
    pub f_exact: String,
    pub factor: f64,
    pub factor_exact: String,
    /// Time-division factor `1 − f`.
    pub td: f64,
    pub feasible: bool,
    pub beats_td: bool,
}

/// Crossover ranges of one level, or why they are unavailable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCrossover {
    pub level: CoexistenceLevel,
    pub ranges: Vec<String>,
    /// Interval endpoints in (0, 1), i.e. where the curves cross.
    pub points: Vec<String>,
    pub unavailable: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveTable {
    pub scenario: Scenario,
    pub alpha: String,
    pub gamma: String,
    pub rows: Vec<CurveRow>,
    pub crossovers: Vec<LevelCrossover>,
}

impl CurveTable {
    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        let sidecar = output::sidecar_path(path);
        output::write_csv(path, &self.rows)?;
        output::write_json(
            &sidecar,
            &serde_json::json!({
                "kind": "factor-curve",
                "scenario": self.scenario,
                "alpha": self.alpha,
                "gamma": self.gamma,
                "crossovers": self.crossovers,
            }),
        )?;
        Ok(vec![path.to_path_buf(), sidecar])
    }
}

fn interior_points<S: Scalar>(ranges: &[Interval<S>]) -> Vec<String> {
    let mut pts = Vec::new();
    for r in ranges {
        for end in [&r.lo, &r.hi] {
            if *end > S::zero() && *end < S::one() {
                pts.push(end.to_string());
            }
        }
    }
    pts
}

/// Throughput factor against `1 − f` on the grid `f = step, 2·step, …, 1`
/// for `level`, or for every level of the scenario when `None`.
pub fn run_factor_curve<S: Scalar>(
    scenario: Scenario,
    level: Option<CoexistenceLevel>,
    alpha: S,
    gamma: S,
    f_step: S,
) -> Result<CurveTable> {
    let half = S::one() / S::from_int(2);
    if !(f_step > S::zero() && f_step < half) {
        return Err(domain(format!("f step must lie in (0, 0.5), got {f_step}")));
    }
    let levels = match level {
        Some(l) => {
            l.check(scenario)?;
            vec![l]
        }
        None => scenario.levels(),
    };
    let mut grid = Vec::new();
    let mut i = 1;
    loop {
        let f = f_step.clone() * S::from_int(i);
        if f > S::one() {
            break;
        }
        grid.push(f);
        i += 1;
    }
    if grid.last().is_none_or(|last| *last < S::one()) {
        grid.push(S::one());
    }

    let mut rows = Vec::new();
    let mut crossovers = Vec::new();
    for l in levels {
        for p in factor_curve(scenario, l, alpha.clone(), gamma.clone(), &grid)? {
            rows.push(CurveRow {
                level: l,
                f: p.f.to_f64(),
                f_exact: p.f.to_string(),
                factor: p.factor.to_f64(),
                factor_exact: p.factor.to_string(),
                td: p.td.to_f64(),
                feasible: p.feasible,
                beats_td: p.factor > p.td,
            });
        }
        crossovers.push(
            match crossover_ranges(scenario, l, alpha.clone(), gamma.clone()) {
                Ok(ranges) => LevelCrossover {
                    level: l,
                    ranges: ranges.iter().map(|r| r.to_string()).collect(),
                    points: interior_points(&ranges),
                    unavailable: None,
                },
                Err(Error::Refused(why)) => LevelCrossover {
                    level: l,
                    ranges: Vec::new(),
                    points: Vec::new(),
                    unavailable: Some(why),
                },
                Err(e) => return Err(e),
            },
        );
    }
    Ok(CurveTable {
        scenario,
        alpha: alpha.to_string(),
        gamma: gamma.to_string(),
        rows,
        crossovers,
    })
}
