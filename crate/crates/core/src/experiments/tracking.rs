use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_budget, check_grid, output, Aggregate, DEFAULT_BUDGET};
use crate::asymptotics::secondary_rate_law;
use crate::error::{domain, refused, Result};
use crate::gain::FadingModel;
use crate::network::{
    purpose, CoexistenceLevel, LinkMode, NetworkInstance, Scenario, Strategy, SystemParams,
};
use crate::rates::{intermediate_rate, link_rate, sim_rates, RatePair};
use crate::rng::StreamKey;
use crate::sampling::{sample_lowest_sum, MATERIALIZE_LIMIT};
use crate::scheduler::{activation_count, schedule, ActivationExponents};

/// How a trial's rates are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Draw every gain of the realization, schedule it and evaluate the
    /// rates. Limited by the gain budget.
    Full,
    /// Draw only the sums, maxima and lowest-order sums the rates depend
    /// on, each from its exact law. Handles `k` far beyond memory.
    Aggregate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub level: CoexistenceLevel,
    pub strategy: Strategy,
    pub model: FadingModel,
    pub alpha: f64,
    pub exponents: ActivationExponents,
    pub n_grid: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    /// Linear transmit power.
    pub power: f64,
    /// Linear noise power.
    pub noise: f64,
    pub engine: Engine,
    /// Most gains the run may draw.
    pub budget: u64,
}

/// Level and exponents of the reference tracking runs for a scenario:
/// `ᾱ = α/2` for a scheduling secondary uplink, `β = 1/2` for a scheduling
/// primary uplink.
pub fn tracking_defaults(
    scenario: Scenario,
    alpha: f64,
) -> (CoexistenceLevel, ActivationExponents) {
    let level = scenario.natural_level();
    let alpha_bar = if scenario.secondary == LinkMode::Uplink {
        alpha / 2.0
    } else {
        alpha
    };
    let beta = if level == CoexistenceLevel::Symmetric {
        0.5
    } else {
        1.0
    };
    (level, ActivationExponents { alpha_bar, beta })
}

impl SweepSpec {
    /// Sweep with the reference level and exponents for `scenario`, Rayleigh
    /// gains, `P = 10 dB`, `N₀ = 0 dB`, aggregate engine.
    pub fn new(scenario: Scenario, alpha: f64, n_grid: Vec<u64>, trials: u64, seed: u64) -> Self {
        let (level, exponents) = tracking_defaults(scenario, alpha);
        SweepSpec {
            scenario,
            level,
            strategy: Strategy::LeastInterference,
            model: FadingModel::Rayleigh,
            alpha,
            exponents,
            n_grid,
            trials,
            seed,
            power: 10.0,
            noise: 1.0,
            engine: Engine::Aggregate,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_grid(&self.n_grid, self.trials)?;
        self.level.check(self.scenario)?;
        self.model.validate()?;
        self.exponents.check_alpha(self.alpha)?;
        if !(self.power > 0.0 && self.noise > 0.0) {
            return Err(domain("power and noise must be positive"));
        }
        if self.n_grid[0] < 2 {
            return Err(domain("tracking needs n >= 2"));
        }
        if self.engine == Engine::Aggregate && self.strategy != Strategy::LeastInterference {
            return Err(refused(
                "the aggregate engine only supports least-interference scheduling",
            ));
        }
        // surfaces model/exponent restrictions of the closed form up front
        intermediate_rate(
            self.scenario,
            &self.model,
            self.exponents,
            self.alpha,
            self.n_grid[0],
            self.power,
            self.noise,
        )?;
        Ok(())
    }

    fn gains_needed(&self) -> Result<u128> {
        let mut total: u128 = 0;
        for &n in &self.n_grid {
            let k =
                SystemParams::new(n, self.alpha, self.power, self.noise, self.model)?.k() as u128;
            let per_trial = match self.engine {
                Engine::Full => 2 * n as u128 + 2 * k + 2,
                Engine::Aggregate => {
                    let small = |len: u128| {
                        if len <= MATERIALIZE_LIMIT as u128 {
                            len
                        } else {
                            0
                        }
                    };
                    small(n as u128) + small(k) + 8
                }
            };
            total += per_trial * self.trials as u128;
        }
        Ok(total)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u64,
    pub k: u64,
    pub trial: u64,
    pub primary_rate: f64,
    /// Simulated secondary sum-rate.
    pub actual_rate: f64,
    pub intermediate_rate: f64,
    /// Growth law of the secondary sum-rate, e.g. `1.5 log n`.
    pub asymptotic: String,
    /// `actual_rate / intermediate_rate`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    /// Per-`n` statistics of the ratio column.
    pub aggregates: Vec<Aggregate>,
}

impl SweepResult {
    pub fn aggregate_at(&self, n: u64) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.n == n)
    }

    /// Writes rows to `path`, aggregates next to it, and a JSON sidecar with
    /// the full spec. Returns the written paths.
    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        let summary = output::summary_path(path);
        let sidecar = output::sidecar_path(path);
        output::write_csv(path, &self.rows)?;
        output::write_csv(&summary, &self.aggregates)?;
        output::write_json(
            &sidecar,
            &serde_json::json!({
                "kind": "tracking-sweep",
                "seed": self.spec.seed,
                "spec": self.spec,
                "rows": self.rows.len(),
                "aggregates": self.aggregates,
            }),
        )?;
        Ok(vec![path.to_path_buf(), summary, sidecar])
    }
}

/// Simulated secondary sum-rate against its closed-form intermediate value
/// for every `n` of the grid and every trial.
pub fn run_tracking_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    check_budget(spec.gains_needed()?, spec.budget)?;
    let gamma = spec.model.low_gain_params().gamma;
    let (coef, scale) =
        secondary_rate_law(spec.scenario, spec.level, spec.exponents, spec.alpha, gamma)?;
    let asymptotic = format!("{coef} {scale}");
    let root = StreamKey::new(spec.seed);
    let tasks: Vec<(u64, u64)> = spec
        .n_grid
        .iter()
        .flat_map(|&n| (0..spec.trials).map(move |t| (n, t)))
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(n, trial)| {
            let params = SystemParams::new(n, spec.alpha, spec.power, spec.noise, spec.model)?;
            let key = root.child(n).child(trial);
            let rates = match spec.engine {
                Engine::Full => full_trial(spec, &params, key)?,
                Engine::Aggregate => aggregate_trial(spec, &params, key)?,
            };
            let intermediate = intermediate_rate(
                spec.scenario,
                &spec.model,
                spec.exponents,
                spec.alpha,
                n,
                spec.power,
                spec.noise,
            )?;
            Ok(SweepRow {
                n,
                k: params.k(),
                trial,
                primary_rate: rates.primary,
                actual_rate: rates.secondary,
                intermediate_rate: intermediate,
                asymptotic: asymptotic.clone(),
                ratio: rates.secondary / intermediate,
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
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
        aggregates,
    })
}

fn full_trial(spec: &SweepSpec, params: &SystemParams, key: StreamKey) -> Result<RatePair> {
    let instance = NetworkInstance::generate(params, key)?;
    let decision = schedule(
        &instance,
        spec.scenario,
        spec.level,
        spec.strategy,
        spec.exponents,
    )?;
    sim_rates(&instance, &decision, spec.scenario)
}

/// Same law as [`full_trial`] under least interference: selected users' own
/// gains are independent of the interference gains they were selected by,
/// so each network contributes a sum (or max) of own gains and a
/// lowest-order sum (or one base-station gain) of interference gains.
fn aggregate_trial(spec: &SweepSpec, params: &SystemParams, key: StreamKey) -> Result<RatePair> {
    let model = &spec.model;
    let n = params.n;
    let k = params.k();
    let schedules_p =
        spec.scenario.primary == LinkMode::Uplink && spec.level == CoexistenceLevel::Symmetric;
    let schedules_s = spec.scenario.secondary == LinkMode::Uplink
        && spec.level != CoexistenceLevel::PureInterference;
    let cp = if schedules_p {
        activation_count(n, spec.exponents.beta, n as usize) as u64
    } else {
        n
    };
    let cs = if schedules_s {
        activation_count(n, spec.exponents.alpha_bar, k as usize) as u64
    } else {
        k
    };

    let (p_signal, p_imposed) = match spec.scenario.primary {
        LinkMode::Uplink => (
            model.sample_sum(&mut key.rng(purpose::G_P), cp),
            sample_lowest_sum(model, &mut key.rng(purpose::G_PS), cp, n)?,
        ),
        LinkMode::Downlink => (
            model.sample_max(&mut key.rng(purpose::G_P), n)?,
            model.sample_one(&mut key.rng(purpose::G0_PS)),
        ),
    };
    let (s_signal, s_imposed) = match spec.scenario.secondary {
        LinkMode::Uplink => (
            model.sample_sum(&mut key.rng(purpose::G_S), cs),
            sample_lowest_sum(model, &mut key.rng(purpose::G_SP), cs, k)?,
        ),
        LinkMode::Downlink => (
            model.sample_max(&mut key.rng(purpose::G_S), k)?,
            model.sample_one(&mut key.rng(purpose::G0_SP)),
        ),
    };
    Ok(RatePair {
        primary: link_rate(spec.power, spec.noise, p_signal, s_imposed),
        secondary: link_rate(spec.power, spec.noise, s_signal, p_imposed),
    })
}
