use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output;
use crate::error::{domain, refused, Result};
use crate::gain::FadingModel;
use crate::network::{CoexistenceLevel, NetworkInstance, Scenario, Strategy, SystemParams};
use crate::rates::{primary_alone, sim_rates, ub_rates};
use crate::rng::StreamKey;
use crate::scheduler::{
    activation_count, optimal_exponents, primary_schedules, schedule_with_counts,
    secondary_schedules, Verdict, BRUTE_FORCE_MAX_USERS,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceSpec {
    pub n: usize,
    pub k: usize,
    pub model: FadingModel,
    pub scenario: Scenario,
    pub level: CoexistenceLevel,
    /// Protection factor of the joint-optimization constraint, in `[0, 1]`.
    pub f: f64,
    pub trials: u64,
    pub seed: u64,
    /// Active-set sizes; `None` derives them from the optimal exponents.
    pub counts: Option<(usize, usize)>,
    pub power: f64,
    pub noise: f64,
}

impl EquivalenceSpec {
    pub fn new(
        n: usize,
        k: usize,
        scenario: Scenario,
        level: CoexistenceLevel,
        f: f64,
        trials: u64,
        seed: u64,
    ) -> Self {
        EquivalenceSpec {
            n,
            k,
            model: FadingModel::Rayleigh,
            scenario,
            level,
            f,
            trials,
            seed,
            counts: None,
            power: 10.0,
            noise: 1.0,
        }
    }

    /// Explicit counts, or `round(n^β)` and `round(n^ᾱ)` for the exponents
    /// that are optimal at this `f` (with `α = ln k / ln n`).
    pub fn resolved_counts(&self) -> Result<(usize, usize)> {
        if let Some(c) = self.counts {
            return Ok(c);
        }
        let alpha = if self.n > 1 {
            (self.k as f64).ln() / (self.n as f64).ln()
        } else {
            1.0
        };
        let alpha = alpha.max(f64::MIN_POSITIVE);
        let gamma = self.model.low_gain_params().gamma;
        let e = optimal_exponents(
            self.scenario,
            self.level,
            self.f.max(f64::MIN_POSITIVE),
            alpha,
            gamma,
        )?;
        let cp = if primary_schedules(self.scenario, self.level) {
            activation_count(self.n as u64, e.beta, self.n)
        } else {
            self.n
        };
        let cs = if secondary_schedules(self.scenario, self.level) {
            activation_count(self.n as u64, e.alpha_bar, self.k)
        } else {
            self.k
        };
        Ok((cp, cs))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceRow {
    pub trial: u64,
    pub li_secondary: f64,
    pub jo_secondary: f64,
    pub ub_secondary: f64,
    pub li_primary: f64,
    pub jo_primary: f64,
    /// `f ×` stand-alone primary rate.
    pub required_primary: f64,
    pub li_feasible: bool,
    pub jo_feasible: bool,
    /// `LI ≤ JO`, checked only when the least-interference pair meets the
    /// constraint (otherwise the two answer different questions).
    pub li_le_jo: Option<bool>,
    pub jo_le_ub: bool,
}

impl EquivalenceRow {
    pub fn holds(&self) -> bool {
        self.li_le_jo.unwrap_or(true) && self.jo_le_ub
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceResult {
    pub spec: EquivalenceSpec,
    pub counts: (usize, usize),
    pub rows: Vec<EquivalenceRow>,
}

impl EquivalenceResult {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.holds()).count()
    }

    pub fn write(&self, path: &Path) -> Result<Vec<PathBuf>> {
        let sidecar = output::sidecar_path(path);
        output::write_csv(path, &self.rows)?;
        output::write_json(
            &sidecar,
            &serde_json::json!({
                "kind": "strategy-equivalence",
                "seed": self.spec.seed,
                "spec": self.spec,
                "counts": self.counts,
                "rows": self.rows.len(),
                "violations": self.violations(),
            }),
        )?;
        Ok(vec![path.to_path_buf(), sidecar])
    }
}

fn close_le(a: f64, b: f64) -> bool {
    a <= b + 1e-12 * b.abs().max(1.0)
}

/// Least interference, the exhaustive joint optimum and the upper-bound
/// construction on the same realizations, at equal active-set sizes.
pub fn run_strategy_equivalence(spec: &EquivalenceSpec) -> Result<EquivalenceResult> {
    if spec.scenario == Scenario::DD {
        return Err(refused(
            "strategy comparison needs an upper-bound construction, which dd lacks",
        ));
    }
    if spec.n > BRUTE_FORCE_MAX_USERS || spec.k > BRUTE_FORCE_MAX_USERS {
        return Err(refused(format!(
            "exhaustive search is limited to n, k <= {BRUTE_FORCE_MAX_USERS}, got n={}, k={}",
            spec.n, spec.k
        )));
    }
    if !(0.0..=1.0).contains(&spec.f) {
        return Err(domain(format!(
            "protection factor must lie in [0, 1], got {}",
            spec.f
        )));
    }
    if spec.trials < 1 {
        return Err(domain("need at least one trial"));
    }
    spec.level.check(spec.scenario)?;
    let params = SystemParams::with_users(
        spec.n as u64,
        spec.k as u64,
        spec.power,
        spec.noise,
        spec.model,
    )?;
    let counts = spec.resolved_counts()?;
    let root = StreamKey::new(spec.seed);
    let rows = (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let inst = NetworkInstance::generate(&params, root.child(trial))?;
            let li = schedule_with_counts(
                &inst,
                spec.scenario,
                spec.level,
                Strategy::LeastInterference,
                counts,
            )?;
            let jo = schedule_with_counts(
                &inst,
                spec.scenario,
                spec.level,
                Strategy::JointOptimization { protection: spec.f },
                counts,
            )?;
            let li_rates = sim_rates(&inst, &li, spec.scenario)?;
            let jo_rates = sim_rates(&inst, &jo, spec.scenario)?;
            let ub = ub_rates(&inst, &jo, spec.scenario)?;
            let alone = primary_alone(&inst, spec.scenario.primary)?;
            let required = spec.f * alone;
            let li_feasible = li_rates.primary >= required;
            Ok(EquivalenceRow {
                trial,
                li_secondary: li_rates.secondary,
                jo_secondary: jo_rates.secondary,
                ub_secondary: ub.secondary,
                li_primary: li_rates.primary,
                jo_primary: jo_rates.primary,
                required_primary: required,
                li_feasible,
                jo_feasible: jo.oracle == Some(Verdict::Feasible),
                li_le_jo: li_feasible.then(|| close_le(li_rates.secondary, jo_rates.secondary)),
                jo_le_ub: close_le(jo_rates.secondary, ub.secondary),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivalenceResult {
        spec: spec.clone(),
        counts,
        rows,
    })
}
