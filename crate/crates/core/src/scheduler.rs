//! User activation: least-interference selection, its threshold form, and an
//! exhaustive joint-optimization oracle for small networks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, refused, Result};
use crate::gain::FadingModel;
use crate::network::{CoexistenceLevel, LinkMode, NetworkInstance, Scenario, Strategy};
use crate::order_stats::round_power;

/// Largest network the exhaustive oracle will enumerate.
pub const BRUTE_FORCE_MAX_USERS: usize = 14;

/// The primary activates `n^β` users, the secondary `n^ᾱ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationExponents {
    pub alpha_bar: f64,
    pub beta: f64,
}

impl ActivationExponents {
    pub fn new(alpha_bar: f64, beta: f64) -> Result<Self> {
        if !(alpha_bar >= 0.0 && alpha_bar.is_finite()) {
            return Err(domain(format!(
                "alpha_bar must be finite and >= 0, got {alpha_bar}"
            )));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(domain(format!("beta must lie in [0, 1], got {beta}")));
        }
        Ok(ActivationExponents { alpha_bar, beta })
    }

    /// `ᾱ ≤ α` must hold for the system it is applied to.
    pub fn check_alpha(&self, alpha: f64) -> Result<()> {
        if self.alpha_bar > alpha * (1.0 + 1e-12) {
            return Err(domain(format!(
                "alpha_bar {} exceeds alpha {alpha}",
                self.alpha_bar
            )));
        }
        Ok(())
    }
}

/// What one network does in a decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Activity {
    /// Uplink: these users transmit. `threshold` is set when the set came
    /// from least-interference thresholding.
    Uplink {
        active: Vec<usize>,
        threshold: Option<f64>,
    },
    /// Downlink: the base station serves its strongest user.
    Downlink { strongest: usize },
}

impl Activity {
    pub fn active_count(&self) -> usize {
        match self {
            Activity::Uplink { active, .. } => active.len(),
            Activity::Downlink { .. } => 1,
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match self {
            Activity::Uplink { threshold, .. } => *threshold,
            Activity::Downlink { .. } => None,
        }
    }

    pub fn mode(&self) -> LinkMode {
        match self {
            Activity::Uplink { .. } => LinkMode::Uplink,
            Activity::Downlink { .. } => LinkMode::Downlink,
        }
    }
}

/// Outcome of the protection constraint in the exhaustive oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    /// No subset pair met the constraint; the pair maximizing the primary
    /// rate was returned instead.
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDecision {
    pub primary: Activity,
    pub secondary: Activity,
    /// Set only by the joint-optimization oracle.
    pub oracle: Option<Verdict>,
}

/// Number of users an exponent activates out of `pool`:
/// `clamp(round(n^e), 0, pool)`, with exponent 0 meaning a silent network.
pub fn activation_count(n: u64, exponent: f64, pool: usize) -> usize {
    if exponent <= 0.0 {
        return 0;
    }
    (round_power(n, exponent) as usize).min(pool)
}

/// Indices of the `count` smallest gains, ties to the lower index, in
/// ascending index order.
pub fn least_interference_set(gains: &[f64], count: usize) -> Result<Vec<usize>> {
    if count > gains.len() {
        return Err(domain(format!(
            "cannot select {count} users out of {}",
            gains.len()
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut idx: Vec<usize> = (0..gains.len()).collect();
    let order = |a: &usize, b: &usize| gains[*a].total_cmp(&gains[*b]).then(a.cmp(b));
    if count < idx.len() {
        idx.select_nth_unstable_by(count - 1, order);
        idx.truncate(count);
    }
    idx.sort_unstable();
    Ok(idx)
}

/// `F⁻¹(count / (pool + 1))`: activating the users whose interference gain
/// falls below it selects about `count` of `pool` users.
pub fn threshold_value(model: &FadingModel, count: u64, pool: u64) -> Result<f64> {
    if count < 1 || count > pool {
        return Err(domain(format!(
            "need 1 <= count <= pool, got count={count}, pool={pool}"
        )));
    }
    model.quantile(count as f64 / (pool as f64 + 1.0))
}

/// Users whose gain is strictly below `threshold`.
pub fn threshold_set(gains: &[f64], threshold: f64) -> Vec<usize> {
    gains
        .iter()
        .enumerate()
        .filter(|(_, g)| **g < threshold)
        .map(|(i, _)| i)
        .collect()
}

fn argmax(gains: &[f64]) -> usize {
    let mut best = 0;
    for (i, g) in gains.iter().enumerate() {
        if *g > gains[best] {
            best = i;
        }
    }
    best
}

pub fn primary_schedules(scenario: Scenario, level: CoexistenceLevel) -> bool {
    scenario.primary == LinkMode::Uplink && level == CoexistenceLevel::Symmetric
}

pub fn secondary_schedules(scenario: Scenario, level: CoexistenceLevel) -> bool {
    scenario.secondary == LinkMode::Uplink && level != CoexistenceLevel::PureInterference
}

/// Activates users for one realization.
///
/// The primary schedules only at the symmetric level, the secondary at both
/// asymmetric and symmetric levels; non-scheduling uplinks keep every user
/// active and downlinks serve their strongest user. With
/// [`Strategy::JointOptimization`] the sets come from
/// [`joint_opt_bruteforce`] at the same cardinalities.
pub fn schedule(
    instance: &NetworkInstance,
    scenario: Scenario,
    level: CoexistenceLevel,
    strategy: Strategy,
    exponents: ActivationExponents,
) -> Result<ScheduleDecision> {
    level.check(scenario)?;
    let n = instance.n();
    let k = instance.k();
    let primary_count = if primary_schedules(scenario, level) {
        activation_count(n as u64, exponents.beta, n)
    } else {
        n
    };
    let secondary_count = if secondary_schedules(scenario, level) {
        activation_count(n as u64, exponents.alpha_bar, k)
    } else {
        k
    };
    schedule_with_counts(
        instance,
        scenario,
        level,
        strategy,
        (primary_count, secondary_count),
    )
}

/// [`schedule`] with the active-set sizes given directly. Counts of
/// networks that do not schedule at `level` are ignored.
pub fn schedule_with_counts(
    instance: &NetworkInstance,
    scenario: Scenario,
    level: CoexistenceLevel,
    strategy: Strategy,
    counts: (usize, usize),
) -> Result<ScheduleDecision> {
    level.check(scenario)?;
    let n = instance.n();
    let k = instance.k();
    let primary_count = if primary_schedules(scenario, level) {
        counts.0
    } else {
        n
    };
    let secondary_count = if secondary_schedules(scenario, level) {
        counts.1
    } else {
        k
    };
    if primary_count > n || secondary_count > k {
        return Err(domain(format!(
            "counts ({primary_count}, {secondary_count}) exceed network sizes ({n}, {k})"
        )));
    }
    if let Strategy::JointOptimization { protection } = strategy {
        return joint_opt_bruteforce(
            instance,
            scenario,
            level,
            protection,
            (primary_count, secondary_count),
        );
    }
    let li = |gains: &[f64], count: usize| -> Result<Activity> {
        Ok(Activity::Uplink {
            active: least_interference_set(gains, count)?,
            threshold: Some(
                instance
                    .model
                    .quantile(count as f64 / (gains.len() as f64 + 1.0))?,
            ),
        })
    };
    let primary = match scenario.primary {
        LinkMode::Downlink => Activity::Downlink {
            strongest: argmax(&instance.g_p),
        },
        LinkMode::Uplink if primary_schedules(scenario, level) => {
            li(&instance.g_ps, primary_count)?
        }
        LinkMode::Uplink => Activity::Uplink {
            active: (0..n).collect(),
            threshold: None,
        },
    };
    let secondary = match scenario.secondary {
        LinkMode::Downlink => Activity::Downlink {
            strongest: argmax(&instance.g_s),
        },
        LinkMode::Uplink if secondary_schedules(scenario, level) => {
            li(&instance.g_sp, secondary_count)?
        }
        LinkMode::Uplink => Activity::Uplink {
            active: (0..k).collect(),
            threshold: None,
        },
    };
    Ok(ScheduleDecision {
        primary,
        secondary,
        oracle: None,
    })
}

/// Per-subset loads of one network: own received signal and interference
/// imposed on the other network's receiver.
struct Candidates {
    masks: Vec<u32>,
    signal: Vec<f64>,
    imposed: Vec<f64>,
}

fn uplink_candidates(own: &[f64], cross: &[f64], count: usize, search: bool) -> Candidates {
    let len = own.len();
    let full = if len == 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    };
    let masks: Vec<u32> = if search {
        (0..=full)
            .filter(|m| m.count_ones() as usize == count)
            .collect()
    } else {
        vec![full]
    };
    let sum = |gains: &[f64], m: u32| -> f64 {
        (0..len)
            .filter(|i| m & (1 << i) != 0)
            .map(|i| gains[i])
            .sum()
    };
    Candidates {
        signal: masks.iter().map(|&m| sum(own, m)).collect(),
        imposed: masks.iter().map(|&m| sum(cross, m)).collect(),
        masks,
    }
}

fn downlink_candidate(own: &[f64], base_station_gain: f64) -> Candidates {
    let best = argmax(own);
    Candidates {
        masks: vec![1 << best],
        signal: vec![own[best]],
        imposed: vec![base_station_gain],
    }
}

/// Lexicographic order of equal-size index sets encoded as bitmasks: at the
/// lowest differing index, the set containing it comes first.
fn lex_less(a: u32, b: u32) -> bool {
    let d = a ^ b;
    d != 0 && a & (d & d.wrapping_neg()) != 0
}

#[derive(Clone, Copy)]
struct Pick {
    feasible: bool,
    score: f64,
    primary: u32,
    secondary: u32,
}

impl Pick {
    fn better_than(&self, other: &Pick) -> bool {
        if self.feasible != other.feasible {
            return self.feasible;
        }
        if self.score != other.score {
            return self.score > other.score;
        }
        if self.primary != other.primary {
            return lex_less(self.primary, other.primary);
        }
        lex_less(self.secondary, other.secondary)
    }
}

fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Exhaustive search over active sets of the given sizes maximizing the
/// secondary sum-rate subject to
/// `primary rate ≥ protection × stand-alone primary rate`.
///
/// Only uplink networks that schedule at `level` are searched; the others
/// keep their fixed activity. If no pair meets the constraint the pair with
/// the largest primary rate is returned with [`Verdict::Infeasible`]. Ties
/// go to the lexicographically smallest (primary, secondary) index sets.
pub fn joint_opt_bruteforce(
    instance: &NetworkInstance,
    scenario: Scenario,
    level: CoexistenceLevel,
    protection: f64,
    counts: (usize, usize),
) -> Result<ScheduleDecision> {
    level.check(scenario)?;
    let n = instance.n();
    let k = instance.k();
    if n > BRUTE_FORCE_MAX_USERS || k > BRUTE_FORCE_MAX_USERS {
        return Err(refused(format!(
            "exhaustive search is limited to n, k <= {BRUTE_FORCE_MAX_USERS}, got n={n}, k={k}"
        )));
    }
    if !(0.0..=1.0).contains(&protection) {
        return Err(domain(format!(
            "protection factor must lie in [0, 1], got {protection}"
        )));
    }
    let p_search = primary_schedules(scenario, level);
    let s_search = secondary_schedules(scenario, level);
    let cp = if p_search { counts.0 } else { n };
    let cs = if s_search { counts.1 } else { k };
    if cp > n || cs > k {
        return Err(domain(format!(
            "counts ({cp}, {cs}) exceed network sizes ({n}, {k})"
        )));
    }
    let prim = match scenario.primary {
        LinkMode::Uplink => uplink_candidates(&instance.g_p, &instance.g_ps, cp, p_search),
        LinkMode::Downlink => downlink_candidate(&instance.g_p, instance.g0_ps),
    };
    let sec = match scenario.secondary {
        LinkMode::Uplink => uplink_candidates(&instance.g_s, &instance.g_sp, cs, s_search),
        LinkMode::Downlink => downlink_candidate(&instance.g_s, instance.g0_sp),
    };
    let power = instance.power;
    let noise = instance.noise;
    let alone_signal = match scenario.primary {
        LinkMode::Uplink => instance.g_p.iter().sum::<f64>(),
        LinkMode::Downlink => instance.g_p[argmax(&instance.g_p)],
    };
    let required = protection * (power * alone_signal / noise).ln_1p() / std::f64::consts::LN_2;

    let best = (0..prim.masks.len())
        .into_par_iter()
        .map(|a| {
            let mut best: Option<Pick> = None;
            for b in 0..sec.masks.len() {
                let rp = (power * prim.signal[a] / (noise + power * sec.imposed[b])).ln_1p()
                    / std::f64::consts::LN_2;
                let rs = (power * sec.signal[b] / (noise + power * prim.imposed[a])).ln_1p()
                    / std::f64::consts::LN_2;
                let feasible = rp >= required;
                let pick = Pick {
                    feasible,
                    score: if feasible { rs } else { rp },
                    primary: prim.masks[a],
                    secondary: sec.masks[b],
                };
                if best.as_ref().is_none_or(|cur| pick.better_than(cur)) {
                    best = Some(pick);
                }
            }
            best
        })
        .reduce(
            || None,
            |x, y| match (x, y) {
                (Some(x), Some(y)) => Some(if y.better_than(&x) { y } else { x }),
                (x, None) => x,
                (None, y) => y,
            },
        )
        .expect("at least one candidate pair");

    let to_activity = |mode: LinkMode, mask: u32| match mode {
        LinkMode::Uplink => Activity::Uplink {
            active: mask_indices(mask),
            threshold: None,
        },
        LinkMode::Downlink => Activity::Downlink {
            strongest: mask.trailing_zeros() as usize,
        },
    };
    Ok(ScheduleDecision {
        primary: to_activity(scenario.primary, best.primary),
        secondary: to_activity(scenario.secondary, best.secondary),
        oracle: Some(if best.feasible {
            Verdict::Feasible
        } else {
            Verdict::Infeasible
        }),
    })
}

/// Exponents that attain the asymptotic optimum for each scenario and level.
pub fn optimal_exponents(
    scenario: Scenario,
    level: CoexistenceLevel,
    f: f64,
    alpha: f64,
    gamma: f64,
) -> Result<ActivationExponents> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(domain(format!(
            "protection factor f must lie in (0, 1], got {f}"
        )));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain(format!("alpha must be positive, got {alpha}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(domain(format!("gamma must be positive, got {gamma}")));
    }
    level.check(scenario)?;
    let g1 = 1.0 + gamma;
    let (alpha_bar, beta) = match (scenario, level) {
        (_, CoexistenceLevel::PureInterference) => (alpha, 1.0),
        (Scenario::UU, CoexistenceLevel::Asymmetric) => (
            if alpha > 1.0 {
                (gamma - f * gamma + alpha) / g1
            } else {
                0.0
            },
            1.0,
        ),
        (Scenario::UU, CoexistenceLevel::Symmetric) if f <= 1.0 / g1 => {
            let beta = 1.0 / g1;
            let ab = if alpha >= beta - f {
                (gamma * (beta - f) + alpha) / g1
            } else {
                alpha
            };
            (ab, beta)
        }
        (Scenario::UU, CoexistenceLevel::Symmetric) => {
            let ab = if alpha > (g1 * g1 * f - g1) / gamma {
                alpha / g1
            } else {
                0.0
            };
            (ab, f)
        }
        (Scenario::DU, _) => (alpha / g1, 1.0),
        (Scenario::UD, _) => (alpha, f),
        _ => (alpha, 1.0),
    };
    ActivationExponents::new(alpha_bar, beta)
}
