//! Sum-rates in bits per channel use, with interference treated as noise.

use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, refused, Result};
use crate::gain::FadingModel;
use crate::network::{LinkMode, NetworkInstance, Scenario};
use crate::scheduler::{ActivationExponents, Activity, ScheduleDecision};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub primary: f64,
    pub secondary: f64,
}

/// `log₂(1 + P·signal / (N₀ + P·interference))`; exactly 0 for zero signal.
pub fn link_rate(power: f64, noise: f64, signal: f64, interference: f64) -> f64 {
    if signal == 0.0 {
        return 0.0;
    }
    (power * signal / (noise + power * interference)).ln_1p() / std::f64::consts::LN_2
}

fn check_powers(power: f64, noise: f64) -> Result<()> {
    if !(power > 0.0 && noise > 0.0) {
        return Err(domain(format!(
            "power and noise must be positive, got P={power}, N0={noise}"
        )));
    }
    Ok(())
}

/// Gaussian multiple-access sum-rate `log₂(1 + P Σg / N₀)`.
pub fn uplink_alone(gains: &[f64], power: f64, noise: f64) -> Result<f64> {
    check_powers(power, noise)?;
    if gains.is_empty() {
        return Err(domain("uplink rate needs at least one user"));
    }
    Ok(link_rate(power, noise, gains.iter().sum(), 0.0))
}

/// Broadcast sum-rate serving the strongest user, `log₂(1 + P max g / N₀)`.
pub fn downlink_alone(gains: &[f64], power: f64, noise: f64) -> Result<f64> {
    check_powers(power, noise)?;
    if gains.is_empty() {
        return Err(domain("downlink rate needs at least one user"));
    }
    Ok(link_rate(
        power,
        noise,
        gains.iter().copied().fold(0.0, f64::max),
        0.0,
    ))
}

/// Stand-alone sum-rate of the primary network on this realization.
pub fn primary_alone(instance: &NetworkInstance, mode: LinkMode) -> Result<f64> {
    match mode {
        LinkMode::Uplink => uplink_alone(&instance.g_p, instance.power, instance.noise),
        LinkMode::Downlink => downlink_alone(&instance.g_p, instance.power, instance.noise),
    }
}

/// Stand-alone sum-rate of the secondary network on this realization.
pub fn secondary_alone(instance: &NetworkInstance, mode: LinkMode) -> Result<f64> {
    match mode {
        LinkMode::Uplink => uplink_alone(&instance.g_s, instance.power, instance.noise),
        LinkMode::Downlink => downlink_alone(&instance.g_s, instance.power, instance.noise),
    }
}

/// Received signal of one network and the interference it puts on the
/// other network's receiver.
#[derive(Clone, Copy, Debug)]
struct Load {
    signal: f64,
    imposed: f64,
}

fn load(
    activity: &Activity,
    mode: LinkMode,
    own: &[f64],
    cross: &[f64],
    g0: f64,
    side: &str,
) -> Result<Load> {
    match (activity, mode) {
        (Activity::Uplink { active, .. }, LinkMode::Uplink) => {
            if let Some(bad) = active.iter().find(|&&i| i >= own.len()) {
                return Err(contract(format!("{side} user {bad} does not exist")));
            }
            Ok(Load {
                signal: active.iter().map(|&i| own[i]).sum(),
                imposed: active.iter().map(|&i| cross[i]).sum(),
            })
        }
        (Activity::Downlink { strongest }, LinkMode::Downlink) => {
            let signal = *own
                .get(*strongest)
                .ok_or_else(|| contract(format!("{side} user {strongest} does not exist")))?;
            Ok(Load {
                signal,
                imposed: g0,
            })
        }
        _ => Err(contract(format!(
            "{side} decision does not match its link mode"
        ))),
    }
}

fn pair(instance: &NetworkInstance, p: Load, s: Load) -> RatePair {
    RatePair {
        primary: link_rate(instance.power, instance.noise, p.signal, s.imposed),
        secondary: link_rate(instance.power, instance.noise, s.signal, p.imposed),
    }
}

/// Rates of both networks transmitting simultaneously under `decision`.
pub fn sim_rates(
    instance: &NetworkInstance,
    decision: &ScheduleDecision,
    scenario: Scenario,
) -> Result<RatePair> {
    let p = load(
        &decision.primary,
        scenario.primary,
        &instance.g_p,
        &instance.g_ps,
        instance.g0_ps,
        "primary",
    )?;
    let s = load(
        &decision.secondary,
        scenario.secondary,
        &instance.g_s,
        &instance.g_sp,
        instance.g0_sp,
        "secondary",
    )?;
    Ok(pair(instance, p, s))
}

/// Upper-bound rates: every active uplink user is credited with its
/// network's largest own gain and the pool's smallest interference gains.
pub fn ub_rates(
    instance: &NetworkInstance,
    decision: &ScheduleDecision,
    scenario: Scenario,
) -> Result<RatePair> {
    if scenario == Scenario::DD {
        return Err(refused(
            "no upper-bound construction exists when both networks are in downlink",
        ));
    }
    // validates the decision against the scenario
    sim_rates(instance, decision, scenario)?;
    let bound = |activity: &Activity, own: &[f64], cross: &[f64], g0: f64| -> Load {
        let best = own.iter().copied().fold(0.0, f64::max);
        match activity {
            Activity::Uplink { active, .. } => {
                let c = active.len();
                let mut sorted = cross.to_vec();
                Load {
                    signal: c as f64 * best,
                    imposed: crate::order_stats::sum_lowest(&mut sorted, c),
                }
            }
            Activity::Downlink { .. } => Load {
                signal: best,
                imposed: g0,
            },
        }
    };
    let p = bound(
        &decision.primary,
        &instance.g_p,
        &instance.g_ps,
        instance.g0_ps,
    );
    let s = bound(
        &decision.secondary,
        &instance.g_s,
        &instance.g_sp,
        instance.g0_sp,
    );
    Ok(pair(instance, p, s))
}

/// Time division: the primary holds the channel a fraction `f` of the time.
pub fn td_rates(primary_alone: f64, secondary_alone: f64, f: f64) -> Result<RatePair> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(domain(format!(
            "time fraction f must lie in (0, 1], got {f}"
        )));
    }
    Ok(RatePair {
        primary: f * primary_alone,
        secondary: (1.0 - f) * secondary_alone,
    })
}

/// Closed-form secondary rate obtained by replacing order statistics with
/// their concentration values (Rayleigh gains):
///
/// * uu: `log₂(1 + n^ᾱ / (N₀/P + 1/2))`
/// * ud: `log₂(1 + ln(n^α) / (N₀/P + 1/2))`
/// * du: `log₂(1 + n^ᾱ / (N₀/P + 1))`
/// * dd: `log₂(1 + ln(n^α) / (N₀/P + 1))`
///
/// The `1/2` is the concentration value of the interference from `√n`
/// least-interference primary users, so those two forms need `β = 1/2`.
pub fn intermediate_rate(
    scenario: Scenario,
    model: &FadingModel,
    exponents: ActivationExponents,
    alpha: f64,
    n: u64,
    power: f64,
    noise: f64,
) -> Result<f64> {
    check_powers(power, noise)?;
    if *model != FadingModel::Rayleigh {
        return Err(refused(format!(
            "intermediate rates are defined for Rayleigh gains only, got {model}"
        )));
    }
    if n < 2 {
        return Err(domain(format!("intermediate rate needs n >= 2, got {n}")));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(domain(format!("alpha must be positive, got {alpha}")));
    }
    if scenario.primary == LinkMode::Uplink && (exponents.beta - 0.5).abs() > 1e-12 {
        return Err(refused(format!(
            "the primary-uplink intermediate rate assumes beta = 0.5, got {}",
            exponents.beta
        )));
    }
    let nf = n as f64;
    let numerator = match scenario.secondary {
        LinkMode::Uplink => nf.powf(exponents.alpha_bar),
        LinkMode::Downlink => alpha * nf.ln(),
    };
    let interference = match scenario.primary {
        LinkMode::Uplink => 0.5,
        LinkMode::Downlink => 1.0,
    };
    Ok((numerator / (noise / power + interference)).ln_1p() / std::f64::consts::LN_2)
}
