//! Closed-form asymptotics: time-division baselines, secondary throughput
//! factors, and the ranges of the protection factor `f` where simultaneous
//! transmission beats time division.
//!
//! Everything here is generic over [`Scalar`], so rational inputs give exact
//! rational answers.

use std::fmt;

use serde::Serialize;

use crate::error::{domain, refused, Result};
use crate::exact::Scalar;
use crate::network::{CoexistenceLevel, LinkMode, Scenario};
use crate::scheduler::ActivationExponents;

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticConfig<S> {
    pub scenario: Scenario,
    pub level: CoexistenceLevel,
    pub f: S,
    pub alpha: S,
    pub gamma: S,
}

impl<S: Scalar> AsymptoticConfig<S> {
    pub fn new(
        scenario: Scenario,
        level: CoexistenceLevel,
        f: S,
        alpha: S,
        gamma: S,
    ) -> Result<Self> {
        let cfg = AsymptoticConfig {
            scenario,
            level,
            f,
            alpha,
            gamma,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_f(&self.f)?;
        check_positive(&self.alpha, "alpha")?;
        check_positive(&self.gamma, "gamma")?;
        self.level.check(self.scenario)
    }
}

fn check_f<S: Scalar>(f: &S) -> Result<()> {
    if *f > S::zero() && *f <= S::one() {
        Ok(())
    } else {
        Err(domain(format!(
            "protection factor f must lie in (0, 1], got {f}"
        )))
    }
}

fn check_positive<S: Scalar>(v: &S, name: &str) -> Result<()> {
    if *v > S::zero() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive, got {v}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorResult<S> {
    /// Limit of secondary sum-rate over its stand-alone sum-rate.
    pub factor: S,
    /// Whether the primary protection constraint can be met at all.
    pub feasible: bool,
}

/// Maximum secondary throughput factor for a scenario and co-existence
/// level, attained by least-interference scheduling.
pub fn throughput_factor<S: Scalar>(cfg: &AsymptoticConfig<S>) -> Result<FactorResult<S>> {
    cfg.validate()?;
    let one = S::one;
    let zero = S::zero;
    let f = cfg.f.clone();
    let a = cfg.alpha.clone();
    let g = cfg.gamma.clone();
    let g1 = one() + g.clone();
    let ok = |factor: S| FactorResult {
        factor,
        feasible: true,
    };
    let result = match (cfg.scenario, cfg.level) {
        (Scenario::DD, _) => ok(one()),
        (Scenario::UU, CoexistenceLevel::PureInterference) => FactorResult {
            factor: zero(),
            feasible: f < one() && a <= one() - f.clone(),
        },
        (Scenario::DU, CoexistenceLevel::PureInterference) => FactorResult {
            factor: zero(),
            feasible: false,
        },
        (Scenario::UD, CoexistenceLevel::PureInterference) => ok(zero()),
        (Scenario::UU, CoexistenceLevel::Asymmetric) => {
            ok(((a.clone() - one() - f * g) / (a * g1)).positive_part())
        }
        (Scenario::UU, CoexistenceLevel::Symmetric) => {
            let knee = one() / g1.clone();
            if f <= knee {
                if a >= knee - f.clone() {
                    let v = g.clone() / (a.clone() * g1.clone() * g1.clone())
                        - (g / g1.clone()) * f / a
                        + one() / g1;
                    ok(v.positive_part())
                } else {
                    ok(one())
                }
            } else {
                let v = one() / (a.clone() * g.clone()) - (one() + one() / g) * f / a + one() / g1;
                ok(v.positive_part())
            }
        }
        (Scenario::DU, _) => ok(one() / g1),
        (Scenario::UD, _) => ok(if f <= one() / g1 { one() } else { zero() }),
    };
    Ok(result)
}

/// Growth scale of an asymptotic sum-rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RateScale {
    LogN,
    LogLogN,
}

impl fmt::Display for RateScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateScale::LogN => "log n",
            RateScale::LogLogN => "log log n",
        })
    }
}

/// Symbolic coefficient of a time-division rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TdCoefficient {
    /// `f`
    F,
    /// `1 − f`
    OneMinusF,
    /// `α(1 − f)`
    AlphaOneMinusF,
}

impl TdCoefficient {
    pub fn eval<S: Scalar>(self, f: &S, alpha: &S) -> S {
        match self {
            TdCoefficient::F => f.clone(),
            TdCoefficient::OneMinusF => S::one() - f.clone(),
            TdCoefficient::AlphaOneMinusF => alpha.clone() * (S::one() - f.clone()),
        }
    }
}

impl fmt::Display for TdCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TdCoefficient::F => "f",
            TdCoefficient::OneMinusF => "(1-f)",
            TdCoefficient::AlphaOneMinusF => "alpha(1-f)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TdTerm<S> {
    pub symbol: TdCoefficient,
    pub coefficient: S,
    pub scale: RateScale,
}

impl<S: Scalar> fmt::Display for TdTerm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} = {} {}",
            self.symbol, self.scale, self.coefficient, self.scale
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TdExponents<S> {
    pub primary: TdTerm<S>,
    pub secondary: TdTerm<S>,
}

/// Asymptotic time-division sum-rates of both networks.
///
/// An uplink network of `m` users grows as `log m`, a downlink one as
/// `log log m`; the secondary has `n^α` users.
pub fn td_exponents<S: Scalar>(scenario: Scenario, f: S, alpha: S) -> Result<TdExponents<S>> {
    check_f(&f)?;
    check_positive(&alpha, "alpha")?;
    let (p_scale, s_scale) = (scale_of(scenario.primary), scale_of(scenario.secondary));
    let s_symbol = match scenario.secondary {
        LinkMode::Uplink => TdCoefficient::AlphaOneMinusF,
        LinkMode::Downlink => TdCoefficient::OneMinusF,
    };
    Ok(TdExponents {
        primary: TdTerm {
            symbol: TdCoefficient::F,
            coefficient: f.clone(),
            scale: p_scale,
        },
        secondary: TdTerm {
            symbol: s_symbol,
            coefficient: s_symbol.eval(&f, &alpha),
            scale: s_scale,
        },
    })
}

fn scale_of(mode: LinkMode) -> RateScale {
    match mode {
        LinkMode::Uplink => RateScale::LogN,
        LinkMode::Downlink => RateScale::LogLogN,
    }
}

/// Secondary throughput factor under time division: `1 − f`.
pub fn td_secondary_factor<S: Scalar>(f: S) -> Result<S> {
    check_f(&f)?;
    Ok(S::one() - f)
}

/// An interval of `f` with open or closed ends.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interval<S> {
    pub lo: S,
    pub lo_closed: bool,
    pub hi: S,
    pub hi_closed: bool,
}

impl<S: Scalar> Interval<S> {
    pub fn contains(&self, x: &S) -> bool {
        let above = if self.lo_closed {
            *x >= self.lo
        } else {
            *x > self.lo
        };
        let below = if self.hi_closed {
            *x <= self.hi
        } else {
            *x < self.hi
        };
        above && below
    }
}

impl<S: Scalar> fmt::Display for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// Ranges of `f ∈ (0, 1]` where the simultaneous-transmission factor
/// strictly exceeds the time-division factor `1 − f`.
///
/// The uu symmetric ranges are only available in closed form for `γ ≥ 1`;
/// smaller `γ` is refused.
pub fn crossover_ranges<S: Scalar>(
    scenario: Scenario,
    level: CoexistenceLevel,
    alpha: S,
    gamma: S,
) -> Result<Vec<Interval<S>>> {
    check_positive(&alpha, "alpha")?;
    check_positive(&gamma, "gamma")?;
    level.check(scenario)?;
    let one = S::one;
    let zero = S::zero;
    let a = alpha;
    let g = gamma;
    let g1 = one() + g.clone();
    let up_to_one = |lo: S| Interval {
        lo,
        lo_closed: false,
        hi: one(),
        hi_closed: true,
    };
    let ranges = match (scenario, level) {
        (Scenario::DD, _) => vec![up_to_one(zero())],
        (_, CoexistenceLevel::PureInterference) => Vec::new(),
        (Scenario::UU, CoexistenceLevel::Asymmetric) => {
            if a > g1 {
                let lo = (one() + g.clone() * a.clone()) / (a.clone() - g.clone() + g * a);
                vec![up_to_one(lo)]
            } else {
                Vec::new()
            }
        }
        (Scenario::UU, CoexistenceLevel::Symmetric) => {
            if g < one() {
                return Err(refused(
                    "uu symmetric crossover ranges are only available in closed form for gamma >= 1",
                ));
            }
            let ga = g.clone() * a.clone();
            if a > g1 {
                let lo =
                    (a.clone() * g.clone() * g.clone() / g1.clone() - one()) / (ga - one() - g);
                vec![up_to_one(lo)]
            } else if a < one() / g1.clone() {
                let hi = (ga.clone() - g.clone() / g1) / (ga + a - g);
                vec![Interval {
                    lo: zero(),
                    lo_closed: false,
                    hi,
                    hi_closed: false,
                }]
            } else {
                Vec::new()
            }
        }
        (Scenario::DU, _) => vec![up_to_one(g / g1)],
        (Scenario::UD, _) => vec![Interval {
            lo: zero(),
            lo_closed: false,
            hi: one() / g1,
            hi_closed: true,
        }],
    };
    Ok(ranges)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint<S> {
    pub f: S,
    pub factor: S,
    pub feasible: bool,
    /// Time-division factor `1 − f`.
    pub td: S,
}

/// Throughput factor and time-division factor over a grid of `f`.
pub fn factor_curve<S: Scalar>(
    scenario: Scenario,
    level: CoexistenceLevel,
    alpha: S,
    gamma: S,
    f_grid: &[S],
) -> Result<Vec<CurvePoint<S>>> {
    f_grid
        .iter()
        .map(|f| {
            let cfg =
                AsymptoticConfig::new(scenario, level, f.clone(), alpha.clone(), gamma.clone())?;
            let r = throughput_factor(&cfg)?;
            Ok(CurvePoint {
                f: f.clone(),
                factor: r.factor,
                feasible: r.feasible,
                td: S::one() - f.clone(),
            })
        })
        .collect()
}

/// Growth law `coefficient × scale` of the secondary sum-rate when users
/// are activated with `exponents` by least interference.
pub fn secondary_rate_law(
    scenario: Scenario,
    level: CoexistenceLevel,
    exponents: ActivationExponents,
    alpha: f64,
    gamma: f64,
) -> Result<(f64, RateScale)> {
    level.check(scenario)?;
    let beta = if scenario.primary == LinkMode::Uplink && level == CoexistenceLevel::Symmetric {
        exponents.beta
    } else {
        1.0
    };
    let alpha_bar = if level == CoexistenceLevel::PureInterference {
        alpha
    } else {
        exponents.alpha_bar
    };
    // exponent of the interference the primary puts on the secondary receiver
    let interference = match scenario.primary {
        LinkMode::Uplink => ((1.0 + 1.0 / gamma) * beta - 1.0 / gamma).max(0.0),
        LinkMode::Downlink => 0.0,
    };
    Ok(match scenario.secondary {
        LinkMode::Uplink => ((alpha_bar - interference).max(0.0), RateScale::LogN),
        LinkMode::Downlink => (
            if interference > 0.0 { 0.0 } else { 1.0 },
            RateScale::LogLogN,
        ),
    })
}
