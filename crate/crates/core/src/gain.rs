//! Unit-mean power-gain distributions.
//!
//! A gain model describes `G = X²/2` where the amplitude `X` is Rayleigh,
//! Rician or Nakagami-m with `E[X²] = 2`, so every power gain has mean one.
//! Each family is handled internally as a (possibly infinite) mixture of
//! gamma laws:
//!
//! * Rayleigh: `Gamma(1, 1)`, the unit exponential.
//! * Nakagami-m: `Gamma(m, 1/m)`.
//! * Rician-K: `Gamma(1 + J, 1/(K+1))` with `J ~ Poisson(K)`, the
//!   noncentral chi-square with two degrees of freedom in disguise.
//!
//! The mixture form gives the CDF, survival function and truncated moments
//! from the regularized incomplete gamma function; the Rician density is
//! evaluated directly through I₀.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::special::{gamma, gamma_p, gamma_pq, ln_bessel_i0, ln_gamma};

/// Power-gain law of a channel or interference link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FadingModel {
    Rayleigh,
    /// Rician fading with LOS-to-scatter power ratio `k`.
    Rician {
        k: f64,
    },
    /// Nakagami-m fading with shape `m ≥ 1/2`.
    Nakagami {
        m: f64,
    },
}

/// Rate `c` of the exponential tail: `ln f(g) / g → −c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailParams {
    pub c: f64,
}

/// Low-gain behaviour `F(g) = λ g^γ + O(g^{γ+1})` as `g → 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowGainParams {
    pub lambda: f64,
    pub gamma: f64,
}

impl TailParams {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain(format!("tail parameter must be positive, got {c}")));
        }
        Ok(TailParams { c })
    }
}

impl LowGainParams {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite() && gamma > 0.0 && gamma.is_finite()) {
            return Err(domain(format!(
                "low-gain parameters must be positive, got lambda={lambda}, gamma={gamma}"
            )));
        }
        Ok(LowGainParams { lambda, gamma })
    }
}

/// Partial (truncated) moments of a gain law below a threshold `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartialMoments {
    /// `F(t)`
    pub mass: f64,
    /// `E[G · 1{G ≤ t}]`
    pub first: f64,
    /// `E[G² · 1{G ≤ t}]`
    pub second: f64,
}

impl FadingModel {
    pub fn rayleigh() -> Self {
        FadingModel::Rayleigh
    }

    pub fn rician(k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(domain(format!(
                "Rician K-factor must be finite and >= 0, got {k}"
            )));
        }
        Ok(FadingModel::Rician { k })
    }

    pub fn nakagami(m: f64) -> Result<Self> {
        if !(m >= 0.5 && m.is_finite()) {
            return Err(domain(format!(
                "Nakagami shape must be finite and >= 0.5, got {m}"
            )));
        }
        Ok(FadingModel::Nakagami { m })
    }

    /// Re-checks parameter ranges; useful after deserializing or building
    /// a variant by hand.
    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingModel::Rayleigh => Ok(()),
            FadingModel::Rician { k } => FadingModel::rician(k).map(|_| ()),
            FadingModel::Nakagami { m } => FadingModel::nakagami(m).map(|_| ()),
        }
    }

    pub fn tail_parameter(&self) -> TailParams {
        let c = match *self {
            FadingModel::Rayleigh => 1.0,
            FadingModel::Rician { k } => k + 1.0,
            FadingModel::Nakagami { m } => m,
        };
        TailParams { c }
    }

    pub fn low_gain_params(&self) -> LowGainParams {
        match *self {
            FadingModel::Rayleigh => LowGainParams {
                lambda: 1.0,
                gamma: 1.0,
            },
            FadingModel::Rician { k } => LowGainParams {
                lambda: (1.0 + k) * (-k).exp(),
                gamma: 1.0,
            },
            FadingModel::Nakagami { m } => LowGainParams {
                lambda: m.powf(m - 1.0) / gamma(m),
                gamma: m,
            },
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            FadingModel::Rayleigh => 1.0,
            FadingModel::Rician { k } => (1.0 + 2.0 * k) / ((1.0 + k) * (1.0 + k)),
            FadingModel::Nakagami { m } => 1.0 / m,
        }
    }

    /// Natural log of the density; `-inf` where the density vanishes.
    pub fn ln_pdf(&self, g: f64) -> Result<f64> {
        check_gain(g)?;
        Ok(match *self {
            FadingModel::Rayleigh => -g,
            FadingModel::Rician { k } => {
                (1.0 + k).ln() - k - (k + 1.0) * g + ln_bessel_i0(2.0 * (k * (k + 1.0) * g).sqrt())
            }
            FadingModel::Nakagami { m } => {
                if g == 0.0 {
                    return Ok(if m < 1.0 {
                        f64::INFINITY
                    } else if m == 1.0 {
                        0.0
                    } else {
                        f64::NEG_INFINITY
                    });
                }
                m * m.ln() - ln_gamma(m) + (m - 1.0) * g.ln() - m * g
            }
        })
    }

    pub fn pdf(&self, g: f64) -> Result<f64> {
        self.ln_pdf(g).map(f64::exp)
    }

    pub fn cdf(&self, g: f64) -> Result<f64> {
        check_gain(g)?;
        if g.is_infinite() {
            return Ok(1.0);
        }
        match *self {
            FadingModel::Rayleigh => Ok(-(-g).exp_m1()),
            FadingModel::Nakagami { m } => gamma_p(m, m * g),
            FadingModel::Rician { k } => {
                let x = (k + 1.0) * g;
                poisson_mixture(k, |j| Ok(gamma_pq(j + 1.0, x)?.0), Monotone::Decreasing)
                    .map(|v| v.min(1.0))
            }
        }
    }

    /// `1 − F(g)`, accurate deep into the upper tail.
    pub fn survival(&self, g: f64) -> Result<f64> {
        check_gain(g)?;
        if g.is_infinite() {
            return Ok(0.0);
        }
        match *self {
            FadingModel::Rayleigh => Ok((-g).exp()),
            FadingModel::Nakagami { m } => Ok(gamma_pq(m, m * g)?.1),
            FadingModel::Rician { k } => {
                let x = (k + 1.0) * g;
                poisson_mixture(k, |j| Ok(gamma_pq(j + 1.0, x)?.1), Monotone::Increasing)
                    .map(|v| v.min(1.0))
            }
        }
    }

    /// Inverse CDF on `[0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(domain(format!(
                "quantile level must lie in [0, 1), got {p}"
            )));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        if let FadingModel::Rayleigh = self {
            return Ok(-(-p).ln_1p());
        }
        if p > 0.5 {
            return self.survival_quantile(1.0 - p);
        }
        let low = self.low_gain_params();
        let guess = (p / low.lambda)
            .powf(1.0 / low.gamma)
            .max(f64::MIN_POSITIVE);
        solve_increasing(
            |g| {
                let v = self.cdf(g)? - p;
                Ok((v, self.pdf(g)?))
            },
            guess,
        )
    }

    /// Inverse survival function: the `g` with `P[G > g] = q`, `q ∈ (0, 1]`.
    pub fn survival_quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(domain(format!(
                "survival level must lie in (0, 1], got {q}"
            )));
        }
        if q == 1.0 {
            return Ok(0.0);
        }
        if let FadingModel::Rayleigh = self {
            return Ok(-q.ln());
        }
        if q > 0.5 {
            return self.quantile(1.0 - q);
        }
        let c = self.tail_parameter().c;
        let target = q.ln();
        solve_increasing(
            |g| {
                let s = self.survival(g)?;
                if s <= 0.0 {
                    // beyond representable tail: treat as far above the root
                    return Ok((f64::INFINITY, 0.0));
                }
                Ok((target - s.ln(), self.pdf(g)? / s))
            },
            (-target / c).max(1e-3),
        )
    }

    /// `F(t)`, `E[G·1{G≤t}]` and `E[G²·1{G≤t}]`.
    pub fn partial_moments(&self, t: f64) -> Result<PartialMoments> {
        check_gain(t)?;
        let gamma_component = |shape: f64, scale: f64| -> Result<(f64, f64, f64)> {
            let x = t / scale;
            Ok((
                gamma_p(shape, x)?,
                shape * scale * gamma_p(shape + 1.0, x)?,
                shape * (shape + 1.0) * scale * scale * gamma_p(shape + 2.0, x)?,
            ))
        };
        let (mass, first, second) = match *self {
            FadingModel::Rayleigh => gamma_component(1.0, 1.0)?,
            FadingModel::Nakagami { m } => gamma_component(m, 1.0 / m)?,
            FadingModel::Rician { k } => {
                let scale = 1.0 / (k + 1.0);
                let mass = self.cdf(t)?;
                let first = poisson_mixture(
                    k,
                    |j| Ok((j + 1.0) * scale * gamma_p(j + 2.0, t / scale)?),
                    Monotone::Growing,
                )?;
                let second = poisson_mixture(
                    k,
                    |j| Ok((j + 1.0) * (j + 2.0) * scale * scale * gamma_p(j + 3.0, t / scale)?),
                    Monotone::Growing,
                )?;
                (mass, first, second)
            }
        };
        Ok(PartialMoments {
            mass,
            first,
            second,
        })
    }

    /// One draw.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingModel::Rayleigh => -(1.0 - rng.random::<f64>()).ln(),
            FadingModel::Nakagami { m } => gamma_law(m, 1.0 / m).sample(rng),
            FadingModel::Rician { k } => rician_draw(k, rng),
        }
    }

    /// `count` i.i.d. draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        match *self {
            FadingModel::Rayleigh => (0..count)
                .map(|_| -(1.0 - rng.random::<f64>()).ln())
                .collect(),
            FadingModel::Nakagami { m } => {
                let law = gamma_law(m, 1.0 / m);
                (0..count).map(|_| law.sample(rng)).collect()
            }
            FadingModel::Rician { k } => (0..count).map(|_| rician_draw(k, rng)).collect(),
        }
    }

    /// A draw of the sum of `count` i.i.d. gains, sampled from its exact law
    /// in O(1) time.
    pub fn sample_sum<R: Rng + ?Sized>(&self, rng: &mut R, count: u64) -> f64 {
        if count == 0 {
            return 0.0;
        }
        let n = count as f64;
        match *self {
            FadingModel::Rayleigh => gamma_law(n, 1.0).sample(rng),
            FadingModel::Nakagami { m } => gamma_law(n * m, 1.0 / m).sample(rng),
            FadingModel::Rician { k } => {
                let extra = if k > 0.0 {
                    Poisson::new(k * n)
                        .expect("finite positive rate")
                        .sample(rng)
                } else {
                    0.0
                };
                gamma_law(n + extra, 1.0 / (k + 1.0)).sample(rng)
            }
        }
    }

    /// A draw of the maximum of `count ≥ 1` i.i.d. gains via `F⁻¹(U^{1/count})`.
    pub fn sample_max<R: Rng + ?Sized>(&self, rng: &mut R, count: u64) -> Result<f64> {
        if count == 0 {
            return Err(domain("maximum of zero gains is undefined"));
        }
        let u = 1.0 - rng.random::<f64>();
        let q = (-(u.ln() / count as f64).exp_m1()).max(f64::MIN_POSITIVE);
        self.survival_quantile(q.min(1.0))
    }
}

fn check_gain(g: f64) -> Result<()> {
    if g >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("gain must be nonnegative, got {g}")))
    }
}

fn gamma_law(shape: f64, scale: f64) -> Gamma<f64> {
    Gamma::new(shape, scale).expect("gamma parameters are validated upstream")
}

fn rician_draw<R: Rng + ?Sized>(k: f64, rng: &mut R) -> f64 {
    let sigma = (0.5 / (k + 1.0)).sqrt();
    let los = (k / (k + 1.0)).sqrt();
    let z1: f64 = StandardNormal.sample(rng);
    let z2: f64 = StandardNormal.sample(rng);
    let i = sigma * z1 + los;
    let q = sigma * z2;
    i * i + q * q
}

/// How a mixture component's value behaves as the Poisson index grows;
/// bounds the truncated tail of the mixture.
#[derive(Clone, Copy)]
enum Monotone {
    Decreasing,
    Increasing,
    Growing,
}

/// `Σ_j Pois(j; k) · term(j)` truncated once the remaining Poisson mass
/// cannot move the sum in the 17th digit.
fn poisson_mixture(k: f64, term: impl Fn(f64) -> Result<f64>, shape: Monotone) -> Result<f64> {
    if k == 0.0 {
        return term(0.0);
    }
    let ln_k = k.ln();
    let cap = (k + 60.0 * k.sqrt() + 200.0).ceil() as usize;
    let mut sum = 0.0;
    for j in 0..=cap {
        let jf = j as f64;
        let w = (-k + jf * ln_k - ln_gamma(jf + 1.0)).exp();
        let v = term(jf)?;
        sum += w * v;
        if jf > k {
            // tail mass after j is at most w · r/(1 − r), r = k/(j+2)
            let r = k / (jf + 2.0);
            let rest = w * (k / (jf + 1.0)) / (1.0 - r);
            let bound = match shape {
                Monotone::Decreasing => rest * v,
                Monotone::Increasing => rest,
                Monotone::Growing => rest * v.max(1.0) * (jf + 3.0) * (jf + 3.0),
            };
            if bound <= 1e-17 * sum.abs() || (sum == 0.0 && bound == 0.0) {
                return Ok(sum);
            }
        }
    }
    Ok(sum)
}

/// Root of an increasing function `h` given `(h(x), h'(x))`, by Newton's
/// method safeguarded with bisection on a bracket grown from `guess`.
fn solve_increasing(h: impl Fn(f64) -> Result<(f64, f64)>, guess: f64) -> Result<f64> {
    let mut lo = guess;
    let mut hi = guess;
    let mut grow = 0;
    while h(hi)?.0 < 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 2000 || !hi.is_finite() {
            return Err(Error::Numerical(
                "could not bracket quantile from above".into(),
            ));
        }
    }
    if lo == hi {
        loop {
            lo *= 0.5;
            if lo < 1e-300 {
                lo = 0.0;
                break;
            }
            if h(lo)?.0 <= 0.0 {
                break;
            }
            hi = lo;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let (v, d) = h(x)?;
        if v == 0.0 {
            return Ok(x);
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / d;
        let next = if d > 0.0 && d.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * next.abs() || hi - lo <= 4.0 * f64::EPSILON * hi
        {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

impl fmt::Display for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FadingModel::Rayleigh => write!(f, "rayleigh"),
            FadingModel::Rician { k } => write!(f, "rician:K={k}"),
            FadingModel::Nakagami { m } => write!(f, "nakagami:m={m}"),
        }
    }
}

impl FromStr for FadingModel {
    type Err = Error;

    /// Accepts `rayleigh`, `rician:K=<v>` and `nakagami:m=<v>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, param) = match s.split_once(':') {
            Some((fam, rest)) => (fam.trim().to_ascii_lowercase(), Some(rest.trim())),
            None => (s.to_ascii_lowercase(), None),
        };
        let value = |key: &str| -> Result<f64> {
            let param =
                param.ok_or_else(|| Error::Parse(format!("model `{s}` needs `{key}=<value>`")))?;
            let (k, v) = param
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `{key}=<value>` in `{s}`")))?;
            if !k.trim().eq_ignore_ascii_case(key) {
                return Err(Error::Parse(format!(
                    "unknown parameter `{}` in `{s}`",
                    k.trim()
                )));
            }
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{}` in `{s}`", v.trim())))
        };
        match family.as_str() {
            "rayleigh" if param.is_none() => Ok(FadingModel::Rayleigh),
            "rician" => FadingModel::rician(value("K")?),
            "nakagami" => FadingModel::nakagami(value("m")?),
            _ => Err(Error::Parse(format!(
                "unknown gain model `{s}` (expected rayleigh, rician:K=<v> or nakagami:m=<v>)"
            ))),
        }
    }
}

impl Serialize for FadingModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FadingModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
