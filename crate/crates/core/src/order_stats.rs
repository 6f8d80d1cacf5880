//! Concentration values for extreme order statistics and the exact
//! exponential oracle used to check them.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{domain, Result};
use crate::gain::{FadingModel, LowGainParams, TailParams};

/// Deterministic sequence `a_n` that a random sequence is claimed to
/// concentrate around.
#[derive(Clone)]
pub struct ConcentrationSequence {
    pub description: String,
    eval: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
}

impl ConcentrationSequence {
    pub fn new(
        description: impl Into<String>,
        eval: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ConcentrationSequence {
            description: description.into(),
            eval: Arc::new(eval),
        }
    }

    /// `(ln n)/c`, the concentration value of the maximum of `n` gains.
    pub fn maximum(tail: TailParams) -> Self {
        ConcentrationSequence::new(format!("ln(n)/{}", tail.c), move |n| {
            (n as f64).ln() / tail.c
        })
    }

    /// Concentration value of the sum of the `⌈n^e⌉` lowest of `n` gains.
    pub fn lower_sum(low: LowGainParams, exponent: f64) -> Self {
        ConcentrationSequence::new(format!("lowest ceil(n^{exponent}) sum"), move |n| {
            let k = ceil_power(n, exponent).clamp(1, n.max(1));
            lower_sum_value(low, n as f64, k as f64)
        })
    }

    pub fn at(&self, n: u64) -> f64 {
        (self.eval)(n)
    }
}

impl fmt::Debug for ConcentrationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConcentrationSequence")
            .field("description", &self.description)
            .finish()
    }
}

/// `(ln n)/c` for `n ≥ 2`.
pub fn max_concentration(tail: TailParams, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!(
            "maximum concentration needs n >= 2, got {n}"
        )));
    }
    Ok((n as f64).ln() / tail.c)
}

/// `n (f/n)^{1+1/γ} / (λ^{1/γ} (1+1/γ))`.
pub fn lower_sum_concentration(low: LowGainParams, n: u64, f_of_n: u64) -> Result<f64> {
    if f_of_n < 1 || f_of_n > n {
        return Err(domain(format!(
            "need 1 <= f(n) <= n, got f(n)={f_of_n}, n={n}"
        )));
    }
    Ok(lower_sum_value(low, n as f64, f_of_n as f64))
}

pub(crate) fn lower_sum_value(low: LowGainParams, n: f64, k: f64) -> f64 {
    let inv = 1.0 / low.gamma;
    n * (k / n).powf(1.0 + inv) / (low.lambda.powf(inv) * (1.0 + inv))
}

/// Exact `E[Σ_{i≤k} X_{i:n}]` for unit exponentials:
/// `Σ_{i=1}^{k} Σ_{j=n−i+1}^{n} 1/j`, regrouped as `Σ_j (k−n+j)/j`.
pub fn exact_exponential_lower_sum(n: u64, k: u64) -> Result<f64> {
    if k < 1 || k > n {
        return Err(domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    // largest j contributes least relative error when added last
    let mut total = 0.0;
    for j in (n - k + 1)..=n {
        total += (k + j - n) as f64 / j as f64;
    }
    Ok(total)
}

/// Sum of the `k` smallest entries, reordering `values` in place.
pub fn sum_lowest(values: &mut [f64], k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if k < values.len() {
        values.select_nth_unstable_by(k - 1, f64::total_cmp);
    }
    values[..k].iter().sum()
}

/// Draws `n` gains and sums the `k` smallest.
pub fn empirical_lower_sum<R: Rng + ?Sized>(
    model: &FadingModel,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<f64> {
    if k < 1 || k > n {
        return Err(domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let mut draws = model.sample(rng, n);
    Ok(sum_lowest(&mut draws, k))
}

/// Leading term `(y/λ)^{1/γ}` of the inverse of `λ g^γ + O(g^{γ+1})`.
pub fn inverse_low_gain_expansion(low: LowGainParams, y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 0.1) {
        return Err(domain(format!(
            "expansion point must lie in (0, 0.1), got {y}"
        )));
    }
    Ok((y / low.lambda).powf(1.0 / low.gamma))
}

/// `⌈n^e⌉`, treating values within rounding noise of an integer as that
/// integer so that e.g. `⌈(10⁴)^{0.5}⌉ = 100`.
pub fn ceil_power(n: u64, exponent: f64) -> u64 {
    let v = (n as f64).powf(exponent);
    let r = v.round();
    if (v - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        v.ceil() as u64
    }
}

/// `round(n^e)`, the number of users activated by an exponent.
pub fn round_power(n: u64, exponent: f64) -> u64 {
    (n as f64).powf(exponent).round() as u64
}
