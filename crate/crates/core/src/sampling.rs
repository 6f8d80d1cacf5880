//! Exact samplers for the few statistics of a large network that its
//! sum-rates depend on.
//!
//! With `k = n^α` secondary users a realization quickly outgrows memory
//! (`α = 3`, `n = 10⁵` gives `10¹⁵` users), yet each rate only reads a sum,
//! a maximum, or the sum of the lowest few gains of some vector. Each of
//! those has a law that can be sampled directly:
//!
//! * a sum of `m` i.i.d. gains through the gamma/Poisson-gamma form of the
//!   gain law ([`FadingModel::sample_sum`]);
//! * a maximum of `N` through `F⁻¹(U^{1/N})` ([`FadingModel::sample_max`]);
//! * the lowest `m` of `N` by materializing when `N` is small, otherwise by
//!   drawing the `(m+1)`-th smallest uniform `U ~ Beta(m+1, N−m)` and using
//!   that, given `X_{m+1:N} = t`, the `m` lower values are i.i.d. from `F`
//!   truncated to `[0, t]`.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{domain, Result};
use crate::gain::FadingModel;
use crate::order_stats::sum_lowest;

/// Vectors up to this length are drawn in full.
pub const MATERIALIZE_LIMIT: u64 = 1 << 21;

/// Above this many truncated draws their sum is drawn from its normal
/// approximation with exact truncated mean and variance.
pub const CLT_LIMIT: u64 = 1 << 16;

/// Sum of the `m` smallest of `total` i.i.d. gains.
pub fn sample_lowest_sum<R: Rng + ?Sized>(
    model: &FadingModel,
    rng: &mut R,
    m: u64,
    total: u64,
) -> Result<f64> {
    if m > total {
        return Err(domain(format!(
            "cannot take the {m} lowest of {total} gains"
        )));
    }
    if m == 0 {
        return Ok(0.0);
    }
    if m == total {
        return Ok(model.sample_sum(rng, total));
    }
    if total <= MATERIALIZE_LIMIT {
        let mut draws = model.sample(rng, total as usize);
        return Ok(sum_lowest(&mut draws, m as usize));
    }
    let x: f64 = Gamma::new((m + 1) as f64, 1.0)
        .expect("positive shape")
        .sample(rng);
    let y: f64 = Gamma::new((total - m) as f64, 1.0)
        .expect("positive shape")
        .sample(rng);
    let level = x / (x + y);
    let t = model.quantile(level)?;
    let mass = model.cdf(t)?;
    if m <= CLT_LIMIT {
        let mut sum = 0.0;
        for _ in 0..m {
            let v: f64 = 1.0 - rng.random::<f64>();
            sum += model.quantile(mass * v)?;
        }
        return Ok(sum);
    }
    let pm = model.partial_moments(t)?;
    let mean = pm.first / pm.mass;
    let var = (pm.second / pm.mass - mean * mean).max(0.0);
    let z: f64 = StandardNormal.sample(rng);
    let mf = m as f64;
    Ok((mf * mean + (mf * var).sqrt() * z).clamp(0.0, mf * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    #[test]
    fn lowest_sum_edge_counts() {
        let mut rng = StreamKey::new(1).rng(0);
        let m = FadingModel::Rayleigh;
        assert_eq!(sample_lowest_sum(&m, &mut rng, 0, 10).unwrap(), 0.0);
        assert!(sample_lowest_sum(&m, &mut rng, 11, 10).is_err());
        assert!(sample_lowest_sum(&m, &mut rng, 10, 10).unwrap() > 0.0);
    }

    #[test]
    fn huge_pool_lowest_sum_matches_concentration() {
        // lowest 10^6 of 10^12 unit exponentials: mean ≈ m²/(2N) = 0.5
        let mut rng = StreamKey::new(2).rng(0);
        let m = FadingModel::Rayleigh;
        let trials = 200;
        let mean: f64 = (0..trials)
            .map(|_| sample_lowest_sum(&m, &mut rng, 1_000_000, 1_000_000_000_000).unwrap())
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }
}
