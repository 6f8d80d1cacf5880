//! Special functions backing the gain distributions: log-gamma, the
//! regularized incomplete gamma pair and the modified Bessel function I₀.

use crate::error::{Error, Result};

const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Lanczos coefficients (g = 7, n = 9).
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = x + 7.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Γ(x) for x > 0. Integers and half-integers up to 170 go through the
/// factorial recurrences, so they are correctly rounded or close to it.
pub fn gamma(x: f64) -> f64 {
    if x <= 170.0 && x.fract() == 0.0 {
        return (1..x as u32).fold(1.0, |acc, i| acc * i as f64);
    }
    if x <= 170.0 && (x - 0.5).fract() == 0.0 {
        // Γ(j + 1/2) = √π · (1/2)(3/2)…(j − 1/2)
        let j = (x - 0.5) as u32;
        return (0..j).fold(std::f64::consts::PI.sqrt(), |acc, i| acc * (i as f64 + 0.5));
    }
    ln_gamma(x).exp()
}

/// Regularized lower incomplete gamma P(a, x).
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    gamma_pq(a, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x), computed
/// without cancellation in the upper tail.
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    gamma_pq(a, x).map(|(_, q)| q)
}

/// Both halves of the regularized incomplete gamma function. The series is
/// used below `x = a + 1` and the Lentz continued fraction above it.
pub fn gamma_pq(a: f64, x: f64) -> Result<(f64, f64)> {
    if a.is_nan() || x.is_nan() || a <= 0.0 || x < 0.0 {
        return Err(Error::Domain(format!(
            "incomplete gamma needs a > 0 and x >= 0, got a={a}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                let p = (log_prefactor + sum.ln()).exp();
                return Ok((p, 1.0 - p));
            }
        }
        Err(Error::Numerical(format!(
            "gamma series did not converge (a={a}, x={x})"
        )))
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                let q = (log_prefactor + h.ln()).exp();
                return Ok((1.0 - q, q));
            }
        }
        Err(Error::Numerical(format!(
            "gamma continued fraction did not converge (a={a}, x={x})"
        )))
    }
}

/// Below this argument I₀ is summed from its power series; above it the
/// large-argument expansion is used.
pub const BESSEL_SERIES_LIMIT: f64 = 15.0;

/// Exponentially scaled modified Bessel function e^{-z}·I₀(z), z ≥ 0.
pub fn bessel_i0e(z: f64) -> f64 {
    let z = z.abs();
    if z < BESSEL_SERIES_LIMIT {
        i0e_series(z)
    } else {
        i0e_asymptotic(z)
    }
}

fn i0e_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * k);
        sum += term;
        if term < sum * EPS {
            break;
        }
    }
    sum * (-z).exp()
}

// e^z/√(2πz) · Σ ((2k−1)!!)² / (k! (8z)^k), truncated at its smallest term
fn i0e_asymptotic(z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * z);
        if next > term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * EPS {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt()
}

/// Modified Bessel function I₀(z).
pub fn bessel_i0(z: f64) -> f64 {
    bessel_i0e(z) * z.abs().exp()
}

/// ln I₀(z), finite for every finite z.
pub fn ln_bessel_i0(z: f64) -> f64 {
    bessel_i0e(z).ln() + z.abs()
}
