//! Independent numeric oracles shared by the integration tests. None of
//! these call into the crate under test.
#![allow(dead_code)]

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        go(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + go(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    go(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 50)
}

/// `I₀(z)` by its power series, summed until terms vanish.
pub fn bessel_i0_series(z: f64) -> f64 {
    let q = z * z / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > sum * 1e-18 {
        term *= q / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

/// Rician power-gain density `(1+K)e^{−K}e^{−(1+K)g} I₀(2√(K(1+K)g))`.
pub fn rician_pdf(k: f64, g: f64) -> f64 {
    (1.0 + k)
        * (-k).exp()
        * (-(1.0 + k) * g).exp()
        * bessel_i0_series(2.0 * (k * (1.0 + k) * g).sqrt())
}

/// Nakagami-m power-gain density `m^m g^{m−1} e^{−mg} / Γ(m)`.
pub fn nakagami_pdf(m: f64, g: f64) -> f64 {
    (m * m.ln() + (m - 1.0) * g.ln() - m * g - statrs::function::gamma::ln_gamma(m)).exp()
}

/// Root of an increasing `f` on `[lo, hi]` by bisection.
pub fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    assert!(f(lo) <= 0.0 && f(hi) >= 0.0, "root not bracketed");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `E[sum of the k smallest of n unit exponentials]`, from the Rényi
/// representation `E[X_{i:n}] = Σ_{l=1}^{i} 1/(n−l+1)`.
pub fn renyi_lower_sum(n: u64, k: u64) -> f64 {
    let mut mean_order = 0.0;
    let mut total = 0.0;
    for i in 1..=k {
        mean_order += 1.0 / (n - i + 1) as f64;
        total += mean_order;
    }
    total
}

/// `H_n`, the mean of the largest of `n` unit exponentials.
pub fn harmonic(n: u64) -> f64 {
    (1..=n).rev().map(|j| 1.0 / j as f64).sum()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
