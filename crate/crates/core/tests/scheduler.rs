use coexist_core::rates::{primary_alone, sim_rates};
use coexist_core::scheduler::{
    activation_count, joint_opt_bruteforce, least_interference_set, optimal_exponents, schedule,
    schedule_with_counts, threshold_set, threshold_value,
};
use coexist_core::{
    ActivationExponents, Activity, CoexistenceLevel, Error, FadingModel, NetworkInstance, Scenario,
    Strategy, StreamKey, SystemParams, Verdict,
};
use proptest::prelude::*;

const LI: Strategy = Strategy::LeastInterference;

fn instance(n: u64, k: u64, seed: u64) -> NetworkInstance {
    let p = SystemParams::with_users(n, k, 10.0, 1.0, FadingModel::rayleigh()).unwrap();
    NetworkInstance::generate(&p, StreamKey::new(seed)).unwrap()
}

fn uplink_set(a: &Activity) -> Vec<usize> {
    match a {
        Activity::Uplink { active, .. } => active.clone(),
        Activity::Downlink { .. } => panic!("expected uplink"),
    }
}

/// All `k`-subsets of `0..n` as sorted index lists.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn rate(p: f64, n0: f64, s: f64, i: f64) -> f64 {
    (1.0 + p * s / (n0 + p * i)).log2()
}

#[test]
fn least_interference_examples() {
    assert_eq!(
        least_interference_set(&[0.5, 0.1, 0.9, 0.3], 2).unwrap(),
        vec![1, 3]
    );
    assert!(least_interference_set(&[0.5, 0.1], 0).unwrap().is_empty());
    assert!(matches!(
        least_interference_set(&[0.5], 2),
        Err(Error::Domain(_))
    ));
    // ties go to the lower index
    assert_eq!(
        least_interference_set(&[0.2, 0.1, 0.1, 0.1], 2).unwrap(),
        vec![1, 2]
    );
}

#[test]
fn selected_gains_sit_at_the_right_quantile() {
    let model = FadingModel::rayleigh();
    let (lo, hi) = (
        model.quantile(0.005).unwrap(),
        model.quantile(0.03).unwrap(),
    );
    let mut inside = 0;
    for seed in 0..100 {
        let gains = model.sample(&mut StreamKey::new(seed).rng(0), 10_000);
        let set = least_interference_set(&gains, 100).unwrap();
        let top = set.iter().map(|&i| gains[i]).fold(0.0, f64::max);
        inside += usize::from((lo..=hi).contains(&top));
    }
    assert!(inside >= 99, "{inside}");
}

#[test]
fn threshold_examples() {
    let ray = FadingModel::rayleigh();
    assert!((threshold_value(&ray, 1, 1).unwrap() - 2f64.ln()).abs() < 1e-15);
    let t = threshold_value(&ray, 100, 10_000).unwrap();
    assert!((t - -(-100.0f64 / 10_001.0).ln_1p()).abs() < 1e-15);
    assert!((t - 0.010049).abs() < 1e-6);
    assert!(threshold_value(&ray, 0, 5).is_err());
    assert!(threshold_value(&ray, 6, 5).is_err());
    let sizes: Vec<f64> = (0..200)
        .map(|seed| {
            let gains = ray.sample(&mut StreamKey::new(seed).rng(1), 10_000);
            threshold_set(&gains, t).len() as f64
        })
        .collect();
    let mean = sizes.iter().sum::<f64>() / sizes.len() as f64;
    let want = 10_000.0 * 100.0 / 10_001.0;
    assert!((mean - want).abs() / want < 0.05, "{mean}");
}

#[test]
fn threshold_and_least_interference_agree() {
    let ray = FadingModel::rayleigh();
    let mut checked = 0;
    for seed in 0..1000 {
        let gains = ray.sample(&mut StreamKey::new(seed).rng(2), 200);
        let count = 20;
        let t = threshold_value(&ray, count as u64, 200).unwrap();
        let mut sorted = gains.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted[count - 1] < t && sorted[count] > t {
            assert_eq!(
                threshold_set(&gains, t),
                least_interference_set(&gains, count).unwrap()
            );
            checked += 1;
        }
    }
    assert!(checked > 50, "{checked}");
}

#[test]
fn schedule_counts_per_level() {
    let p = SystemParams::new(20, 1.5, 10.0, 1.0, FadingModel::rayleigh()).unwrap();
    let inst = NetworkInstance::generate(&p, StreamKey::new(4)).unwrap();
    let e = ActivationExponents::new(0.75, 0.5).unwrap();
    let pure = schedule(
        &inst,
        Scenario::UU,
        CoexistenceLevel::PureInterference,
        LI,
        e,
    )
    .unwrap();
    assert_eq!(pure.primary.active_count(), 20);
    assert_eq!(pure.secondary.active_count(), p.k() as usize);
    assert_eq!(pure.primary.threshold(), None);
    let asym = schedule(&inst, Scenario::UU, CoexistenceLevel::Asymmetric, LI, e).unwrap();
    assert_eq!(asym.primary.active_count(), 20);
    assert_eq!(
        asym.secondary.active_count(),
        20f64.powf(0.75).round() as usize
    );
    assert!(asym.secondary.threshold().is_some());
    let sym = schedule(&inst, Scenario::UU, CoexistenceLevel::Symmetric, LI, e).unwrap();
    assert_eq!(sym.primary.active_count(), 20f64.powf(0.5).round() as usize);
    let dd = schedule(
        &inst,
        Scenario::DD,
        CoexistenceLevel::PureInterference,
        LI,
        e,
    )
    .unwrap();
    assert!(matches!(dd.primary, Activity::Downlink { .. }));
    assert!(matches!(
        schedule(&inst, Scenario::DU, CoexistenceLevel::Symmetric, LI, e),
        Err(Error::Contract(_))
    ));
    let silent = ActivationExponents::new(0.0, 1.0).unwrap();
    let d = schedule(
        &inst,
        Scenario::UU,
        CoexistenceLevel::Asymmetric,
        LI,
        silent,
    )
    .unwrap();
    assert_eq!(d.secondary.active_count(), 0);
    assert_eq!(activation_count(100, 0.5, 5), 5);
}

#[test]
fn symmetric_sets_minimize_cross_interference() {
    for seed in 0..20 {
        let inst = instance(6, 6, seed);
        let d = schedule_with_counts(&inst, Scenario::UU, CoexistenceLevel::Symmetric, LI, (3, 2))
            .unwrap();
        let best = |gains: &[f64], k: usize| {
            subsets(gains.len(), k)
                .into_iter()
                .min_by(|a, b| {
                    let sa: f64 = a.iter().map(|&i| gains[i]).sum();
                    let sb: f64 = b.iter().map(|&i| gains[i]).sum();
                    sa.total_cmp(&sb)
                })
                .unwrap()
        };
        assert_eq!(uplink_set(&d.primary), best(&inst.g_ps, 3));
        assert_eq!(uplink_set(&d.secondary), best(&inst.g_sp, 2));
    }
}

/// Independent exhaustive oracle over index lists, returning the best
/// secondary rate among feasible pairs, or `None` if none is feasible.
fn oracle_best(inst: &NetworkInstance, f: f64, cp: usize, cs: usize) -> Option<f64> {
    let (p, n0) = (inst.power, inst.noise);
    let required = f * rate(p, n0, inst.g_p.iter().sum(), 0.0);
    let mut best: Option<f64> = None;
    for a in subsets(inst.n(), cp) {
        for b in subsets(inst.k(), cs) {
            let sum = |g: &[f64], set: &[usize]| set.iter().map(|&i| g[i]).sum::<f64>();
            let rp = rate(p, n0, sum(&inst.g_p, &a), sum(&inst.g_sp, &b));
            let rs = rate(p, n0, sum(&inst.g_s, &b), sum(&inst.g_ps, &a));
            if rp >= required && best.is_none_or(|x| rs > x) {
                best = Some(rs);
            }
        }
    }
    best
}

#[test]
fn joint_optimum_matches_independent_enumeration() {
    for seed in 0..30 {
        let inst = instance(7, 6, seed);
        for f in [0.0, 0.3, 0.6, 0.9] {
            let d =
                joint_opt_bruteforce(&inst, Scenario::UU, CoexistenceLevel::Symmetric, f, (3, 2))
                    .unwrap();
            let got = sim_rates(&inst, &d, Scenario::UU).unwrap();
            match oracle_best(&inst, f, 3, 2) {
                Some(want) => {
                    assert_eq!(d.oracle, Some(Verdict::Feasible));
                    assert!((got.secondary - want).abs() < 1e-12, "seed={seed} f={f}");
                }
                None => {
                    assert_eq!(d.oracle, Some(Verdict::Infeasible));
                    assert!(
                        got.primary
                            < f * primary_alone(&inst, coexist_core::LinkMode::Uplink).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn joint_optimum_trivial_cases() {
    let inst = instance(1, 1, 3);
    let d = joint_opt_bruteforce(
        &inst,
        Scenario::UU,
        CoexistenceLevel::Symmetric,
        0.0,
        (1, 1),
    )
    .unwrap();
    assert_eq!(
        (uplink_set(&d.primary), uplink_set(&d.secondary)),
        (vec![0], vec![0])
    );
    let inst = instance(8, 8, 4);
    let full = joint_opt_bruteforce(
        &inst,
        Scenario::UU,
        CoexistenceLevel::Symmetric,
        0.5,
        (8, 8),
    )
    .unwrap();
    let pure = schedule_with_counts(
        &inst,
        Scenario::UU,
        CoexistenceLevel::PureInterference,
        LI,
        (8, 8),
    )
    .unwrap();
    assert_eq!(uplink_set(&full.primary), uplink_set(&pure.primary));
    assert_eq!(uplink_set(&full.secondary), uplink_set(&pure.secondary));
    let big = instance(15, 4, 1);
    assert!(matches!(
        joint_opt_bruteforce(&big, Scenario::UU, CoexistenceLevel::Symmetric, 0.5, (3, 2)),
        Err(Error::Refused(_))
    ));
    assert!(joint_opt_bruteforce(
        &inst,
        Scenario::UU,
        CoexistenceLevel::Symmetric,
        1.5,
        (3, 2)
    )
    .is_err());
}

#[test]
fn joint_optimum_beats_least_interference_at_equal_feasibility() {
    for seed in 0..50 {
        let inst = instance(8, 8, 100 + seed);
        let li = schedule_with_counts(&inst, Scenario::UU, CoexistenceLevel::Symmetric, LI, (3, 3))
            .unwrap();
        let jo = joint_opt_bruteforce(
            &inst,
            Scenario::UU,
            CoexistenceLevel::Symmetric,
            0.5,
            (3, 3),
        )
        .unwrap();
        let (l, j) = (
            sim_rates(&inst, &li, Scenario::UU).unwrap(),
            sim_rates(&inst, &jo, Scenario::UU).unwrap(),
        );
        let required = 0.5 * primary_alone(&inst, coexist_core::LinkMode::Uplink).unwrap();
        if l.primary >= required {
            assert!(l.secondary <= j.secondary + 1e-12);
        }
    }
}

#[test]
fn optimal_exponent_examples() {
    let e = optimal_exponents(Scenario::UU, CoexistenceLevel::Asymmetric, 1.0, 4.0, 1.0).unwrap();
    assert!((e.alpha_bar - 2.0).abs() < 1e-15 && e.beta == 1.0);
    for f in [0.1, 0.5, 1.0] {
        let e = optimal_exponents(Scenario::DU, CoexistenceLevel::Asymmetric, f, 3.0, 1.0).unwrap();
        assert_eq!(e.alpha_bar, 1.5);
    }
    let e = optimal_exponents(Scenario::UD, CoexistenceLevel::Symmetric, 0.5, 3.0, 1.0).unwrap();
    assert_eq!(e.beta, 0.5);
    let e = optimal_exponents(Scenario::UU, CoexistenceLevel::Symmetric, 0.25, 4.0, 1.0).unwrap();
    assert_eq!(e.beta, 0.5);
    assert!((e.alpha_bar - (0.25 + 4.0) / 2.0).abs() < 1e-15);
    let e = optimal_exponents(Scenario::UU, CoexistenceLevel::Symmetric, 0.75, 4.0, 1.0).unwrap();
    assert_eq!((e.alpha_bar, e.beta), (2.0, 0.75));
    assert!(optimal_exponents(Scenario::UU, CoexistenceLevel::Symmetric, 0.0, 4.0, 1.0).is_err());
    assert!(optimal_exponents(Scenario::UU, CoexistenceLevel::Symmetric, 0.5, -1.0, 1.0).is_err());
    assert!(optimal_exponents(Scenario::DD, CoexistenceLevel::Symmetric, 0.5, 1.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn scheduling_ignores_common_rescaling(seed in any::<u64>(), scale in 1e-3f64..1e3, cp in 0usize..=9, cs in 0usize..=9) {
        let inst = instance(9, 9, seed);
        let mut scaled = inst.clone();
        scaled.g_ps.iter_mut().chain(scaled.g_sp.iter_mut()).for_each(|g| *g *= scale);
        let a = schedule_with_counts(&inst, Scenario::UU, CoexistenceLevel::Symmetric, LI, (cp, cs)).unwrap();
        let b = schedule_with_counts(&scaled, Scenario::UU, CoexistenceLevel::Symmetric, LI, (cp, cs)).unwrap();
        prop_assert_eq!(uplink_set(&a.primary), uplink_set(&b.primary));
        prop_assert_eq!(uplink_set(&a.secondary), uplink_set(&b.secondary));
    }

    #[test]
    fn selected_sets_have_requested_sizes(seed in any::<u64>(), ab in 0.0f64..1.5, beta in 0.0f64..=1.0) {
        let p = SystemParams::new(30, 1.5, 10.0, 1.0, FadingModel::rayleigh()).unwrap();
        let inst = NetworkInstance::generate(&p, StreamKey::new(seed)).unwrap();
        let e = ActivationExponents::new(ab, beta).unwrap();
        let d = schedule(&inst, Scenario::UU, CoexistenceLevel::Symmetric, LI, e).unwrap();
        prop_assert_eq!(d.primary.active_count(), activation_count(30, beta, 30));
        prop_assert_eq!(d.secondary.active_count(), activation_count(30, ab, p.k() as usize));
        let set = uplink_set(&d.secondary);
        prop_assert!(set.windows(2).all(|w| w[0] < w[1]));
    }
}
