//! Independent oracles and invariant checks shared by the property suites
//! and the acceptance run.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use urtest::lrv::{long_run_variance, Kernel, LrvOptions};
use urtest::{
    acvf, acvf_diff, acvf_split, c_star, estimate_b, ratio_r, run_test, tilde_q, AcvfSet, CKappa,
    TestConfig, TimeSeries64,
};

pub type Check = Result<(), TestCaseError>;

pub fn ts(v: &[f64]) -> TimeSeries64 {
    TimeSeries64::new(v.to_vec()).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs()).max(scale)
}

macro_rules! ensure_close {
    ($a:expr, $b:expr, $tol:expr, $scale:expr, $what:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        prop_assert!(
            $crate::common::rel_close(a, b, $tol, $scale),
            "{}: {} vs {} (tol {})",
            $what,
            a,
            b,
            $tol
        );
    }};
}
#[allow(unused_imports)]
pub(crate) use ensure_close;

/// Values in a few magnitudes with enough spread to avoid near-constant series.
pub fn series_strategy(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    (min_len..=max_len)
        .prop_flat_map(|n| proptest::collection::vec(-5.0f64..5.0, n))
        .prop_filter("non-degenerate", |v| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / v.len() as f64;
            let dv: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
            let dm = dv.iter().sum::<f64>() / dv.len() as f64;
            let dvar = dv.iter().map(|x| (x - dm).powi(2)).sum::<f64>() / dv.len() as f64;
            var > 1e-3 && dvar > 1e-3
        })
}

/// Runs `check` on `cases` inputs; `Err` carries the minimal failure.
pub fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    check: impl Fn(S::Value) -> Check,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- oracles

pub fn brute_mean(y: &[f64]) -> f64 {
    y.iter().sum::<f64>() / y.len() as f64
}

/// `Σ_{t=1}^{n−k} (Y_{t+k} − Ȳ)(Y_t − Ȳ)`, 1-based double loop.
pub fn brute_cross(y: &[f64], k: usize, from: usize, to: usize) -> f64 {
    let m = brute_mean(y);
    let mut s = 0.0;
    for t in from..=to {
        s += (y[t + k - 1] - m) * (y[t - 1] - m);
    }
    s
}

pub fn brute_acvf(y: &[f64], k: usize) -> f64 {
    brute_cross(y, k, 1, y.len() - k) / y.len() as f64
}

pub fn brute_split(y: &[f64], k: usize) -> (f64, f64) {
    let n2 = y.len() / 2;
    let g1 = if n2 > k { brute_cross(y, k, 1, n2 - k) } else { 0.0 };
    let g2 = if n2 > k { brute_cross(y, k, n2 + 1, 2 * n2 - k) } else { 0.0 };
    (g1 / n2 as f64, g2 / n2 as f64)
}

pub fn brute_tilde_q(y: &[f64], k0: usize) -> Vec<f64> {
    let n = y.len();
    let big_n = n / 2;
    let mean = brute_mean(y);
    let m = 2 * big_n - k0;
    (1..=m)
        .map(|t| {
            (0..=k0)
                .map(|k| {
                    let g = brute_acvf(y, k);
                    let s = k as f64 + t as f64 - big_n as f64 - 0.5;
                    let sgn = if s > 0.0 { 1.0 } else { -1.0 };
                    let ytk = 2.0 * ((y[t - 1] - mean) * (y[t + k - 1] - mean) - g) * sgn;
                    2.0 * ytk * g
                })
                .sum()
        })
        .collect()
}

/// Closed-form QS kernel, `25/(12π²x²)·[sin(6πx/5)/(6πx/5) − cos(6πx/5)]`.
pub fn qs_closed(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let pi = std::f64::consts::PI;
    let a = 6.0 * pi * x / 5.0;
    25.0 / (12.0 * pi * pi * x * x) * (a.sin() / a - a.cos())
}

pub fn brute_kernel(kernel: Kernel, x: f64) -> f64 {
    let ax = x.abs();
    match kernel {
        Kernel::QuadraticSpectral => qs_closed(x),
        Kernel::Bartlett => (1.0 - ax).max(0.0),
        Kernel::Parzen => {
            if ax <= 0.5 {
                1.0 - 6.0 * ax * ax + 6.0 * ax.powi(3)
            } else if ax <= 1.0 {
                2.0 * (1.0 - ax).powi(3)
            } else {
                0.0
            }
        }
    }
}

/// `Σ_{j=−m+1}^{m−1} K(j/b) G_j` with `G_j` over the demeaned sequence,
/// weights past the last `|K| > 1e-7` set to zero.
pub fn brute_lrv(x: &[f64], kernel: Kernel, b: f64) -> f64 {
    let m = x.len();
    let mean = brute_mean(x);
    let u: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let w: Vec<f64> = (0..m).map(|j| brute_kernel(kernel, j as f64 / b)).collect();
    let last = w.iter().rposition(|v| v.abs() > 1e-7).unwrap_or(0);
    let mut total = 0.0;
    for j in -(m as i64 - 1)..=(m as i64 - 1) {
        let aj = j.unsigned_abs() as usize;
        if aj > last {
            continue;
        }
        let mut g = 0.0;
        if j >= 0 {
            for t in (aj + 1)..=m {
                g += u[t - 1] * u[t - aj - 1];
            }
        } else {
            for t in (aj + 1)..=m {
                g += u[t - aj - 1] * u[t - 1];
            }
        }
        total += w[aj] * g / m as f64;
    }
    total
}

/// `erf` by its Maclaurin series, summed until terms vanish.
pub fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -x2 / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() < 1e-18 * sum.abs() || n > 400.0 {
            break;
        }
    }
    2.0 / std::f64::consts::PI.sqrt() * sum
}

/// Normal quantile by bisection on `Φ(x) = (1 + erf(x/√2))/2`, `|x| ≤ 6`.
pub fn bisect_quantile(p: f64) -> f64 {
    let cdf = |x: f64| 0.5 * (1.0 + erf_series(x / std::f64::consts::SQRT_2));
    let (mut lo, mut hi) = (-6.0, 6.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// ---------------------------------------------------------- invariant checks

/// Estimator invariants on one series.
pub fn check_series(y: &[f64], shift: f64, scale: f64) -> Check {
    let s = ts(y);
    let n = y.len();
    let half = n / 2;
    let g0 = acvf(&s, 0).unwrap();
    prop_assert!(g0 >= 0.0);
    let shifted = s.map(|v| v + shift).unwrap();
    let scaled = s.map(|v| v * scale).unwrap();
    for k in 0..n {
        let g = acvf(&s, k).unwrap();
        ensure_close!(n as f64 * g, brute_cross(y, k, 1, n - k), 1e-10, g0, "divisor");
        prop_assert!(g.abs() <= g0 * (1.0 + 1e-12), "Cauchy-Schwarz at lag {}", k);
        ensure_close!(acvf(&shifted, k).unwrap(), g, 1e-12, g0, "shift acvf");
        ensure_close!(acvf(&scaled, k).unwrap(), scale * scale * g, 1e-12, scale * scale * g0, "scale acvf");
    }
    for k in 0..half {
        let (a, b) = acvf_split(&s, k).unwrap();
        let (ba, bb) = brute_split(y, k);
        ensure_close!(a, ba, 1e-10, g0, "split 1");
        ensure_close!(b, bb, 1e-10, g0, "split 2");
        let (sa, sb) = acvf_split(&shifted, k).unwrap();
        ensure_close!(sa, a, 1e-12, g0, "shift split 1");
        ensure_close!(sb, b, 1e-12, g0, "shift split 2");
        let (ca, cb) = acvf_split(&scaled, k).unwrap();
        ensure_close!(ca, scale * scale * a, 1e-12, scale * scale * g0, "scale split 1");
        ensure_close!(cb, scale * scale * b, 1e-12, scale * scale * g0, "scale split 2");

        // N(γ̂₁ + γ̂₂) + straddle + tail = n γ̂.
        let straddle = brute_cross(y, k, half - k + 1, half);
        let tail = if n - k > 2 * half - k {
            brute_cross(y, k, 2 * half - k + 1, n - k)
        } else {
            0.0
        };
        ensure_close!(
            half as f64 * (a + b) + straddle + tail,
            n as f64 * acvf(&s, k).unwrap(),
            1e-10,
            n as f64 * g0,
            "straddle decomposition"
        );
    }
    let dg0 = acvf_diff(&s, 0).unwrap();
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    for k in 0..(n - 1) {
        let d = acvf_diff(&s, k).unwrap();
        ensure_close!(d, brute_acvf(&dy, k), 1e-10, dg0, "acvf_diff");
        ensure_close!(acvf_diff(&shifted, k).unwrap(), d, 1e-12, dg0, "shift acvf_diff");
        ensure_close!(acvf_diff(&scaled, k).unwrap(), scale * scale * d, 1e-12, scale * scale * dg0, "scale acvf_diff");
    }
    Ok(())
}

/// Long-run variance invariants on one sequence.
pub fn check_lrv(x: &[f64], b: f64, scale: f64) -> Check {
    let g0 = brute_acvf(x, 0);
    for kernel in [Kernel::QuadraticSpectral, Kernel::Bartlett, Kernel::Parzen] {
        let fixed = LrvOptions::fixed(kernel, b);
        let est = long_run_variance(x, &fixed).unwrap();
        ensure_close!(est.raw, brute_lrv(x, kernel, b), 1e-10, g0, "symmetric form");
        let xs: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let es = long_run_variance(&xs, &fixed).unwrap();
        ensure_close!(es.value, scale * scale * est.value, 1e-10, scale * scale * g0, "scale fixed");
        if kernel != Kernel::Parzen {
            prop_assert!(est.raw >= -1e-12 * g0, "negative {:?} estimate {}", kernel, est.raw);
        }
        let tiny = long_run_variance(x, &LrvOptions::fixed(kernel, 1e-6)).unwrap();
        ensure_close!(tiny.value, g0, 1e-12, g0, "bandwidth to zero");

        let auto = LrvOptions {
            kernel,
            ..LrvOptions::default()
        };
        for opts in [auto, auto.with_prewhiten(true)] {
            let a = long_run_variance(x, &opts).unwrap();
            let c = long_run_variance(&xs, &opts).unwrap();
            ensure_close!(c.bandwidth, a.bandwidth, 1e-9, 1.0, "plug-in bandwidth scale-free");
            ensure_close!(c.value, scale * scale * a.value, 1e-9, scale * scale * g0, "scale plug-in");
            prop_assert!(a.value >= 0.0);
        }
    }
    Ok(())
}

/// Test-level invariants on one series.
pub fn check_acvf_test(y: &[f64], k0: usize, shift: f64, scale: f64) -> Check {
    let s = ts(y);
    let n = y.len();
    let half = n / 2;
    let opts = LrvOptions::default();
    let g0 = brute_acvf(y, 0);

    let q = tilde_q(&s, k0).unwrap().values;
    let bq = brute_tilde_q(y, k0);
    prop_assert_eq!(q.len(), 2 * half - k0);
    let qscale = bq.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(g0 * g0);
    for (a, b) in q.iter().zip(&bq) {
        ensure_close!(*a, *b, 1e-10, qscale, "tilde_q oracle");
    }

    let acvfs = AcvfSet::compute(&s, k0).unwrap();
    let tn = urtest::statistic_tn(&acvfs, k0).unwrap();
    let brute_tn: f64 = (0..=k0).map(|k| brute_split(y, k).1.powi(2)).sum();
    ensure_close!(tn, brute_tn, 1e-10, g0 * g0, "T_n oracle");

    let r = ratio_r(&s).unwrap();
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let brute_r = (brute_acvf(y, 0) + brute_acvf(y, 1)) / (brute_acvf(&dy, 0) + brute_acvf(&dy, 1));
    if !r.degenerate {
        ensure_close!(r.value, brute_r, 1e-9, 0.0, "R oracle");
    }

    for ck in [CKappa::Finite(0.45), CKappa::Finite(0.55), CKappa::Untruncated] {
        let cfg = TestConfig::default().with_k0(k0).with_c_kappa(ck);
        let Ok(base) = run_test(&s, &cfg) else {
            continue;
        };
        // Decision consistency.
        prop_assert_eq!(base.reject, base.statistic > base.cv);
        if base.event_t {
            prop_assert_eq!(base.cv, base.cv_naive);
        } else {
            prop_assert_eq!(base.cv, base.kappa_n);
        }
        prop_assert!((base.kappa_n - 0.1 * (half as f64).ln()).abs() <= 1e-15);
        if ck.is_untruncated() {
            prop_assert!(base.event_t);
        }

        // Location invariance.
        let sh = run_test(&s.map(|v| v + shift).unwrap(), &cfg).unwrap();
        ensure_close!(sh.statistic, base.statistic, 1e-10, g0 * g0, "shift T_n");
        ensure_close!(sh.b_hat, base.b_hat, 1e-10, 0.0, "shift B");
        if !r.degenerate {
            ensure_close!(sh.ratio, base.ratio, 1e-10, 0.0, "shift R");
        }
        if let (Some(a), Some(b)) = (sh.c_star, base.c_star) {
            ensure_close!(a, b, 1e-10, 0.0, "shift C*");
        }
        if !near_tie(&base) {
            prop_assert_eq!(sh.reject, base.reject);
            prop_assert_eq!(sh.event_t, base.event_t);
        }

        // Scale behaviour.
        let sc = run_test(&s.map(|v| v * scale).unwrap(), &cfg).unwrap();
        let c4 = scale.powi(4);
        ensure_close!(sc.statistic, c4 * base.statistic, 1e-10, c4 * g0 * g0, "scale T_n");
        ensure_close!(sc.b_hat, c4 * base.b_hat, 1e-9, 0.0, "scale B");
        if !r.degenerate {
            ensure_close!(sc.ratio, base.ratio, 1e-10, 0.0, "scale R");
        }
        for (a, b) in [(sc.c_star, base.c_star), (sc.lambda_hat, base.lambda_hat), (sc.rho_hat, base.rho_hat)] {
            if let (Some(a), Some(b)) = (a, b) {
                ensure_close!(a, b, 1e-9, 0.0, "scale-free quantity");
            }
        }
        if !near_event_tie(&base) {
            prop_assert_eq!(sc.event_t, base.event_t);
        }

        // Monotonicity in φ.
        let mut prev_cv = f64::INFINITY;
        let mut prev_reject = false;
        for phi in [0.01, 0.025, 0.05, 0.1, 0.2] {
            let o = run_test(&s, &cfg.with_phi(phi)).unwrap();
            prop_assert_eq!(o.event_t, base.event_t);
            prop_assert!(o.cv_naive <= prev_cv);
            prop_assert!(o.reject || !prev_reject, "rejection not monotone in phi");
            prev_cv = o.cv_naive;
            prev_reject = o.reject;
        }
    }

    // C* is linear in c_κ.
    if let (Ok(a), Ok(b)) = (
        c_star(&s, CKappa::Finite(0.45), &opts),
        c_star(&s, CKappa::Finite(0.65), &opts),
    ) {
        if !a.degenerate && !b.degenerate {
            ensure_close!(a.value / b.value, 0.45 / 0.65, 1e-12, 0.0, "C* linear");
        }
    }
    // B̂ is homogeneous of degree 4.
    if let Ok(b1) = estimate_b(&s, k0, &opts) {
        let b2 = estimate_b(&s.map(|v| v * scale).unwrap(), k0, &opts).unwrap();
        ensure_close!(b2.b_hat, scale.powi(4) * b1.b_hat, 1e-9, 0.0, "B degree 4");
    }
    Ok(())
}

fn near_tie(o: &urtest::TestOutcome64) -> bool {
    (o.statistic - o.cv).abs() <= 1e-8 * o.statistic.abs().max(o.cv.abs()).max(1e-300) || near_event_tie(o)
}

fn near_event_tie(o: &urtest::TestOutcome64) -> bool {
    match o.threshold {
        Some(t) => (o.ratio - t).abs() <= 1e-8 * t.abs(),
        None => false,
    }
}
