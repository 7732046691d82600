use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use urtest::baselines::{kpss_statistic, LEVEL_CRITICAL_VALUES};
use urtest::TimeSeries64;

mod common;
use common::{rel_close, series_strategy};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn statistic_invariants(
        y in series_strategy(8, 60),
        lags in 0usize..6,
        shift in -50.0f64..50.0,
        scale in prop_oneof![0.01f64..0.5, 0.5f64..3.0, -3.0f64..-0.5],
    ) {
        let s = TimeSeries64::new(y.clone()).unwrap();
        let base = kpss_statistic(&s, lags).unwrap();
        prop_assert!(base > 0.0);

        let moved: Vec<f64> = y.iter().map(|v| scale * v + shift).collect();
        let moved = kpss_statistic(&TimeSeries64::new(moved).unwrap(), lags).unwrap();
        prop_assert!(rel_close(base, moved, 1e-9, 0.0), "affine: {} vs {}", base, moved);

        let rev = kpss_statistic(&s.reversed(), lags).unwrap();
        prop_assert!(rel_close(base, rev, 1e-9, 0.0), "reversal: {} vs {}", base, rev);
    }
}

/// Upper quantiles of `∫₀¹ V(t)² dt` for a Brownian bridge `V`, from a
/// Riemann sum over a random-walk bridge.
fn bridge_quantiles(paths: usize, steps: usize, levels: &[f64]) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut draws = Vec::with_capacity(paths);
    let mut incr = vec![0.0f64; steps];
    let h = 1.0 / steps as f64;
    for _ in 0..paths {
        let mut total = 0.0;
        for e in incr.iter_mut() {
            *e = StandardNormal.sample(&mut rng);
            total += *e;
        }
        let mean = total / steps as f64;
        let mut w = 0.0;
        let mut acc = 0.0;
        for &e in &incr {
            w += e - mean;
            acc += w * w;
        }
        draws.push(acc * h * h);
    }
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels
        .iter()
        .map(|&p| draws[((1.0 - p) * paths as f64) as usize])
        .collect()
}

#[test]
fn critical_values_match_brownian_bridge_quantiles() {
    let levels: Vec<f64> = LEVEL_CRITICAL_VALUES.iter().map(|&(p, _)| p).collect();
    let q = bridge_quantiles(400_000, 256, &levels);
    for (&(p, cv), &sim) in LEVEL_CRITICAL_VALUES.iter().zip(&q) {
        assert!((sim - cv).abs() <= 0.02 * cv, "level {p}: table {cv}, simulated {sim}");
    }
}
