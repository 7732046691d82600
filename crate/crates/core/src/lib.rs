//! Unit-root testing from sample autocovariances.
//!
//! The null hypothesis is that the series is `I(0)`; the alternative is that
//! it is integrated of some order `d ≥ 1`. Under the null the sample
//! autocovariances converge, under the alternative they diverge like
//! `n^{2d−1}`, so the test rejects for large second-half autocovariances
//! with a critical value calibrated on the first half and truncated at
//! `0.1 log N` when the data look integrated.
//!
//! Estimators are generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case.
//!
//! ```
//! use urtest::{run_test, TestConfig, TimeSeries64};
//!
//! let y: Vec<f64> = (0..200).map(|t| ((t as f64) * 0.9).sin()).collect();
//! let series = TimeSeries64::new(y).unwrap();
//! let outcome = run_test(&series, &TestConfig::default()).unwrap();
//! assert_eq!(outcome.reject, outcome.statistic > outcome.cv);
//! ```

pub mod acvf_test;
pub mod baselines;
mod diagnostics;
mod error;
pub mod harness;
pub mod lrv;
pub mod models;
pub mod rng;
mod scalar;
pub mod series;

pub use acvf_test::{
    c_star, estimate_b, event_t, normal_quantile, ratio_r, run_test, run_test_sweep,
    statistic_tn, tilde_q, CKappa, PreparedTest, TestConfig, TestOutcome,
};
pub use baselines::{kpss_test, KpssBandwidth, KpssResult};
pub use diagnostics::Diagnostic;
pub use error::{Error, Result};
pub use lrv::{long_run_variance, Bandwidth, Kernel, LrvOptions};
pub use models::{model_table, simulate, MaConvention, ModelParams, ModelSpec};
pub use rng::{draw_innovations, InnovationLaw, SeedSpec};
pub use scalar::{CompensatedSum, Scalar};
pub use series::{acvf, acvf_diff, acvf_split, difference, sample_mean, AcvfSet, TimeSeries};

pub type TimeSeries64 = TimeSeries<f64>;
pub type TimeSeries32 = TimeSeries<f32>;
pub type AcvfSet64 = AcvfSet<f64>;
pub type TestOutcome64 = TestOutcome<f64>;
pub type KpssResult64 = KpssResult<f64>;
