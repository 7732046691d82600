//! Comparison tests run alongside the autocovariance test.

mod kpss;

pub use kpss::{
    kpss_critical_value, kpss_statistic, kpss_test, KpssBandwidth, KpssResult,
    LEVEL_CRITICAL_VALUES,
};
