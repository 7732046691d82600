use crate::error::{Error, Result};
use crate::lrv::{long_run_variance, Kernel, LrvOptions};
use crate::scalar::{CompensatedSum, Scalar};
use crate::series::{deviations, TimeSeries};

/// Upper quantiles of `∫₀¹ V₀(t)² dt`, `V₀` a Brownian bridge, at the levels
/// the level-stationarity KPSS test is usually run at.
pub const LEVEL_CRITICAL_VALUES: [(f64, f64); 4] =
    [(0.10, 0.347), (0.05, 0.463), (0.025, 0.574), (0.01, 0.739)];

/// Lag truncation for the Bartlett long-run variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KpssBandwidth {
    /// `⌊4 (n/100)^{1/4}⌋`.
    #[default]
    Short,
    /// `⌊12 (n/100)^{1/4}⌋`.
    Long,
    Fixed(usize),
}

impl KpssBandwidth {
    pub fn lags(self, n: usize) -> usize {
        let base = (n as f64 / 100.0).powf(0.25);
        match self {
            KpssBandwidth::Short => (4.0 * base).floor() as usize,
            KpssBandwidth::Long => (12.0 * base).floor() as usize,
            KpssBandwidth::Fixed(l) => l,
        }
    }

    pub fn label(self) -> String {
        match self {
            KpssBandwidth::Short => "l4".into(),
            KpssBandwidth::Long => "l12".into(),
            KpssBandwidth::Fixed(l) => format!("fixed{l}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KpssResult<T> {
    pub statistic: T,
    /// Number of Bartlett lags.
    pub bandwidth_used: usize,
    pub critical_value: f64,
    pub reject: bool,
}

/// Critical value for `phi` from [`LEVEL_CRITICAL_VALUES`].
pub fn kpss_critical_value(phi: f64) -> Result<f64> {
    LEVEL_CRITICAL_VALUES
        .iter()
        .find(|(level, _)| (level - phi).abs() < 1e-12)
        .map(|&(_, cv)| cv)
        .ok_or_else(|| {
            Error::Input(format!(
                "KPSS critical values are tabulated for levels 0.10, 0.05, 0.025, 0.01; got {phi}"
            ))
        })
}

/// Level-stationarity KPSS test: `η = n⁻² Σ S_t² / σ̂²` with `S_t` partial
/// sums of the demeaned series and `σ̂²` a Bartlett long-run variance with
/// weights `1 − j/(l+1)`.
pub fn kpss_test<T: Scalar>(
    series: &TimeSeries<T>,
    phi: f64,
    bandwidth: KpssBandwidth,
) -> Result<KpssResult<T>> {
    let n = series.len();
    if n < 8 {
        return Err(Error::TooShort { needed: 8, got: n });
    }
    let critical_value = kpss_critical_value(phi)?;
    let lags = bandwidth.lags(n);
    let statistic = kpss_statistic(series, lags)?;
    Ok(KpssResult {
        statistic,
        bandwidth_used: lags,
        critical_value,
        reject: statistic > T::lit(critical_value),
    })
}

/// The KPSS statistic with `lags` Bartlett lags.
pub fn kpss_statistic<T: Scalar>(series: &TimeSeries<T>, lags: usize) -> Result<T> {
    let e = deviations(series.values());
    let opts = LrvOptions::fixed(Kernel::Bartlett, (lags + 1) as f64);
    let sigma2 = long_run_variance(&e, &opts)?.value;
    if !(sigma2 > T::zero()) {
        return Err(Error::DegenerateInput("KPSS long-run variance is zero".into()));
    }
    let mut partial = T::zero();
    let mut acc = CompensatedSum::new();
    for &v in &e {
        partial = partial + v;
        acc.add(partial * partial);
    }
    let n = T::from_count(e.len());
    Ok(acc.total() / (n * n * sigma2))
}
