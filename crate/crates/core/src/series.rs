//! Time-series container and the sample autocovariance estimators.
//!
//! Every estimator divides by the number of observations in its window
//! (`n`, `N = ⌊n/2⌋` or `n − 1`), never by the number of summands, and all
//! of them demean with the mean of the series they are applied to. The two
//! half-sample estimators share the full-sample mean.

use crate::error::{Error, Result};
use crate::scalar::{refined_mean, CompensatedSum, Scalar};

/// Ordered, finite observations `Y_1, …, Y_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    values: Vec<T>,
}

impl<T: Scalar> TimeSeries<T> {
    /// Rejects NaN and infinite observations.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!(
                "observation {} is not finite",
                pos + 1
            )));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Half-sample length `N = ⌊n/2⌋`.
    pub fn half_len(&self) -> usize {
        self.values.len() / 2
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { values }
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for TimeSeries<T> {
    type Error = Error;

    fn try_from(values: Vec<T>) -> Result<Self> {
        Self::new(values)
    }
}

/// Autocovariance estimates needed by the test.
#[derive(Debug, Clone, PartialEq)]
pub struct AcvfSet<T> {
    /// γ̂(k), full sample.
    pub full: Vec<T>,
    /// γ̂₁(k), first half.
    pub first_half: Vec<T>,
    /// γ̂₂(k), second half.
    pub second_half: Vec<T>,
    /// γ̂ₓ(k) of the first differences.
    pub diff: Vec<T>,
    /// `N = ⌊n/2⌋`.
    pub half_len: usize,
}

impl<T: Scalar> AcvfSet<T> {
    /// Full-sample and half-sample estimates for lags `0..=max_lag`, and
    /// full-sample / differenced estimates for lags `0..=max(max_lag, 1)`.
    pub fn compute(series: &TimeSeries<T>, max_lag: usize) -> Result<Self> {
        let n = series.len();
        let half = n / 2;
        if max_lag >= half {
            return Err(Error::LagOutOfRange {
                lag: max_lag,
                len: half,
            });
        }
        if n < 3 {
            return Err(Error::TooShort { needed: 3, got: n });
        }
        let wide = max_lag.max(1);
        let dev = deviations(series.values());
        let nt = T::from_count(n);
        let ht = T::from_count(half);
        let full = (0..=wide)
            .map(|k| lag_cross_sum(&dev, 0, n - k, k) / nt)
            .collect();
        let first_half = (0..=max_lag)
            .map(|k| lag_cross_sum(&dev, 0, half - k, k) / ht)
            .collect();
        let second_half = (0..=max_lag)
            .map(|k| lag_cross_sum(&dev, half, 2 * half - k, k) / ht)
            .collect();

        let diffs = first_differences(series.values());
        let dx = deviations(&diffs);
        let m = T::from_count(diffs.len());
        let diff = (0..=wide)
            .map(|k| lag_cross_sum(&dx, 0, diffs.len() - k, k) / m)
            .collect();

        Ok(Self {
            full,
            first_half,
            second_half,
            diff,
            half_len: half,
        })
    }

    /// Largest lag available for the half-sample estimators.
    pub fn max_split_lag(&self) -> usize {
        self.second_half.len() - 1
    }
}

/// Arithmetic mean `Ȳ`.
pub fn sample_mean<T: Scalar>(series: &TimeSeries<T>) -> Result<T> {
    if series.is_empty() {
        return Err(Error::Input("sample mean of an empty series".into()));
    }
    Ok(refined_mean(series.values()))
}

/// `γ̂(k) = n⁻¹ Σ_{t=1}^{n−k} (Y_{t+k} − Ȳ)(Y_t − Ȳ)`.
pub fn acvf<T: Scalar>(series: &TimeSeries<T>, k: usize) -> Result<T> {
    let n = series.len();
    if k >= n {
        return Err(Error::LagOutOfRange { lag: k, len: n });
    }
    let dev = deviations(series.values());
    Ok(lag_cross_sum(&dev, 0, n - k, k) / T::from_count(n))
}

/// `(γ̂₁(k), γ̂₂(k))`, both over `N = ⌊n/2⌋` terms demeaned by the
/// full-sample mean. With odd `n`, `Y_n` only enters through `Ȳ`.
pub fn acvf_split<T: Scalar>(series: &TimeSeries<T>, k: usize) -> Result<(T, T)> {
    let half = series.half_len();
    if k >= half {
        return Err(Error::LagOutOfRange { lag: k, len: half });
    }
    let dev = deviations(series.values());
    let ht = T::from_count(half);
    Ok((
        lag_cross_sum(&dev, 0, half - k, k) / ht,
        lag_cross_sum(&dev, half, 2 * half - k, k) / ht,
    ))
}

/// Order-`d` differencing `∇^d Y`, of length `n − d`.
pub fn difference<T: Scalar>(series: &TimeSeries<T>, order: usize) -> Result<TimeSeries<T>> {
    if order == 0 {
        return Err(Error::Input("differencing order must be at least 1".into()));
    }
    if series.len() <= order {
        return Err(Error::TooShort {
            needed: order + 1,
            got: series.len(),
        });
    }
    let mut values = series.values().to_vec();
    for _ in 0..order {
        values = first_differences(&values);
    }
    Ok(TimeSeries { values })
}

/// `γ̂ₓ(k)` of `X_t = ∇Y_t`, `t = 2..n`, divisor `n − 1`.
pub fn acvf_diff<T: Scalar>(series: &TimeSeries<T>, k: usize) -> Result<T> {
    let x = difference(series, 1)?;
    acvf(&x, k)
}

pub(crate) fn deviations<T: Scalar>(values: &[T]) -> Vec<T> {
    let mean = refined_mean(values);
    values.iter().map(|&v| v - mean).collect()
}

pub(crate) fn first_differences<T: Scalar>(values: &[T]) -> Vec<T> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// `Σ_{t=start}^{end−1} dev[t + k] · dev[t]` (0-based indices).
pub(crate) fn lag_cross_sum<T: Scalar>(dev: &[T], start: usize, end: usize, k: usize) -> T {
    let mut acc = CompensatedSum::new();
    for t in start..end {
        acc.add(dev[t + k] * dev[t]);
    }
    acc.total()
}
