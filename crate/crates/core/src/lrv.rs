//! Kernel (HAC) long-run variance estimation.
//!
//! The estimator follows the usual lag-window construction
//!
//! ```text
//! V = Σ_{|j| < m} K(j / b) · G_j,      G_j = m⁻¹ Σ_t u_t u_{t+|j|}
//! ```
//!
//! on the demeaned sequence `u`, with optional AR(1) prewhitening (filter,
//! smooth the residuals, recolour by `(1 − ρ̂)⁻²`), an Andrews (1991) AR(1)
//! plug-in bandwidth and a degrees-of-freedom adjustment. Defaults mirror
//! `sandwich::lrvar` in R: Quadratic Spectral kernel, plug-in bandwidth,
//! adjustment on, prewhitening off. Lag weights below `1e-7` in absolute
//! value past the last significant lag are dropped, as in that routine.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::diagnostics::{push_unique, Diagnostic};
use crate::error::{Error, Result};
use crate::scalar::{csum, refined_mean, CompensatedSum, Scalar};

/// Largest absolute AR(1) coefficient used for prewhitening or bandwidth selection.
pub const RHO_CLAMP: f64 = 0.97;
/// Lower bound on the plug-in bandwidth.
pub const BANDWIDTH_FLOOR: f64 = 0.5;
const WEIGHT_TOL: f64 = 1e-7;
// Above this many multiply-adds, lag products are computed by FFT.
const DIRECT_WORK_LIMIT: usize = 1 << 22;

/// Lag-window kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Kernel {
    #[default]
    QuadraticSpectral,
    Bartlett,
    Parzen,
}

impl Kernel {
    /// `K(x)`.
    pub fn weight<T: Scalar>(self, x: T) -> T {
        let ax = x.abs();
        let one = T::one();
        match self {
            Kernel::QuadraticSpectral => {
                let z = T::lit(1.2) * T::PI() * ax;
                if z < one {
                    // 3(sin z / z − cos z)/z² = 3 Σ_{k≥1} (−1)^{k+1} 2k z^{2k−2} / (2k+1)!
                    let z2 = z * z;
                    let mut term = one;
                    let mut sum = one;
                    for k in 2..12 {
                        let kf = T::from_count(k);
                        let two_k = kf + kf;
                        term = -term * z2 * kf / ((kf - one) * two_k * (two_k + one));
                        sum = sum + term;
                    }
                    sum
                } else {
                    T::lit(3.0) / (z * z) * (z.sin() / z - z.cos())
                }
            }
            Kernel::Bartlett => (one - ax).max(T::zero()),
            Kernel::Parzen => {
                if ax <= T::lit(0.5) {
                    one - T::lit(6.0) * ax * ax + T::lit(6.0) * ax * ax * ax
                } else if ax <= one {
                    let r = one - ax;
                    T::lit(2.0) * r * r * r
                } else {
                    T::zero()
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::QuadraticSpectral => "quadratic-spectral",
            Kernel::Bartlett => "bartlett",
            Kernel::Parzen => "parzen",
        }
    }
}

/// Bandwidth rule.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Bandwidth {
    Fixed(f64),
    #[default]
    AndrewsAr1Plugin,
}

/// Long-run variance options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrvOptions {
    pub kernel: Kernel,
    pub bandwidth: Bandwidth,
    pub prewhiten: bool,
    pub adjust: bool,
}

impl Default for LrvOptions {
    fn default() -> Self {
        Self {
            kernel: Kernel::QuadraticSpectral,
            bandwidth: Bandwidth::AndrewsAr1Plugin,
            prewhiten: false,
            adjust: true,
        }
    }
}

impl LrvOptions {
    /// Plain kernel smoothing with a fixed bandwidth.
    pub fn fixed(kernel: Kernel, bandwidth: f64) -> Self {
        Self {
            kernel,
            bandwidth: Bandwidth::Fixed(bandwidth),
            prewhiten: false,
            adjust: false,
        }
    }

    pub fn with_prewhiten(mut self, on: bool) -> Self {
        self.prewhiten = on;
        self
    }

    pub fn with_adjust(mut self, on: bool) -> Self {
        self.adjust = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if let Bandwidth::Fixed(b) = self.bandwidth {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::Input(format!("fixed bandwidth must be positive, got {b}")));
            }
        }
        Ok(())
    }
}

/// Plug-in bandwidth and the lag-1 coefficient it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthChoice<T> {
    pub bandwidth: T,
    pub rho: T,
    pub diagnostics: Vec<Diagnostic>,
}

/// Result of [`long_run_variance`].
#[derive(Debug, Clone, PartialEq)]
pub struct LrvEstimate<T> {
    /// Final (floored, adjusted, recoloured) estimate.
    pub value: T,
    /// Kernel sum before flooring and scaling.
    pub raw: T,
    pub bandwidth: T,
    /// Prewhitening coefficient, when prewhitening was applied.
    pub prewhiten_rho: Option<T>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Andrews' AR(1) plug-in bandwidth for a given lag-1 coefficient and
/// effective length `m`. The coefficient is clamped to ±0.97 and the
/// result floored at 0.5.
pub fn plugin_bandwidth<T: Scalar>(kernel: Kernel, rho: T, m: usize) -> BandwidthChoice<T> {
    let mut diagnostics = Vec::new();
    let clamp = T::lit(RHO_CLAMP);
    let rho = if rho.abs() > clamp {
        push_unique(&mut diagnostics, Diagnostic::BandwidthRhoClamped);
        clamp.copysign(rho)
    } else {
        rho
    };
    let one = T::one();
    let mt = T::from_count(m);
    let four_rho2 = T::lit(4.0) * rho * rho;
    let raw = match kernel {
        Kernel::QuadraticSpectral | Kernel::Parzen => {
            let alpha2 = four_rho2 / (one - rho).powi(4);
            let c = if kernel == Kernel::Parzen { 2.6614 } else { 1.3221 };
            T::lit(c) * (alpha2 * mt).powf(T::lit(0.2))
        }
        Kernel::Bartlett => {
            let alpha1 = four_rho2 / ((one - rho).powi(2) * (one + rho).powi(2));
            T::lit(1.1447) * (alpha1 * mt).powf(T::one() / T::lit(3.0))
        }
    };
    let floor = T::lit(BANDWIDTH_FLOOR);
    let bandwidth = if raw < floor {
        push_unique(&mut diagnostics, Diagnostic::BandwidthFloored);
        floor
    } else {
        raw
    };
    BandwidthChoice {
        bandwidth,
        rho,
        diagnostics,
    }
}

/// Plug-in bandwidth with `ρ̂₁` from a lag-1 least-squares fit (with
/// intercept) on `sequence`.
pub fn andrews_bandwidth<T: Scalar>(sequence: &[T], kernel: Kernel) -> Result<BandwidthChoice<T>> {
    let m = sequence.len();
    if m < 4 {
        return Err(Error::TooShort { needed: 4, got: m });
    }
    let rho = lag1_slope(sequence)?;
    Ok(plugin_bandwidth(kernel, rho, m))
}

/// Kernel long-run variance of `sequence` (demeaned internally).
pub fn long_run_variance<T: Scalar>(sequence: &[T], options: &LrvOptions) -> Result<LrvEstimate<T>> {
    options.validate()?;
    let m = sequence.len();
    if m < 4 {
        return Err(Error::TooShort { needed: 4, got: m });
    }
    if let Some(pos) = sequence.iter().position(|v| !v.is_finite()) {
        return Err(Error::Input(format!("entry {} is not finite", pos + 1)));
    }
    let mean = refined_mean(sequence);
    let u: Vec<T> = sequence.iter().map(|&v| v - mean).collect();
    if is_degenerate(&u, sequence) {
        return Err(Error::DegenerateInput(
            "long-run variance of a zero-variance sequence".into(),
        ));
    }

    let mut diagnostics = Vec::new();
    let (resid, prewhiten_rho) = if options.prewhiten {
        let num = csum(u.windows(2).map(|w| w[1] * w[0]));
        let den = csum(u[..m - 1].iter().map(|&v| v * v));
        let mut rho = if den > T::zero() { num / den } else { T::zero() };
        let clamp = T::lit(RHO_CLAMP);
        if rho.abs() > clamp {
            push_unique(&mut diagnostics, Diagnostic::PrewhitenRhoClamped);
            rho = clamp.copysign(rho);
        }
        let e: Vec<T> = u.windows(2).map(|w| w[1] - rho * w[0]).collect();
        (e, Some(rho))
    } else {
        (u, None)
    };

    let bandwidth = match options.bandwidth {
        Bandwidth::Fixed(b) => T::lit(b),
        Bandwidth::AndrewsAr1Plugin => {
            // Residuals of a perfectly fitting AR(1) have no usable lag-1 fit;
            // fall back to the floor.
            let choice = match lag1_slope(&resid) {
                Ok(rho) => plugin_bandwidth(options.kernel, rho, resid.len()),
                Err(_) => plugin_bandwidth(options.kernel, T::zero(), resid.len()),
            };
            for d in choice.diagnostics {
                push_unique(&mut diagnostics, d);
            }
            choice.bandwidth
        }
    };

    let raw = weighted_lag_sum(&resid, options.kernel, bandwidth) / T::from_count(m);
    let mut value = raw;
    if value < T::zero() {
        push_unique(&mut diagnostics, Diagnostic::LrvFlooredAtZero);
        value = T::zero();
    }
    if options.adjust {
        let n_eff = resid.len();
        value = value * T::from_count(n_eff) / T::from_count(n_eff - 1);
    }
    if let Some(rho) = prewhiten_rho {
        let d = T::one() / (T::one() - rho);
        value = value * d * d;
    }

    Ok(LrvEstimate {
        value,
        raw,
        bandwidth,
        prewhiten_rho,
        diagnostics,
    })
}

/// Lag weights `K(j/b)` for `j = 0..len`, cut after the last weight whose
/// magnitude exceeds the tolerance.
pub fn lag_weights<T: Scalar>(kernel: Kernel, bandwidth: T, len: usize) -> Vec<T> {
    let tol = T::lit(WEIGHT_TOL);
    let mut weights: Vec<T> = (0..len)
        .map(|j| kernel.weight(T::from_count(j) / bandwidth))
        .collect();
    let last = weights.iter().rposition(|w| w.abs() > tol).unwrap_or(0);
    weights.truncate(last + 1);
    weights
}

/// `Σ_j K(j/b) Σ_t u_t u_{t+|j|}` over `|j| < len(u)`, without the `1/m` factor.
fn weighted_lag_sum<T: Scalar>(u: &[T], kernel: Kernel, bandwidth: T) -> T {
    let weights = lag_weights(kernel, bandwidth, u.len());
    let sums = lag_product_sums(u, weights.len() - 1);
    let mut acc = CompensatedSum::new();
    acc.add(weights[0] * sums[0]);
    let two = T::lit(2.0);
    for (w, s) in weights.iter().zip(&sums).skip(1) {
        acc.add(two * *w * *s);
    }
    acc.total()
}

/// `S_j = Σ_{t} u_t u_{t+j}` for `j = 0..=max_lag`.
pub(crate) fn lag_product_sums<T: Scalar>(u: &[T], max_lag: usize) -> Vec<T> {
    let n = u.len();
    if n.saturating_mul(max_lag + 1) <= DIRECT_WORK_LIMIT {
        (0..=max_lag)
            .map(|j| csum((0..n - j).map(|t| u[t] * u[t + j])))
            .collect()
    } else {
        fft_lag_product_sums(u, max_lag)
    }
}

fn fft_lag_product_sums<T: Scalar>(u: &[T], max_lag: usize) -> Vec<T> {
    let size = (2 * u.len()).next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut buf: Vec<Complex<T>> = u
        .iter()
        .map(|&v| Complex::new(v, T::zero()))
        .chain(std::iter::repeat(Complex::new(T::zero(), T::zero())))
        .take(size)
        .collect();
    forward.process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), T::zero());
    }
    inverse.process(&mut buf);
    let scale = T::from_count(size);
    buf.iter().take(max_lag + 1).map(|c| c.re / scale).collect()
}

fn lag1_slope<T: Scalar>(x: &[T]) -> Result<T> {
    let lagged = &x[..x.len() - 1];
    let lead = &x[1..];
    let ma = refined_mean(lagged);
    let mb = refined_mean(lead);
    let sxy = csum(lagged.iter().zip(lead).map(|(&a, &b)| (a - ma) * (b - mb)));
    let sxx = csum(lagged.iter().map(|&a| (a - ma) * (a - ma)));
    if sxx <= T::zero() || is_degenerate(&lagged.iter().map(|&a| a - ma).collect::<Vec<_>>(), lagged) {
        return Err(Error::DegenerateInput(
            "lag-1 regressor has zero variance".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// True when the deviations are at rounding level relative to the data.
pub(crate) fn is_degenerate<T: Scalar>(dev: &[T], data: &[T]) -> bool {
    let scale = data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let tiny = T::lit(64.0) * T::epsilon() * scale;
    dev.iter().all(|d| d.abs() <= tiny)
}
