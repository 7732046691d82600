//! The sample-autocovariance unit-root test.
//!
//! `H₀: Y_t ~ I(0)` is rejected when the squared second-half autocovariances
//! `T_n = Σ_{k≤K₀} γ̂₂(k)²` exceed a critical value calibrated on the first
//! half. The normal-approximation critical value is replaced by
//! `κ_n = 0.1 log N` whenever the levels/differences ratio `R` says the
//! series looks integrated, which is what gives the test power one.
//!
//! The work shared across `K₀` and `c_κ` (autocovariances, `R`, `λ̂`, `ρ̂`)
//! lives in [`PreparedTest`]; `B̂` is computed once per `K₀` and every `c_κ`
//! is then a cheap [`PreparedTest::decide`] call.

mod quantile;

pub use quantile::{normal_cdf, normal_quantile};

use crate::diagnostics::{push_unique, Diagnostic};
use crate::error::{Error, Result};
use crate::lrv::{is_degenerate, long_run_variance, LrvEstimate, LrvOptions};
use crate::scalar::{csum, Scalar};
use crate::series::{deviations, AcvfSet, TimeSeries};

/// Default truncation constant.
pub const DEFAULT_C_KAPPA: f64 = 0.55;
/// Default largest lag swept by [`run_test_sweep`].
pub const DEFAULT_MAX_K0: usize = 4;
/// Relative tolerance under which the denominator of `R` counts as zero.
pub const RATIO_DENOMINATOR_EPS: f64 = 1e-12;
/// Minimum series length accepted by [`run_test`].
pub const MIN_LENGTH: usize = 8;

/// Truncation constant `c_κ`; `Untruncated` keeps the naive critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CKappa {
    Finite(f64),
    Untruncated,
}

impl CKappa {
    pub fn is_untruncated(self) -> bool {
        matches!(self, CKappa::Untruncated)
    }

    /// Parses a number or `inf`/`infinity`/`∞`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "inf" | "infinity" | "∞") {
            return Ok(CKappa::Untruncated);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Input(format!("cannot parse c_kappa from {s:?}")))?;
        if v.is_infinite() && v > 0.0 {
            return Ok(CKappa::Untruncated);
        }
        Ok(CKappa::Finite(v))
    }

    pub fn validate(self) -> Result<()> {
        match self {
            CKappa::Finite(c) if !(c > 1.0 / 6.0 && c.is_finite()) => Err(Error::Input(format!(
                "c_kappa must exceed 1/6, got {c}"
            ))),
            _ => Ok(()),
        }
    }
}

impl Default for CKappa {
    fn default() -> Self {
        CKappa::Finite(DEFAULT_C_KAPPA)
    }
}

impl std::fmt::Display for CKappa {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CKappa::Finite(c) => write!(f, "{c}"),
            CKappa::Untruncated => f.write_str("inf"),
        }
    }
}

/// Tuning parameters of the test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    pub k0: usize,
    pub c_kappa: CKappa,
    /// Nominal level φ.
    pub phi: f64,
    /// Options for σ̂_L² (and for B̂ unless overridden).
    pub lrv_options: LrvOptions,
    /// Separate options for the long-run variance of Q̃.
    pub b_lrv_options: Option<LrvOptions>,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            k0: 0,
            c_kappa: CKappa::default(),
            phi: 0.05,
            lrv_options: LrvOptions::default(),
            b_lrv_options: None,
        }
    }
}

impl TestConfig {
    pub fn with_k0(mut self, k0: usize) -> Self {
        self.k0 = k0;
        self
    }

    pub fn with_c_kappa(mut self, c: CKappa) -> Self {
        self.c_kappa = c;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_lrv_options(mut self, opts: LrvOptions) -> Self {
        self.lrv_options = opts;
        self
    }

    pub fn b_options(&self) -> LrvOptions {
        self.b_lrv_options.unwrap_or(self.lrv_options)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.c_kappa.validate()?;
        validate_phi(self.phi)?;
        let needed = MIN_LENGTH.max(2 * (self.k0 + 1));
        if n < needed {
            return Err(Error::TooShort { needed, got: n });
        }
        Ok(())
    }
}

fn validate_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < 1.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("nominal level must lie in (0, 1), got {phi}")))
    }
}

/// Full decision record.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOutcome<T> {
    pub k0: usize,
    pub c_kappa: CKappa,
    pub phi: f64,
    /// `T_n`.
    pub statistic: T,
    /// `cv_φ` actually used.
    pub cv: T,
    pub cv_naive: T,
    /// `κ_n = 0.1 log N`.
    pub kappa_n: T,
    /// `Σ_{k≤K₀} γ̂₁(k)²`.
    pub first_half_sum: T,
    pub event_t: bool,
    /// `R`; `+inf` when its denominator is degenerate.
    pub ratio: T,
    /// `C*·N^{3/5}`; `None` when C* is not available.
    pub threshold: Option<T>,
    pub c_star: Option<T>,
    pub lambda_hat: Option<T>,
    pub rho_hat: Option<T>,
    pub sigma_s2: T,
    pub sigma_l2: Option<T>,
    pub b_hat: T,
    pub z_quantile: T,
    pub reject: bool,
    /// One-sided normal-approximation p-value for the untruncated test.
    /// Not part of the level-φ decision.
    pub naive_p_value: f64,
    pub diagnostics: Vec<Diagnostic>,
}

/// `Q̃_1, …, Q̃_m`, `m = 2N − K₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeQSequence<T> {
    pub values: Vec<T>,
}

/// `R = {γ̂(0)+γ̂(1)} / {γ̂ₓ(0)+γ̂ₓ(1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio<T> {
    pub value: T,
    /// Denominator degenerate; `value` is `+inf`.
    pub degenerate: bool,
}

/// `C* = 2c_κ / {λ̂(1+ρ̂)}` and its ingredients.
#[derive(Debug, Clone, PartialEq)]
pub struct CStar<T> {
    /// `+inf` when untruncated; meaningless when `degenerate`.
    pub value: T,
    pub lambda_hat: T,
    pub rho_hat: T,
    pub sigma_s2: T,
    pub sigma_l2: T,
    /// `λ̂(1+ρ̂) ≤ 0` or `σ̂_L² = 0`: the event 𝒯 is forced to fail.
    pub degenerate: bool,
    pub diagnostics: Vec<Diagnostic>,
}

/// `B̂_{2N−K₀} = (m Ṽ_m)^{1/2}` with the underlying LRV estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleEstimate<T> {
    pub k0: usize,
    pub b_hat: T,
    pub lrv: LrvEstimate<T>,
}

/// `T_n = Σ_{k=0}^{K₀} γ̂₂(k)²`.
pub fn statistic_tn<T: Scalar>(acvf: &AcvfSet<T>, k0: usize) -> Result<T> {
    if k0 > acvf.max_split_lag() {
        return Err(Error::LagOutOfRange {
            lag: k0,
            len: acvf.half_len,
        });
    }
    Ok(csum(acvf.second_half[..=k0].iter().map(|&g| g * g)))
}

fn first_half_sum<T: Scalar>(acvf: &AcvfSet<T>, k0: usize) -> T {
    csum(acvf.first_half[..=k0].iter().map(|&g| g * g))
}

/// `Q̃_t = Σ_k 2 ỹ_{t,k} γ̂(k)` with
/// `ỹ_{t,k} = 2{(Y_t−Ȳ)(Y_{t+k}−Ȳ) − γ̂(k)} sgn(k + t − N − 1/2)`.
pub fn tilde_q<T: Scalar>(series: &TimeSeries<T>, k0: usize) -> Result<TildeQSequence<T>> {
    let n = series.len();
    if n < 2 * (k0 + 1) {
        return Err(Error::TooShort {
            needed: 2 * (k0 + 1),
            got: n,
        });
    }
    let dev = deviations(series.values());
    let gamma: Vec<T> = (0..=k0)
        .map(|k| crate::series::lag_cross_sum(&dev, 0, n - k, k) / T::from_count(n))
        .collect();
    Ok(tilde_q_from(&dev, &gamma, n / 2, k0))
}

fn tilde_q_from<T: Scalar>(dev: &[T], gamma: &[T], half: usize, k0: usize) -> TildeQSequence<T> {
    let m = 2 * half - k0;
    let four = T::lit(4.0);
    let values = (0..m)
        .map(|i| {
            let mut q = T::zero();
            for (k, &g) in gamma.iter().enumerate().take(k0 + 1) {
                // 1-based t = i + 1; k + t − N − 1/2 > 0  ⇔  k + i ≥ N.
                let term = four * g * (dev[i] * dev[i + k] - g);
                q = if k + i >= half { q + term } else { q - term };
            }
            q
        })
        .collect();
    TildeQSequence { values }
}

/// `B̂ = (m Ṽ_m)^{1/2}`, `Ṽ_m` the long-run variance of Q̃.
pub fn estimate_b<T: Scalar>(
    series: &TimeSeries<T>,
    k0: usize,
    options: &LrvOptions,
) -> Result<ScaleEstimate<T>> {
    let q = tilde_q(series, k0)?;
    scale_from_q(&q, k0, options)
}

fn scale_from_q<T: Scalar>(
    q: &TildeQSequence<T>,
    k0: usize,
    options: &LrvOptions,
) -> Result<ScaleEstimate<T>> {
    let m = q.values.len();
    let lrv = match long_run_variance(&q.values, options) {
        Ok(l) => l,
        Err(Error::DegenerateInput(msg)) => {
            return Err(Error::DegenerateScale {
                context: format!("Q̃ sequence (K0 = {k0}): {msg}"),
                diagnostics: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    if !(lrv.value > T::zero()) {
        return Err(Error::DegenerateScale {
            context: format!("long-run variance of Q̃ is zero (K0 = {k0})"),
            diagnostics: lrv.diagnostics,
        });
    }
    let b_hat = (T::from_count(m) * lrv.value).sqrt();
    Ok(ScaleEstimate { k0, b_hat, lrv })
}

/// Levels/differences autocovariance ratio.
pub fn ratio_r<T: Scalar>(series: &TimeSeries<T>) -> Result<Ratio<T>> {
    if series.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: series.len(),
        });
    }
    let acvf = acvf_levels_and_diffs(series)?;
    Ok(ratio_from(&acvf))
}

fn ratio_from<T: Scalar>(acvf: &AcvfSet<T>) -> Ratio<T> {
    let num = acvf.full[0] + acvf.full[1];
    let den = acvf.diff[0] + acvf.diff[1];
    let eps = T::lit(RATIO_DENOMINATOR_EPS) * acvf.diff[0];
    if acvf.diff[0] <= T::zero() || den <= eps {
        Ratio {
            value: T::infinity(),
            degenerate: true,
        }
    } else {
        Ratio {
            value: num / den,
            degenerate: false,
        }
    }
}

fn acvf_levels_and_diffs<T: Scalar>(series: &TimeSeries<T>) -> Result<AcvfSet<T>> {
    // Only lags 0 and 1 of γ̂ and γ̂ₓ are needed here.
    if series.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: series.len(),
        });
    }
    AcvfSet::compute(series, 0)
}

/// `C* = 2c_κ / {λ̂(1+ρ̂)}`, `λ̂ = γ̂ₓ(0)/σ̂_L²`, `ρ̂ = γ̂ₓ(1)/γ̂ₓ(0)`.
pub fn c_star<T: Scalar>(
    series: &TimeSeries<T>,
    c_kappa: CKappa,
    options: &LrvOptions,
) -> Result<CStar<T>> {
    c_kappa.validate()?;
    if series.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: series.len(),
        });
    }
    let acvf = acvf_levels_and_diffs(series)?;
    let basis = c_star_basis(series, &acvf, options)?;
    Ok(basis.with_c_kappa(c_kappa))
}

/// λ̂ and ρ̂ without the `c_κ` factor.
#[derive(Debug, Clone, PartialEq)]
struct CStarBasis<T> {
    lambda_hat: T,
    rho_hat: T,
    sigma_s2: T,
    sigma_l2: T,
    degenerate: bool,
    diagnostics: Vec<Diagnostic>,
}

impl<T: Scalar> CStarBasis<T> {
    fn with_c_kappa(&self, c_kappa: CKappa) -> CStar<T> {
        let value = match c_kappa {
            CKappa::Untruncated => T::infinity(),
            CKappa::Finite(_) if self.degenerate => T::zero(),
            CKappa::Finite(c) => {
                T::lit(2.0 * c) / (self.lambda_hat * (T::one() + self.rho_hat))
            }
        };
        CStar {
            value,
            lambda_hat: self.lambda_hat,
            rho_hat: self.rho_hat,
            sigma_s2: self.sigma_s2,
            sigma_l2: self.sigma_l2,
            degenerate: self.degenerate,
            diagnostics: self.diagnostics.clone(),
        }
    }
}

fn c_star_basis<T: Scalar>(
    series: &TimeSeries<T>,
    acvf: &AcvfSet<T>,
    options: &LrvOptions,
) -> Result<CStarBasis<T>> {
    let diffs = crate::series::first_differences(series.values());
    let dx = deviations(&diffs);
    if is_degenerate(&dx, &diffs) || !(acvf.diff[0] > T::zero()) {
        return Err(Error::DegenerateInput(
            "first differences have zero variance".into(),
        ));
    }
    let lrv = long_run_variance(&dx, options)?;
    let mut diagnostics = lrv.diagnostics.clone();
    let sigma_s2 = acvf.diff[0];
    let sigma_l2 = lrv.value;
    let rho_hat = acvf.diff[1] / sigma_s2;
    let lambda_hat = if sigma_l2 > T::zero() {
        sigma_s2 / sigma_l2
    } else {
        T::infinity()
    };
    let prod = lambda_hat * (T::one() + rho_hat);
    let degenerate = !(sigma_l2 > T::zero()) || !(prod > T::zero()) || !prod.is_finite();
    if degenerate {
        push_unique(&mut diagnostics, Diagnostic::CStarDegenerate);
    }
    Ok(CStarBasis {
        lambda_hat,
        rho_hat,
        sigma_s2,
        sigma_l2,
        degenerate,
        diagnostics,
    })
}

/// `𝒯 = {R < C* N^{3/5}}`. Always true when untruncated; false when `R`
/// or `C*` is degenerate.
pub fn event_t<T: Scalar>(
    series: &TimeSeries<T>,
    c_kappa: CKappa,
    options: &LrvOptions,
) -> Result<bool> {
    c_kappa.validate()?;
    if c_kappa.is_untruncated() {
        return Ok(true);
    }
    let ratio = ratio_r(series)?;
    if ratio.degenerate {
        return Ok(false);
    }
    let cs = c_star(series, c_kappa, options)?;
    Ok(event_from(ratio, Some(&cs), series.half_len()))
}

fn event_from<T: Scalar>(ratio: Ratio<T>, cs: Option<&CStar<T>>, half: usize) -> bool {
    let Some(cs) = cs else { return false };
    if cs.value.is_infinite() && cs.value > T::zero() {
        return true;
    }
    if ratio.degenerate || cs.degenerate {
        return false;
    }
    ratio.value < cs.value * n_power(half)
}

fn n_power<T: Scalar>(half: usize) -> T {
    T::from_count(half).powf(T::lit(0.6))
}

/// Everything in the test that does not depend on `K₀`, `c_κ` or φ.
#[derive(Debug, Clone)]
pub struct PreparedTest<T> {
    dev: Vec<T>,
    acvf: AcvfSet<T>,
    ratio: Ratio<T>,
    basis: Option<CStarBasis<T>>,
    diagnostics: Vec<Diagnostic>,
}

impl<T: Scalar> PreparedTest<T> {
    /// Computes autocovariances up to `max_k0`, `R`, and λ̂, ρ̂ with `options`
    /// for σ̂_L².
    pub fn new(series: &TimeSeries<T>, max_k0: usize, options: &LrvOptions) -> Result<Self> {
        let n = series.len();
        let needed = MIN_LENGTH.max(2 * (max_k0 + 1));
        if n < needed {
            return Err(Error::TooShort { needed, got: n });
        }
        let dev = deviations(series.values());
        if is_degenerate(&dev, series.values()) {
            return Err(Error::DegenerateInput("series has zero variance".into()));
        }
        let acvf = AcvfSet::compute(series, max_k0)?;
        let ratio = ratio_from(&acvf);
        let mut diagnostics = Vec::new();
        if ratio.degenerate {
            push_unique(&mut diagnostics, Diagnostic::RatioDenominatorDegenerate);
        }
        let basis = match c_star_basis(series, &acvf, options) {
            Ok(b) => Some(b),
            Err(Error::DegenerateInput(_)) if ratio.degenerate => {
                push_unique(&mut diagnostics, Diagnostic::DifferencesDegenerate);
                None
            }
            Err(e) => return Err(e),
        };
        Ok(Self {
            dev,
            acvf,
            ratio,
            basis,
            diagnostics,
        })
    }

    pub fn acvf(&self) -> &AcvfSet<T> {
        &self.acvf
    }

    pub fn ratio(&self) -> Ratio<T> {
        self.ratio
    }

    pub fn max_k0(&self) -> usize {
        self.acvf.max_split_lag()
    }

    pub fn tilde_q(&self, k0: usize) -> Result<TildeQSequence<T>> {
        self.check_k0(k0)?;
        Ok(tilde_q_from(&self.dev, &self.acvf.full, self.acvf.half_len, k0))
    }

    /// `B̂` for one `K₀`.
    pub fn scale(&self, k0: usize, options: &LrvOptions) -> Result<ScaleEstimate<T>> {
        let q = self.tilde_q(k0)?;
        scale_from_q(&q, k0, options)
    }

    pub fn c_star(&self, c_kappa: CKappa) -> Option<CStar<T>> {
        self.basis.as_ref().map(|b| b.with_c_kappa(c_kappa))
    }

    /// Truncated critical value and decision for one `(K₀, c_κ, φ)`.
    pub fn decide(&self, scale: &ScaleEstimate<T>, c_kappa: CKappa, phi: f64) -> Result<TestOutcome<T>> {
        c_kappa.validate()?;
        validate_phi(phi)?;
        let k0 = scale.k0;
        self.check_k0(k0)?;
        let half = self.acvf.half_len;
        let statistic = statistic_tn(&self.acvf, k0)?;
        let first = first_half_sum(&self.acvf, k0);
        let z = normal_quantile(1.0 - phi)?;
        let two_n = T::from_count(2 * half);
        let cv_naive = T::lit(z) * scale.b_hat / two_n + first;
        let kappa_n = T::lit(0.1) * T::from_count(half).ln();

        let cs = self.c_star(c_kappa);
        let event = if c_kappa.is_untruncated() {
            true
        } else {
            event_from(self.ratio, cs.as_ref(), half)
        };
        let cv = if event { cv_naive } else { kappa_n };
        let reject = statistic > cv;

        let mut diagnostics = self.diagnostics.clone();
        for d in scale.lrv.diagnostics.iter().chain(cs.iter().flat_map(|c| c.diagnostics.iter())) {
            push_unique(&mut diagnostics, *d);
        }
        let excess = ((statistic - first) * two_n / scale.b_hat).as_f64();
        let naive_p_value = 1.0 - normal_cdf(excess);

        let threshold = cs
            .as_ref()
            .filter(|c| !c.degenerate)
            .map(|c| c.value * n_power(half));
        Ok(TestOutcome {
            k0,
            c_kappa,
            phi,
            statistic,
            cv,
            cv_naive,
            kappa_n,
            first_half_sum: first,
            event_t: event,
            ratio: self.ratio.value,
            threshold,
            c_star: cs.as_ref().filter(|c| !c.degenerate).map(|c| c.value),
            lambda_hat: self.basis.as_ref().map(|b| b.lambda_hat),
            rho_hat: self.basis.as_ref().map(|b| b.rho_hat),
            sigma_s2: self.acvf.diff[0],
            sigma_l2: self.basis.as_ref().map(|b| b.sigma_l2),
            b_hat: scale.b_hat,
            z_quantile: T::lit(z),
            reject,
            naive_p_value,
            diagnostics,
        })
    }

    fn check_k0(&self, k0: usize) -> Result<()> {
        if k0 > self.max_k0() {
            return Err(Error::LagOutOfRange {
                lag: k0,
                len: self.acvf.half_len,
            });
        }
        Ok(())
    }
}

/// The full test for a single configuration.
pub fn run_test<T: Scalar>(series: &TimeSeries<T>, config: &TestConfig) -> Result<TestOutcome<T>> {
    config.validate(series.len())?;
    let prepared = PreparedTest::new(series, config.k0, &config.lrv_options)?;
    let scale = prepared.scale(config.k0, &config.b_options())?;
    prepared.decide(&scale, config.c_kappa, config.phi)
}

/// The full test for each `K₀` in `k0s` (the `k0` field of `config` is
/// ignored), sharing the autocovariances, `R` and `C*` across lags.
pub fn run_test_sweep<T: Scalar>(
    series: &TimeSeries<T>,
    config: &TestConfig,
    k0s: &[usize],
) -> Result<Vec<TestOutcome<T>>> {
    let Some(&max_k0) = k0s.iter().max() else {
        return Ok(Vec::new());
    };
    config.with_k0(max_k0).validate(series.len())?;
    let prepared = PreparedTest::new(series, max_k0, &config.lrv_options)?;
    k0s.iter()
        .map(|&k0| {
            let scale = prepared.scale(k0, &config.b_options())?;
            prepared.decide(&scale, config.c_kappa, config.phi)
        })
        .collect()
}
