//! ARIMA-type data generating processes, including the seven benchmark
//! models used for size and power experiments.
//!
//! A model is `∇^d Y_t = μ_d + Z_t` where `Z_t` is a stationary ARMA driven
//! by i.i.d. innovations. Models 1–3 are `I(0)`, 4–6 are `I(1)` and 7 is
//! `I(2)`:
//!
//! | id | driving process `Z_t`                                   | d |
//! |----|---------------------------------------------------------|---|
//! | 1  | `Z_t = ρ Z_{t−1} + ε_t`                                 | 0 |
//! | 2  | `Z_t = ε_t + φ₁ε_{t−1} + φ₂ε_{t−2}`                     | 0 |
//! | 3  | `Z_t − ρ₁Z_{t−1} − ρ₂Z_{t−2} = ε_t + 0.5ε_{t−1} + 0.3ε_{t−2}` | 0 |
//! | 4  | as model 1                                              | 1 |
//! | 5  | `Z_t = ε_t + φ₁ε_t + φ₂ε_{t−1}` (literal)               | 1 |
//! | 6  | `Z_t − ρ₁Z_{t−1} − ρ₂Z_{t−2} = ε_t + 0.5ε_t + 0.3ε_{t−1}` (literal) | 1 |
//! | 7  | as model 5                                              | 2 |
//!
//! Models 5–7 are written with a leading `φ₁ε_t` term. [`MaConvention`]
//! selects that literal reading or the lag-shifted one matching models 2–3.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::{InnovationLaw, InnovationStream, SeedSpec};
use crate::scalar::Scalar;
use crate::series::TimeSeries;

pub const DEFAULT_BURN_IN: usize = 300;

/// How the MA coefficients of models 5–7 are indexed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MaConvention {
    /// `ε_t + φ₁ε_t + φ₂ε_{t−1}`.
    #[default]
    Literal,
    /// `ε_t + φ₁ε_{t−1} + φ₂ε_{t−2}`.
    Shifted,
}

impl MaConvention {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "literal" => Ok(MaConvention::Literal),
            "shifted" => Ok(MaConvention::Shifted),
            other => Err(Error::Input(format!("unknown MA convention {other:?}"))),
        }
    }
}

impl fmt::Display for MaConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaConvention::Literal => "literal",
            MaConvention::Shifted => "shifted",
        })
    }
}

/// Parameters of a benchmark model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    /// Models 1 and 4.
    Rho(f64),
    /// Models 3 and 6: `(ρ₁, ρ₂)`.
    Rho2(f64, f64),
    /// Models 2, 5 and 7: `(φ₁, φ₂)`.
    Phi(f64, f64),
}

impl ModelParams {
    /// Parses `rho=0.5`, `rho1=0.4,rho2=0.2` or `phi1=0.8,phi2=0.3`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut rho = None;
        let mut rho1 = None;
        let mut rho2 = None;
        let mut phi1 = None;
        let mut phi2 = None;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("expected key=value, got {part:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("cannot parse number in {part:?}")))?;
            let slot = match k.trim().to_ascii_lowercase().as_str() {
                "rho" => &mut rho,
                "rho1" => &mut rho1,
                "rho2" => &mut rho2,
                "phi1" => &mut phi1,
                "phi2" => &mut phi2,
                other => return Err(Error::Input(format!("unknown parameter {other:?}"))),
            };
            *slot = Some(v);
        }
        match (rho, rho1, rho2, phi1, phi2) {
            (Some(r), None, None, None, None) => Ok(ModelParams::Rho(r)),
            (None, Some(a), Some(b), None, None) => Ok(ModelParams::Rho2(a, b)),
            (None, None, None, Some(a), Some(b)) => Ok(ModelParams::Phi(a, b)),
            _ => Err(Error::Input(format!(
                "parameters {s:?} must be rho, rho1+rho2, or phi1+phi2"
            ))),
        }
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelParams::Rho(r) => write!(f, "rho={r}"),
            ModelParams::Rho2(a, b) => write!(f, "rho1={a},rho2={b}"),
            ModelParams::Phi(a, b) => write!(f, "phi1={a},phi2={b}"),
        }
    }
}

/// Generative description of `∇^d Y_t = drift + Z_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// AR coefficients of the driving process.
    pub ar: Vec<f64>,
    /// MA coefficients, interpreted according to `literal_ma_indexing`.
    pub ma: Vec<f64>,
    /// Integration order, 0..=2.
    pub d: u8,
    pub law: InnovationLaw,
    /// `ma[0]` multiplies `ε_t` (added to the unit lead) instead of `ε_{t−1}`.
    pub literal_ma_indexing: bool,
    pub burn_in: usize,
    /// `μ_d`, added to the driving process before integration.
    pub drift: f64,
}

impl ModelSpec {
    pub fn new(ar: Vec<f64>, ma: Vec<f64>, d: u8, law: InnovationLaw) -> Self {
        Self {
            ar,
            ma,
            d,
            law,
            literal_ma_indexing: false,
            burn_in: DEFAULT_BURN_IN,
            drift: 0.0,
        }
    }

    /// Gaussian random walk with unit innovation variance.
    pub fn random_walk() -> Self {
        Self::new(Vec::new(), Vec::new(), 1, InnovationLaw::default())
    }

    pub fn with_drift(mut self, drift: f64) -> Self {
        self.drift = drift;
        self
    }

    pub fn with_burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    /// Coefficients `θ_0, θ_1, …` of `Σ_j θ_j ε_{t−j}`.
    pub fn ma_polynomial(&self) -> Vec<f64> {
        if self.literal_ma_indexing && !self.ma.is_empty() {
            let mut theta = Vec::with_capacity(self.ma.len());
            theta.push(1.0 + self.ma[0]);
            theta.extend_from_slice(&self.ma[1..]);
            theta
        } else {
            let mut theta = Vec::with_capacity(self.ma.len() + 1);
            theta.push(1.0);
            theta.extend_from_slice(&self.ma);
            theta
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d > 2 {
            return Err(Error::Input(format!("integration order {} not in 0..=2", self.d)));
        }
        if self.ar.iter().chain(&self.ma).any(|c| !c.is_finite()) || !self.drift.is_finite() {
            return Err(Error::Input("model coefficients must be finite".into()));
        }
        self.law.validate()?;
        if !is_stationary_ar(&self.ar) {
            return Err(Error::NonStationary(self.ar.clone()));
        }
        Ok(())
    }
}

/// Whether every root of `1 − a₁z − … − a_p z^p` lies outside the unit circle
/// (equivalently the companion matrix has spectral radius below one), checked
/// through the reflection coefficients of the Levinson step-down recursion.
pub fn is_stationary_ar(ar: &[f64]) -> bool {
    let mut phi = ar.to_vec();
    while let Some(&kappa) = phi.last() {
        if !(kappa.abs() < 1.0) {
            return false;
        }
        let k = phi.len();
        let denom = 1.0 - kappa * kappa;
        let next: Vec<f64> = (0..k - 1)
            .map(|j| (phi[j] + kappa * phi[k - 2 - j]) / denom)
            .collect();
        phi = next;
    }
    true
}

/// Canonical [`ModelSpec`] for benchmark model `model_id` (1–7).
pub fn model_table(
    model_id: u8,
    params: ModelParams,
    law: InnovationLaw,
    convention: MaConvention,
) -> Result<ModelSpec> {
    let mismatch = || {
        Error::Input(format!(
            "model {model_id} does not take parameters {params}"
        ))
    };
    let literal = convention == MaConvention::Literal;
    let spec = match (model_id, params) {
        (1, ModelParams::Rho(r)) => ModelSpec::new(vec![r], vec![], 0, law),
        (2, ModelParams::Phi(a, b)) => ModelSpec::new(vec![], vec![a, b], 0, law),
        (3, ModelParams::Rho2(a, b)) => ModelSpec::new(vec![a, b], vec![0.5, 0.3], 0, law),
        (4, ModelParams::Rho(r)) => ModelSpec::new(vec![r], vec![], 1, law),
        (5, ModelParams::Phi(a, b)) => ModelSpec {
            literal_ma_indexing: literal,
            ..ModelSpec::new(vec![], vec![a, b], 1, law)
        },
        (6, ModelParams::Rho2(a, b)) => ModelSpec {
            literal_ma_indexing: literal,
            ..ModelSpec::new(vec![a, b], vec![0.5, 0.3], 1, law)
        },
        (7, ModelParams::Phi(a, b)) => ModelSpec {
            literal_ma_indexing: literal,
            ..ModelSpec::new(vec![], vec![a, b], 2, law)
        },
        (1..=7, _) => return Err(mismatch()),
        (id, _) => return Err(Error::UnknownModel(id)),
    };
    spec.validate()?;
    Ok(spec)
}

/// Simulates `n` observations of `Y_t`.
///
/// Draws `burn_in + n + q` innovations (`q` the MA order), runs the ARMA
/// recursion from a zero state, drops the first `burn_in` values of `Z_t`,
/// adds the drift and integrates `d` times from `Y_0 = 0`.
pub fn simulate<T: Scalar>(spec: &ModelSpec, n: usize, seed: SeedSpec) -> Result<TimeSeries<T>> {
    let z = simulate_raw(spec, n, seed)?;
    TimeSeries::new(z.into_iter().map(T::lit).collect())
}

pub(crate) fn simulate_raw(spec: &ModelSpec, n: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    spec.validate()?;
    let theta = spec.ma_polynomial();
    let q = theta.len() - 1;
    let total = spec.burn_in + n + q;
    let mut stream = InnovationStream::new(spec.law, seed)?;
    let eps: Vec<f64> = (0..total).map(|_| stream.next_draw()).collect();

    let p = spec.ar.len();
    let mut z = Vec::with_capacity(total - q);
    for i in q..total {
        let mut v = 0.0;
        for (j, &th) in theta.iter().enumerate() {
            v += th * eps[i - j];
        }
        let idx = z.len();
        for (l, &a) in spec.ar.iter().enumerate().take(p) {
            if idx > l {
                v += a * z[idx - 1 - l];
            }
        }
        z.push(v);
    }
    let mut y: Vec<f64> = z[spec.burn_in..].iter().map(|&v| v + spec.drift).collect();
    for _ in 0..spec.d {
        let mut acc = 0.0;
        for v in y.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    Ok(y)
}
