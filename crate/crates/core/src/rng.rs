//! Seeded innovation streams.
//!
//! Every replication owns an independent ChaCha8 stream keyed by
//! `SHA-256(master_seed)` and selected by the replication index through the
//! cipher's 64-bit stream id. Streams are therefore counter-addressable:
//! replication `r` draws the same numbers whether it runs first, last, or on
//! another thread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::TimeSeries;

/// Distribution of the i.i.d. innovations `ε_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnovationLaw {
    /// `N(0, variance)`.
    Gaussian { variance: f64 },
    /// Student t with `df` degrees of freedom (unit scale).
    StudentT { df: f64 },
}

impl Default for InnovationLaw {
    fn default() -> Self {
        InnovationLaw::Gaussian { variance: 1.0 }
    }
}

impl InnovationLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InnovationLaw::Gaussian { variance } if !(variance > 0.0 && variance.is_finite()) => {
                Err(Error::Input(format!("innovation variance must be positive, got {variance}")))
            }
            InnovationLaw::StudentT { df } if !(df > 0.0 && df.is_finite()) => {
                Err(Error::Input(format!("degrees of freedom must be positive, got {df}")))
            }
            _ => Ok(()),
        }
    }

    /// Parses `gaussian:VAR` or `t:DF`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("expected gaussian:VAR or t:DF, got {s:?}")))?;
        let value: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("cannot parse number in {s:?}")))?;
        let law = match kind.trim().to_ascii_lowercase().as_str() {
            "gaussian" | "normal" | "n" => InnovationLaw::Gaussian { variance: value },
            "t" | "student" | "student-t" => InnovationLaw::StudentT { df: value },
            other => return Err(Error::Input(format!("unknown innovation law {other:?}"))),
        };
        law.validate()?;
        Ok(law)
    }

    pub fn label(&self) -> String {
        match self {
            InnovationLaw::Gaussian { variance } => format!("gaussian:{variance}"),
            InnovationLaw::StudentT { df } => format!("t:{df}"),
        }
    }
}

/// `(master_seed, replication_index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub replication_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, replication_index: u64) -> Self {
        Self {
            master_seed,
            replication_index,
        }
    }

    /// Seed for replication `replication_index` of the cell labelled `cell_key`.
    /// The label, not the position of the cell in a plan, picks the stream.
    pub fn for_cell(master_seed: u64, cell_key: &str, replication_index: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"urtest/cell/");
        h.update(master_seed.to_le_bytes());
        h.update(cell_key.as_bytes());
        let digest = h.finalize();
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        Self::new(u64::from_le_bytes(word), replication_index)
    }

    /// Fresh generator positioned at the start of this replication's stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(b"urtest/stream/");
        h.update(self.master_seed.to_le_bytes());
        let key: [u8; 32] = h.finalize().into();
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.replication_index);
        rng
    }
}

/// Infinite i.i.d. sequence of draws from an [`InnovationLaw`].
pub struct InnovationStream {
    rng: ChaCha8Rng,
    law: InnovationLaw,
    chi2: Option<ChiSquared<f64>>,
}

impl InnovationStream {
    pub fn new(law: InnovationLaw, seed: SeedSpec) -> Result<Self> {
        law.validate()?;
        let chi2 = match law {
            InnovationLaw::StudentT { df } if !is_small_integer(df) => Some(
                ChiSquared::new(df).map_err(|e| Error::Input(format!("chi-square({df}): {e}")))?,
            ),
            _ => None,
        };
        Ok(Self {
            rng: seed.rng(),
            law,
            chi2,
        })
    }

    /// Gaussian draws use the ziggurat sampler, which is exact. Student t is
    /// `Z / sqrt(χ²_ν / ν)`, with χ²_ν a sum of ν squared normals for integer ν.
    pub fn next_draw(&mut self) -> f64 {
        match self.law {
            InnovationLaw::Gaussian { variance } => {
                let z: f64 = self.rng.sample(StandardNormal);
                z * variance.sqrt()
            }
            InnovationLaw::StudentT { df } => {
                let z: f64 = self.rng.sample(StandardNormal);
                let chi2 = match &self.chi2 {
                    Some(dist) => dist.sample(&mut self.rng),
                    None => (0..df as usize)
                        .map(|_| {
                            let g: f64 = self.rng.sample(StandardNormal);
                            g * g
                        })
                        .sum(),
                };
                z / (chi2 / df).sqrt()
            }
        }
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

fn is_small_integer(df: f64) -> bool {
    df.fract() == 0.0 && df <= 64.0
}

/// `count` i.i.d. innovations.
pub fn draw_innovations<T: Scalar>(law: InnovationLaw, count: usize, seed: SeedSpec) -> Result<TimeSeries<T>> {
    let raw = draw_raw(law, count, seed)?;
    TimeSeries::new(raw.into_iter().map(T::lit).collect())
}

pub(crate) fn draw_raw(law: InnovationLaw, count: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Input("innovation count must be at least 1".into()));
    }
    let mut stream = InnovationStream::new(law, seed)?;
    Ok((0..count).map(|_| stream.next_draw()).collect())
}
