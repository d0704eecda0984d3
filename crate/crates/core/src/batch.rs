use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleSpec;
use crate::resolvent::RegimeSpec;

/// What a batch of samples measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `[(z - M)^{-1}]_{11}` from matrix draws.
    G11,
    /// `[G]_{11}` drawn from the exact finite-N law (no matrices).
    ExactG11,
    /// `[G]_{11}` after the regime's affine rescaling.
    ScaledG11,
    /// Normalized trace of the resolvent.
    StieltjesTrace,
    /// `√N (g^N - g) / √(πρ)`.
    ScaledStieltjes,
    /// Draws from a closed-form [`crate::densities::DistributionModel`];
    /// real-valued laws occupy the real part.
    ModelDraw,
}

/// Tagged collection of complex samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleBatch {
    pub statistic: Statistic,
    pub ensemble: Option<EnsembleSpec>,
    pub regime: Option<RegimeSpec>,
    /// Matrix dimension, 0 for model draws.
    pub n: usize,
    pub z: Option<Complex64>,
    pub values: Vec<Complex64>,
    /// Base seed and half-open range of sample indices the batch covers.
    pub seed: u64,
    pub indices: std::ops::Range<u64>,
    /// Draws that were rejected and resampled.
    pub rejections: usize,
}

impl SampleBatch {
    pub fn model_draws(values: Vec<Complex64>, seed: u64) -> Self {
        let len = values.len() as u64;
        Self {
            statistic: Statistic::ModelDraw,
            ensemble: None,
            regime: None,
            n: 0,
            z: None,
            values,
            seed,
            indices: 0..len,
            rejections: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}
