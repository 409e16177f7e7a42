//! Degree-α entropies (Havrda–Charvát / Tsallis) and total uncertainty over
//! complete sets of complementary binary measurements.
//!
//! `H_α(p) = k (1 - Σ pᵢ^α) / (α - 1)` for α ≠ 1, and the Shannon limit
//! `-k Σ pᵢ log₂ pᵢ` at α = 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on probability sums and ranges.
pub const PROB_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyMeasure {
    alpha: f64,
    k: f64,
}

impl EntropyMeasure {
    pub fn new(alpha: f64, k: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidMeasure(format!("alpha must be > 0, got {alpha}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidMeasure(format!("k must be > 0, got {k}")));
        }
        Ok(Self { alpha, k })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn is_shannon(&self) -> bool {
        self.alpha == 1.0
    }

    /// Entropy of the binary distribution `(p, 1 - p)`.
    pub fn pair_entropy(&self, p: f64) -> Result<f64> {
        Ok(entropy(&Distribution::binary(p)?, self))
    }
}

/// The member of the family that assigns exactly one unit to a fair coin.
///
/// `k = (α - 1) / (1 - 2^{1-α})`, which gives `k = 2` at α = 2; the Shannon
/// limit uses `k = 1` with base-2 logarithms.
pub fn normalized_measure(alpha: f64) -> Result<EntropyMeasure> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidMeasure(format!("alpha must be > 0, got {alpha}")));
    }
    if alpha == 1.0 {
        return EntropyMeasure::new(1.0, 1.0);
    }
    let k = (alpha - 1.0) / (1.0 - 2f64.powf(1.0 - alpha));
    EntropyMeasure::new(alpha, k)
}

/// A finite probability distribution with at least two outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates `probs`. Entries within [`PROB_TOL`] of the admissible range
    /// and sums within [`PROB_TOL`] of one are clamped and renormalized;
    /// anything further out is rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "need at least 2 outcomes, got {}",
                probs.len()
            )));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("non-finite entry {bad}")));
        }
        if let Some(bad) = probs.iter().find(|&&p| !(-PROB_TOL..=1.0 + PROB_TOL).contains(&p)) {
            return Err(Error::InvalidDistribution(format!("entry {bad} outside [0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidDistribution(format!("distribution sum {sum}")));
        }
        let mut probs: Vec<f64> = probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        let sum: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= sum);
        Ok(Self { probs })
    }

    pub fn binary(p: f64) -> Result<Self> {
        Self::new(vec![p, 1.0 - p])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_deterministic(&self) -> bool {
        self.probs.contains(&1.0)
    }

    /// Product distribution of two independent systems.
    pub fn product(&self, other: &Distribution) -> Distribution {
        let probs = self
            .probs
            .iter()
            .flat_map(|&a| other.probs.iter().map(move |&b| a * b))
            .collect();
        Distribution { probs }
    }
}

pub fn entropy(d: &Distribution, m: &EntropyMeasure) -> f64 {
    entropy_of_slice(d.probs(), m).max(0.0)
}

/// Evaluates the entropy formula literally on arbitrary reals.
///
/// Used for post-selected pseudo-states of non-positive operators, whose
/// "probabilities" can leave [0, 1]. Negative entries with non-integer α give
/// NaN.
pub(crate) fn entropy_of_slice(probs: &[f64], m: &EntropyMeasure) -> f64 {
    if m.is_shannon() {
        -m.k * probs
            .iter()
            .filter(|&&p| p != 0.0)
            .map(|&p| p * p.log2())
            .sum::<f64>()
    } else {
        let power_sum: f64 = probs.iter().map(|&p| p.powf(m.alpha)).sum();
        m.k * (1.0 - power_sum) / (m.alpha - 1.0)
    }
}

/// Sum of binary entropies `H(pⱼ, 1 - pⱼ)` over a set of complementary
/// measurements, each given by its first-outcome probability `pⱼ`.
pub fn total_uncertainty(pairs: &[f64], m: &EntropyMeasure) -> Result<f64> {
    pairs.iter().map(|&p| m.pair_entropy(p)).sum()
}
