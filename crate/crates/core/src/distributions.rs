//! Finite-support integer probability distributions.
//!
//! Replacement counts are integer random variables with a small finite range,
//! specified by a support vector and positive weights interpreted
//! proportionally. Means are exact rationals so that sign decisions made by
//! the regime classifier cannot suffer float error.

use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistributionError {
    #[error("support must contain at least one value")]
    EmptySupport,
    #[error("values and weights have different lengths ({values} vs {weights})")]
    LengthMismatch { values: usize, weights: usize },
    #[error("duplicate support value {0}")]
    DuplicateValue(i64),
    #[error("weight at index {index} is {weight}, must be strictly positive")]
    NonPositiveWeight { index: usize, weight: i64 },
}

/// An integer-valued law with finite support and proportional weights.
///
/// Immutable after construction; safe to share across workers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegerDistribution {
    values: Vec<i64>,
    weights: Vec<u64>,
    #[serde(skip)]
    cumulative: Vec<u64>,
    #[serde(skip)]
    total_weight: u64,
}

impl IntegerDistribution {
    /// Builds a law from distinct support values and strictly positive weights.
    ///
    /// Duplicate support values are rejected rather than merged, to surface
    /// configuration typos.
    pub fn new(values: Vec<i64>, weights: Vec<u64>) -> Result<Self, DistributionError> {
        if values.is_empty() {
            return Err(DistributionError::EmptySupport);
        }
        if values.len() != weights.len() {
            return Err(DistributionError::LengthMismatch {
                values: values.len(),
                weights: weights.len(),
            });
        }
        for (index, &weight) in weights.iter().enumerate() {
            if weight == 0 {
                return Err(DistributionError::NonPositiveWeight {
                    index,
                    weight: weight as i64,
                });
            }
        }
        let mut sorted = values.clone();
        sorted.sort_unstable();
        if let Some(dup) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(DistributionError::DuplicateValue(dup[0]));
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0u64;
        for &w in &weights {
            acc += w;
            cumulative.push(acc);
        }
        Ok(Self {
            values,
            weights,
            cumulative,
            total_weight: acc,
        })
    }

    /// Builds a law that always takes `value`.
    pub fn degenerate(value: i64) -> Self {
        Self::new(vec![value], vec![1]).expect("degenerate law is always valid")
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// Normalized probability of the `i`-th support value, as an exact rational.
    pub fn probability(&self, i: usize) -> Rational64 {
        Rational64::new(self.weights[i] as i64, self.total_weight as i64)
    }

    /// Support together with normalized probabilities.
    pub fn outcomes(&self) -> impl Iterator<Item = (i64, Rational64)> + '_ {
        (0..self.values.len()).map(|i| (self.values[i], self.probability(i)))
    }

    pub fn contains(&self, value: i64) -> bool {
        self.values.contains(&value)
    }

    /// Exact mean `sum(v_i w_i) / sum(w_i)`.
    pub fn mean(&self) -> Rational64 {
        let weighted: i64 = self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| v * w as i64)
            .sum();
        Rational64::new(weighted, self.total_weight as i64)
    }

    pub fn min_value(&self) -> i64 {
        *self.values.iter().min().expect("nonempty support")
    }

    pub fn max_value(&self) -> i64 {
        *self.values.iter().max().expect("nonempty support")
    }

    /// Inverse-CDF lookup for a uniform draw `u` in `[0,1)`: returns the value
    /// at the first index whose cumulative probability exceeds `u`.
    pub fn sample_with_uniform(&self, u: f64) -> i64 {
        let scaled = u * self.total_weight as f64;
        for (i, &cum) in self.cumulative.iter().enumerate() {
            if scaled < cum as f64 {
                return self.values[i];
            }
        }
        // u ~ 1.0 from rounding; fall back to the last value.
        *self.values.last().expect("nonempty support")
    }

    /// Draws one value; a pure function of the rng stream (one uniform per call).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        self.sample_with_uniform(rng.gen::<f64>())
    }
}

/// Serde surface for the JSON fragment `{"values": [...], "weights": [...]}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegerDistributionSpec {
    pub values: Vec<i64>,
    pub weights: Vec<u64>,
}

impl TryFrom<IntegerDistributionSpec> for IntegerDistribution {
    type Error = DistributionError;

    fn try_from(spec: IntegerDistributionSpec) -> Result<Self, Self::Error> {
        IntegerDistribution::new(spec.values, spec.weights)
    }
}
