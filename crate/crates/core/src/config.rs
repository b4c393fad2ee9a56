//! JSON configuration for urn schemes.
//!
//! ```json
//! {
//!   "A": 7, "B": 2,
//!   "a": {"values": [-5, -2, 4, 7], "weights": [1, 2, 2, 1]},
//!   "b": {"values": [-5, 0, 4], "weights": [2, 3, 1]},
//!   "alpha0": 30, "beta0": 30
//! }
//! ```
//!
//! Parsing is strict: unknown keys are rejected and every constraint failure
//! names the offending field.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DistributionError, IntegerDistribution};
use crate::urn::{SchemeError, UrnScheme};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {field}: {message}")]
    Invalid { field: String, message: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, message: impl ToString) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    pub values: Vec<i64>,
    pub weights: Vec<u64>,
}

/// The model parameters as they appear on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    #[serde(rename = "A")]
    pub a_total: i64,
    #[serde(rename = "B")]
    pub b_total: i64,
    pub a: DistributionConfig,
    pub b: DistributionConfig,
    pub alpha0: i64,
    pub beta0: i64,
}

/// Strictly parses a config document.
pub fn parse_config(text: &str) -> Result<SchemeConfig, ConfigError> {
    Ok(serde_json::from_str(text)?)
}

fn build_law(field: &str, cfg: &DistributionConfig) -> Result<IntegerDistribution, ConfigError> {
    IntegerDistribution::new(cfg.values.clone(), cfg.weights.clone()).map_err(|e| match e {
        DistributionError::NonPositiveWeight { index, .. } => {
            ConfigError::invalid(format!("{field}.weights[{index}]"), e)
        }
        DistributionError::DuplicateValue(_) => {
            ConfigError::invalid(format!("{field}.values"), e)
        }
        _ => ConfigError::invalid(field, e),
    })
}

impl SchemeConfig {
    /// Validates every constraint and builds the scheme (colors may be
    /// swapped to normalize `A >= B`; see [`UrnScheme::colors_swapped`]).
    pub fn build(&self) -> Result<UrnScheme, ConfigError> {
        let a_law = build_law("a", &self.a)?;
        let b_law = build_law("b", &self.b)?;
        if self.alpha0 < 0 {
            return Err(ConfigError::invalid("alpha0", "must be nonnegative"));
        }
        if self.beta0 < 0 {
            return Err(ConfigError::invalid("beta0", "must be nonnegative"));
        }
        UrnScheme::new(
            self.a_total,
            self.b_total,
            a_law,
            b_law,
            self.alpha0,
            self.beta0,
        )
        .map_err(|e| match &e {
            SchemeError::NonPositiveAddition(name, _) | SchemeError::AdditionTooLarge(name, _) => {
                ConfigError::invalid(*name, e)
            }
            SchemeError::SupportOutOfRange(name, _) => {
                ConfigError::invalid(format!("{name}.values"), e)
            }
            SchemeError::NegativeInitialCount(_) | SchemeError::EmptyUrn => {
                ConfigError::invalid("alpha0/beta0", e)
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
