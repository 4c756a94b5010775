use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::eval::RewardKind;
use crate::expr::{ConstraintConfig, LibraryMode};
use crate::fuzzy::Semantics;

/// Operator set the search draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(alias = "goedel", alias = "godel")]
    Goedel,
    #[serde(alias = "product")]
    Product,
    #[serde(alias = "lukasiewicz")]
    Lukasiewicz,
    #[serde(alias = "combined")]
    Combined,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Goedel, Method::Product, Method::Lukasiewicz, Method::Combined];

    pub fn library_mode(self) -> LibraryMode {
        match self {
            Method::Goedel => LibraryMode::Single(Semantics::Goedel),
            Method::Product => LibraryMode::Single(Semantics::Product),
            Method::Lukasiewicz => LibraryMode::Single(Semantics::Lukasiewicz),
            Method::Combined => LibraryMode::Combined,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Goedel => "Goedel",
            Method::Product => "Product",
            Method::Lukasiewicz => "Lukasiewicz",
            Method::Combined => "Combined",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.to_string().to_ascii_lowercase() == lower || (lower == "godel" && *m == Method::Goedel))
            .ok_or_else(|| format!("unknown method {s:?} (expected Goedel, Product, Lukasiewicz or Combined)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    #[default]
    Unconstrained,
    /// S-implication root only, none elsewhere.
    Constrained,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    /// Total expressions sampled over the run.
    pub n_samples: usize,
    /// Fraction of each batch that drives the update.
    pub epsilon: f64,
    pub learning_rate: f64,
    pub entropy_weight: f64,
    /// Expression output at or above this counts as a fraud prediction.
    pub threshold: f64,
    pub reward: RewardKind,
    pub mode: SearchMode,
    pub method: Method,
    pub hidden_size: usize,
    pub max_length: usize,
    pub min_length: usize,
    pub hall_of_fame_size: usize,
    pub seed: u64,
    /// Dataset columns left out of the library.
    pub exclude_features: Vec<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let c = ConstraintConfig::default();
        TrainConfig {
            batch_size: 500,
            n_samples: 200_000,
            epsilon: 0.05,
            learning_rate: 5e-4,
            entropy_weight: 5e-3,
            threshold: 0.5,
            reward: RewardKind::F1,
            mode: SearchMode::Unconstrained,
            method: Method::Lukasiewicz,
            hidden_size: 32,
            max_length: c.max_length,
            min_length: c.min_length,
            hall_of_fame_size: 20,
            seed: 0,
            exclude_features: crate::data::DEFAULT_EXCLUDED_FEATURES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl TrainConfig {
    pub fn constraints(&self) -> ConstraintConfig {
        ConstraintConfig {
            max_length: self.max_length,
            min_length: self.min_length,
            root_implication: self.mode == SearchMode::Constrained,
        }
    }

    pub fn n_batches(&self) -> usize {
        self.n_samples.div_ceil(self.batch_size.max(1))
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: String| Err(TrainError::Config(m));
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        if self.n_samples < self.batch_size {
            return bad(format!("n_samples {} is smaller than batch_size {}", self.n_samples, self.batch_size));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must be in (0, 1), got {}", self.epsilon));
        }
        if self.epsilon * (self.batch_size as f64) < 1.0 - 1e-9 {
            return bad(format!("epsilon * batch_size = {} keeps no samples", self.epsilon * self.batch_size as f64));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.entropy_weight >= 0.0 && self.entropy_weight.is_finite()) {
            return bad(format!("entropy_weight must be >= 0, got {}", self.entropy_weight));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold must be in (0, 1), got {}", self.threshold));
        }
        if self.hidden_size == 0 {
            return bad("hidden_size must be positive".into());
        }
        if self.hall_of_fame_size == 0 {
            return bad("hall_of_fame_size must be positive".into());
        }
        if self.min_length > self.max_length || self.max_length == 0 {
            return bad(format!("invalid length bounds {}..={}", self.min_length, self.max_length));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = TrainConfig::default();
        c.validate().unwrap();
        assert_eq!(c.n_batches(), 400);
        assert_eq!(c.exclude_features, ["month"]);
    }

    #[test]
    fn rejects_bad_values() {
        let base = TrainConfig::default();
        for c in [
            TrainConfig { n_samples: 10, ..base.clone() },
            TrainConfig { epsilon: 0.0, ..base.clone() },
            TrainConfig { epsilon: 0.001, ..base.clone() },
            TrainConfig { learning_rate: -1.0, ..base.clone() },
            TrainConfig { threshold: 1.0, ..base.clone() },
            TrainConfig { min_length: 40, ..base.clone() },
        ] {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn method_names() {
        assert_eq!("lukasiewicz".parse::<Method>().unwrap(), Method::Lukasiewicz);
        assert_eq!("Godel".parse::<Method>().unwrap(), Method::Goedel);
        assert!("fuzzy".parse::<Method>().is_err());
        assert_eq!(Method::Combined.library_mode(), LibraryMode::Combined);
    }

    #[test]
    fn batches_round_up() {
        let c = TrainConfig { n_samples: 1001, batch_size: 500, ..Default::default() };
        assert_eq!(c.n_batches(), 3);
    }
}
