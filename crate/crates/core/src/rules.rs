//! Serialized form shared by every named rule: `{"name", "params", "seed"}`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDescriptor {
    pub name: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RuleDescriptor {
    pub fn new(name: &str) -> Self {
        RuleDescriptor {
            name: name.to_string(),
            params: Map::new(),
            seed: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub(crate) fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidRule(format!("rule '{}' needs a seed", self.name)))
    }

    pub(crate) fn param<T: serde::de::DeserializeOwned>(&self, key: &str) -> Result<T> {
        let v = self
            .params
            .get(key)
            .ok_or_else(|| Error::InvalidRule(format!("rule '{}' needs param '{key}'", self.name)))?;
        serde_json::from_value(v.clone())
            .map_err(|e| Error::InvalidRule(format!("rule '{}' param '{key}': {e}", self.name)))
    }

    /// Rejects params outside `allowed`.
    pub(crate) fn only_params(&self, allowed: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidRule(format!(
                "rule '{}' has unknown param '{k}'",
                self.name
            ))),
            None => Ok(()),
        }
    }

    pub(crate) fn unknown(&self) -> Error {
        Error::InvalidRule(format!("unknown rule name '{}'", self.name))
    }
}

pub(crate) fn check_probability(name: &str, q: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&q) {
        Ok(q)
    } else {
        Err(Error::InvalidRule(format!("{name}: probability {q} outside [0, 1]")))
    }
}
