use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cutoff::{CutoffConfig, GridSpec, MIN_DELTA};
use crate::geometry::CompactSetSpec;

/// A configuration problem, reported with the offending field.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.to_string(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerifySettings {
    #[serde(default = "default_inner")]
    pub inner: usize,
    #[serde(default = "default_outer")]
    pub outer: usize,
    #[serde(default = "default_chart_points")]
    pub chart_points: usize,
    #[serde(default = "default_verify_seed")]
    pub seed: u64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self { inner: 200, outer: 200, chart_points: 100, seed: 1 }
    }
}

fn default_inner() -> usize {
    200
}
fn default_outer() -> usize {
    200
}
fn default_chart_points() -> usize {
    100
}
fn default_verify_seed() -> u64 {
    1
}
fn default_k() -> usize {
    1
}
fn default_sigma() -> f64 {
    0.1
}
fn default_delta0() -> f64 {
    0.4
}
fn default_samples() -> usize {
    20_000
}
fn default_seed() -> u64 {
    42
}
fn default_alpha() -> u32 {
    1
}

/// Run configuration read from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_delta0")]
    pub delta0: f64,
    #[serde(default = "default_samples", alias = "S")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: u32,
    pub deltas: Vec<f64>,
    pub set: CompactSetSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub verify: VerifySettings,
    /// finite-difference step; defaults to 1e-3 (α = 1) or 3e-3 (α = 2)
    #[serde(default)]
    pub step: Option<f64>,
    /// accepted slope interval for `scaling`
    #[serde(default)]
    pub slope_band: Option<[f64; 2]>,
    /// prefix prepended to every output file name
    #[serde(default)]
    pub output_prefix: String,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::new("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=3).contains(&self.k) {
            return Err(ConfigError::new("k", format!("must be 1, 2 or 3, got {}", self.k)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(ConfigError::new("sigma", "must be positive"));
        }
        if !(self.delta0 > 0.0 && self.delta0.is_finite()) {
            return Err(ConfigError::new("delta0", "must be positive"));
        }
        if self.samples == 0 {
            return Err(ConfigError::new("samples", "must be positive"));
        }
        if !(self.alpha == 1 || self.alpha == 2) {
            return Err(ConfigError::new("alpha", format!("must be 1 or 2, got {}", self.alpha)));
        }
        if self.deltas.is_empty() {
            return Err(ConfigError::new("deltas", "must not be empty"));
        }
        for (i, &d) in self.deltas.iter().enumerate() {
            if !(d > MIN_DELTA && d < self.delta0) {
                return Err(ConfigError::new(
                    "deltas",
                    format!("deltas[{i}] = {d} must lie strictly inside ({MIN_DELTA}, delta0 = {})", self.delta0),
                ));
            }
        }
        if self.set.dim() != self.k {
            return Err(ConfigError::new(
                "set",
                format!("ball centres need k+1 = {} coordinates, got {}", self.k + 1, self.set.dim() + 1),
            ));
        }
        if self.grid.points == 0 {
            return Err(ConfigError::new("grid", "points must be positive"));
        }
        if !(self.grid.inner >= 0.0 && self.grid.outer > self.grid.inner) {
            return Err(ConfigError::new("grid", "need 0 <= inner < outer"));
        }
        if self.verify.inner == 0 || self.verify.outer == 0 {
            return Err(ConfigError::new("verify", "inner and outer counts must be positive"));
        }
        if let Some(s) = self.step {
            if !(crate::regularize::MIN_STEP..=crate::regularize::MAX_STEP).contains(&s) {
                return Err(ConfigError::new("step", format!("{s} outside [1e-5, 1e-2]")));
            }
        }
        if let Some([lo, hi]) = self.slope_band {
            if !(lo < hi) {
                return Err(ConfigError::new("slope_band", "lower bound must be below upper bound"));
            }
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        self.step.unwrap_or_else(|| crate::cutoff::default_step(self.alpha).unwrap())
    }

    /// Slope interval accepted by `scaling`: `[-1.5, -0.5]` for `α = 1`,
    /// `[-2.6, -1.4]` for `α = 2` unless configured.
    pub fn slope_band(&self) -> [f64; 2] {
        self.slope_band.unwrap_or(if self.alpha == 1 { [-1.5, -0.5] } else { [-2.6, -1.4] })
    }

    pub fn cutoff_config(&self) -> crate::error::Result<CutoffConfig> {
        CutoffConfig::calibrate(self.k, self.sigma, self.delta0, self.samples, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"deltas":[0.1],"set":{"balls":[{"center":[[1,0],[0,0]],"radius":0.05}]}}"#;

    #[test]
    fn defaults() {
        let cfg = RunConfig::parse(BASE).unwrap();
        assert_eq!((cfg.k, cfg.sigma, cfg.delta0, cfg.samples, cfg.seed), (1, 0.1, 0.4, 20_000, 42));
        assert_eq!(cfg.step(), 1e-3);
        assert_eq!(cfg.slope_band(), [-1.5, -0.5]);
        assert_eq!(cfg.grid.points, 400);
    }

    #[test]
    fn field_errors_name_the_field() {
        let bad_delta = BASE.replace("[0.1]", "[0.5]");
        assert_eq!(RunConfig::parse(&bad_delta).unwrap_err().field, "deltas");
        let bad_k = BASE.replace("{\"deltas\"", "{\"k\":2,\"deltas\"");
        assert_eq!(RunConfig::parse(&bad_k).unwrap_err().field, "set");
        let bad_k = BASE.replace("{\"deltas\"", "{\"k\":4,\"deltas\"");
        assert_eq!(RunConfig::parse(&bad_k).unwrap_err().field, "k");
        let unknown = BASE.replace("{\"deltas\"", "{\"bogus\":1,\"deltas\"");
        assert_eq!(RunConfig::parse(&unknown).unwrap_err().field, "config");
        let s_alias = BASE.replace("{\"deltas\"", "{\"S\":7,\"deltas\"");
        assert_eq!(RunConfig::parse(&s_alias).unwrap().samples, 7);
    }
}
