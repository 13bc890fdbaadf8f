use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::descriptor::is_joint_name;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {message}")]
    Invalid {
        field: &'static str,
        message: String,
    },
}

/// Thresholds and tolerances of the analysis. Every field has a default;
/// a config file may set any subset of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmetryConfig {
    /// Axis position as a fraction of image width.
    pub axis_x_fraction: f64,
    /// Tolerance of the `on` relation as a fraction of image width.
    pub on_eps_fraction: f64,
    pub divergence_threshold: f64,
    pub similarity_threshold: f64,
    /// Feature layer used for perceptual similarity.
    pub similarity_layer: String,
    pub joint_pairs: Vec<(String, String)>,
    /// Tolerance in degrees for facing-direction symmetry.
    pub facing_tolerance_deg: f64,
}

pub const DEFAULT_JOINT_PAIRS: [(&str, &str); 6] = [
    ("left_shoulder", "right_shoulder"),
    ("left_elbow", "right_elbow"),
    ("left_wrist", "right_wrist"),
    ("left_hip", "right_hip"),
    ("left_knee", "right_knee"),
    ("left_ankle", "right_ankle"),
];

impl Default for SymmetryConfig {
    fn default() -> Self {
        Self {
            axis_x_fraction: 0.5,
            on_eps_fraction: 0.02,
            divergence_threshold: 0.10,
            similarity_threshold: 0.70,
            similarity_layer: "conv5".to_string(),
            joint_pairs: DEFAULT_JOINT_PAIRS
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            facing_tolerance_deg: 10.0,
        }
    }
}

impl SymmetryConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |field, message: String| Err(ConfigError::Invalid { field, message });
        if !(self.axis_x_fraction > 0.0 && self.axis_x_fraction < 1.0) {
            return invalid(
                "axis_x_fraction",
                format!("{} not in (0,1)", self.axis_x_fraction),
            );
        }
        if !(self.on_eps_fraction.is_finite() && self.on_eps_fraction >= 0.0) {
            return invalid(
                "on_eps_fraction",
                format!("{} must be finite and ≥ 0", self.on_eps_fraction),
            );
        }
        if !self.divergence_threshold.is_finite() {
            return invalid("divergence_threshold", "must be finite".into());
        }
        if !(-1.0..=1.0).contains(&self.similarity_threshold) {
            return invalid(
                "similarity_threshold",
                format!("{} not in [-1,1]", self.similarity_threshold),
            );
        }
        if self.similarity_layer.is_empty() {
            return invalid("similarity_layer", "must be non-empty".into());
        }
        if self.joint_pairs.is_empty() {
            return invalid("joint_pairs", "must be non-empty".into());
        }
        for (a, b) in &self.joint_pairs {
            for j in [a, b] {
                if !is_joint_name(j) {
                    return invalid("joint_pairs", format!("unknown joint `{j}`"));
                }
            }
        }
        if !(self.facing_tolerance_deg.is_finite() && self.facing_tolerance_deg >= 0.0) {
            return invalid("facing_tolerance_deg", "must be finite and ≥ 0".into());
        }
        Ok(())
    }

    /// Parses a TOML document; absent fields take their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: SymmetryConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    /// Hex SHA-256 over the canonical JSON form; equal configs hash equal.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
