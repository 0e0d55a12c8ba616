//! Run configuration: a flat JSON document, unknown keys rejected.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};

use photodetect_core::bayes::DEFAULT_GRID_POINTS;
use photodetect_core::{DetectorParams, FieldChannel, FlipFractions, JcParams};
use serde::Deserialize;

use crate::output::Format;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

fn default_omega_tau() -> f64 {
    FRAC_PI_2
}

fn default_field_dim() -> usize {
    2
}

fn default_n_points() -> usize {
    DEFAULT_GRID_POINTS
}

/// Detector, interaction, grid, RNG and output settings.
///
/// `flip_fractions[xi][mu]` is the share of `P(xi | mu)` that goes through a
/// chamber-induced level flip, `mu = 0` for `|g>` and `1` for `|e>`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub eps_g: f64,
    pub eps_e: f64,
    pub p1g: f64,
    pub p1e: f64,
    #[serde(default)]
    pub flip_fractions: [[f64; 2]; 3],
    #[serde(default = "default_omega_tau")]
    pub omega_tau: f64,
    #[serde(default = "default_field_dim")]
    pub field_dim: usize,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn from_json(path: &Path, text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(path, &text)
    }

    pub fn flips(&self) -> FlipFractions {
        FlipFractions(self.flip_fractions)
    }

    pub fn detector(&self) -> photodetect_core::Result<DetectorParams> {
        DetectorParams::new(self.eps_g, self.eps_e, self.p1g, self.p1e, &self.flips())
    }

    pub fn jc(&self) -> photodetect_core::Result<JcParams> {
        JcParams::new(self.omega_tau, self.field_dim)
    }

    pub fn channel(&self) -> photodetect_core::Result<FieldChannel> {
        Ok(FieldChannel::new(self.detector()?, self.jc()?))
    }
}
