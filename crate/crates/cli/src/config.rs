//! Configuration merging: JSON file values first, command-line flags on
//! top. Unknown keys in config files are rejected.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use zeta_resonance::{Error, ResourceCaps, Result};

/// Everything a run can be parameterized by. All fields optional here;
/// each command validates the fields it needs after merging.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub alpha: Option<f64>,
    #[serde(rename = "T")]
    pub t_param: Option<f64>,
    pub t: Option<f64>,
    pub tau: Option<f64>,
    pub m: Option<u32>,
    pub r: Option<u32>,
    pub k: Option<usize>,
    pub x: Option<f64>,
    pub digits: Option<u32>,
    pub step: Option<f64>,
    pub refine: Option<u32>,
    pub mn_limit: Option<u64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
    pub lemma: Option<String>,
    pub method: Option<String>,
    pub grid_start: Option<f64>,
    pub grid_end: Option<f64>,
    pub grid_points: Option<u64>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub threads: Option<usize>,
    pub caps: Option<ResourceCaps>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("invalid config {}: {e}", path.display())))
    }

    /// Overlay `self` (flag values) on top of `base` (file values).
    pub fn over(self, base: ExperimentConfig) -> ExperimentConfig {
        macro_rules! pick {
            ($($f:ident),*) => {
                ExperimentConfig { $($f: self.$f.or(base.$f)),* }
            };
        }
        pick!(
            command, alpha, t_param, t, tau, m, r, k, x, digits, step, refine, mn_limit,
            samples, seed, mode, lemma, method, grid_start, grid_end, grid_points, out, csv,
            threads, caps
        )
    }

    pub fn caps(&self) -> ResourceCaps {
        self.caps.clone().unwrap_or_default()
    }

    pub fn require_alpha(&self) -> Result<f64> {
        self.alpha
            .ok_or_else(|| Error::invalid("missing required parameter: alpha"))
    }

    pub fn require_t_param(&self) -> Result<f64> {
        self.t_param
            .ok_or_else(|| Error::invalid("missing required parameter: T"))
    }
}
