//! Denoise configuration resolution: command-line flags override a TOML
//! config file, which overrides the built-in noise-level-keyed defaults.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use clqa_core::DenoiseConfig;

use crate::errors::{CliError, CliResult};

/// Optional per-field overrides; used both for the TOML file and the
/// command-line flags.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub sigma: Option<f64>,
    pub patch: Option<usize>,
    pub group: Option<usize>,
    pub rank: Option<usize>,
    pub rounds: Option<usize>,
    pub search_window: Option<usize>,
    pub stride: Option<usize>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, config: &mut DenoiseConfig) {
        if let Some(v) = self.sigma {
            config.sigma = v;
        }
        if let Some(v) = self.patch {
            config.patch = v;
        }
        if let Some(v) = self.group {
            config.group = v;
        }
        if let Some(v) = self.rank {
            config.rank = v;
        }
        if let Some(v) = self.rounds {
            config.rounds = v;
        }
        if let Some(v) = self.search_window {
            config.search_window = v;
        }
        if let Some(v) = self.stride {
            config.stride = v;
        }
        if let Some(v) = self.delta {
            config.delta = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
    }
}

pub fn load_config_file(path: &Path) -> CliResult<Overrides> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Defaults are keyed by the resolved noise level, so sigma is settled
/// first (flag, then file, then 50).
pub fn resolve(flags: &Overrides, file: Option<&Overrides>) -> DenoiseConfig {
    let sigma = flags
        .sigma
        .or(file.and_then(|f| f.sigma))
        .unwrap_or(50.0);
    let mut config = DenoiseConfig::for_sigma(sigma, 0);
    if let Some(f) = file {
        f.apply(&mut config);
    }
    flags.apply(&mut config);
    config
}
