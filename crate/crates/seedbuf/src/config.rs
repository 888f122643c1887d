//! JSON grid configuration.
//!
//! ```json
//! {
//!   "networks": [
//!     {"name": "ba2000", "source": "ba", "n": 2000, "m": 4, "power": 0.5, "seed": 1},
//!     {"name": "ws", "source": "ws", "n": 1000, "nei": 2, "rewire_p": 0.1, "seed": 2},
//!     {"name": "karate", "source": "file", "path": "data/karate.txt"}
//!   ],
//!   "strategies": ["D", "D2"],
//!   "modes": ["OPS_Sq", "OPS_RSq", "OPS_BSq"],
//!   "pp_values": [0.05, 0.1],
//!   "sp_values": [0.05],
//!   "replications": 100,
//!   "master_seed": 42,
//!   "coupled": true
//! }
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use seedbuf_core::{SeedingMode, Strategy};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edgelist::LoadOptions;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub networks: Vec<NetworkSpec>,
    pub strategies: Vec<Strategy>,
    pub modes: Vec<SeedingMode>,
    pub pp_values: Vec<f64>,
    pub sp_values: Vec<f64>,
    #[serde(default = "default_replications")]
    pub replications: u32,
    pub master_seed: u64,
    /// Share one live-edge sample between the reference and the sequential
    /// run. `false` gives both runs independent coins.
    #[serde(default = "default_coupled")]
    pub coupled: bool,
}

fn default_replications() -> u32 {
    100
}

fn default_coupled() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub name: String,
    #[serde(flatten)]
    pub source: NetworkSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum NetworkSource {
    Ws { n: usize, nei: usize, rewire_p: f64, seed: u64 },
    Ba {
        n: usize,
        m: usize,
        #[serde(default = "default_power")]
        power: f64,
        seed: u64,
    },
    File {
        path: PathBuf,
        #[serde(default)]
        delimiter: Option<char>,
        #[serde(default)]
        index_base: u64,
        #[serde(default = "default_skip_prefix")]
        skip_prefix: String,
    },
}

fn default_power() -> f64 {
    1.0
}

fn default_skip_prefix() -> String {
    "#".into()
}

impl NetworkSource {
    pub fn load_options(&self) -> Option<LoadOptions> {
        match self {
            NetworkSource::File { delimiter, index_base, skip_prefix, .. } => Some(LoadOptions {
                delimiter: *delimiter,
                index_base: *index_base,
                skip_prefix: skip_prefix.clone(),
            }),
            _ => None,
        }
    }
}

impl GridConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: GridConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative network paths resolve against the
    /// config's directory.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(dir) = path.parent() {
            for net in &mut cfg.networks {
                if let NetworkSource::File { path: p, .. } = &mut net.source {
                    if p.is_relative() {
                        *p = dir.join(&*p);
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.networks.is_empty()
            || self.strategies.is_empty()
            || self.modes.is_empty()
            || self.pp_values.is_empty()
            || self.sp_values.is_empty()
        {
            return bad("networks, strategies, modes, pp_values and sp_values must be non-empty");
        }
        if self.replications == 0 {
            return bad("replications must be at least 1");
        }
        if self.modes.contains(&SeedingMode::SingleStage) {
            return bad("modes lists sequential schedules only; SS is always run as the reference");
        }
        if self.pp_values.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("pp_values must lie in [0, 1]");
        }
        if self.sp_values.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
            return bad("sp_values must lie in (0, 1]");
        }
        let mut names = HashSet::new();
        if !self.networks.iter().all(|n| names.insert(n.name.as_str())) {
            return bad("network names must be unique");
        }
        Ok(())
    }

    /// Number of records a fully successful run produces.
    pub fn record_count(&self) -> usize {
        self.networks.len()
            * self.strategies.len()
            * self.modes.len()
            * self.pp_values.len()
            * self.sp_values.len()
            * self.replications as usize
    }
}
