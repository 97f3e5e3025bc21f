//! Harness configuration: a single JSON document combining provider
//! entries, generation tunables, prompt options, evaluation phrase lists,
//! and the workspace directory layout. Every field has a default, so an
//! absent file means "all defaults". Secrets are only ever named here (via
//! `api_key_env`), never stored.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::EvalConfig;
use crate::generator::GenConfig;
use crate::prompt::PromptConfig;
use crate::provider::ProviderConfig;

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "GRAPHGAUNTLET_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Workspace directory layout: one directory per pipeline stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkspacePaths {
    pub instances_dir: PathBuf,
    pub runs_dir: PathBuf,
    pub scores_dir: PathBuf,
    pub reports_dir: PathBuf,
}

impl Default for WorkspacePaths {
    fn default() -> Self {
        WorkspacePaths {
            instances_dir: PathBuf::from("instances"),
            runs_dir: PathBuf::from("runs"),
            scores_dir: PathBuf::from("scores"),
            reports_dir: PathBuf::from("reports"),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub providers: Vec<ProviderConfig>,
    pub generation: GenConfig,
    pub prompting: PromptConfig,
    pub evaluation: EvalConfig,
    pub paths: WorkspacePaths,
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let config: BenchConfig = serde_json::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })?;
        config.validate()?;
        Ok(config)
    }

    /// `--config` path, else `GRAPHGAUNTLET_CONFIG`, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        if let Some(path) = explicit {
            return Self::load(path);
        }
        if let Ok(env_path) = std::env::var(CONFIG_ENV) {
            if !env_path.is_empty() {
                return Self::load(Path::new(&env_path));
            }
        }
        Ok(BenchConfig::default())
    }

    pub fn provider(&self, name: &str) -> Option<&ProviderConfig> {
        self.providers.iter().find(|p| p.name == name)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.generation;
        if g.weight_min < 1 || g.weight_min > g.weight_max {
            return Err(ConfigError::Invalid(format!(
                "weight range [{}, {}] must satisfy 1 <= min <= max",
                g.weight_min, g.weight_max
            )));
        }
        if !(0.0..1.0).contains(&g.edge_deletion_prob) {
            return Err(ConfigError::Invalid(
                "edge_deletion_prob must be in [0, 1)".to_string(),
            ));
        }
        if g.extra_edge_factor <= 0.0 {
            return Err(ConfigError::Invalid("extra_edge_factor must be > 0".to_string()));
        }
        if g.rejection_budget == 0 {
            return Err(ConfigError::Invalid("rejection_budget must be >= 1".to_string()));
        }
        for provider in &self.providers {
            if provider.name.is_empty() {
                return Err(ConfigError::Invalid("provider with empty name".to_string()));
            }
            if provider.temperature < 0.0 {
                return Err(ConfigError::Invalid(format!(
                    "provider '{}': temperature must be >= 0",
                    provider.name
                )));
            }
            if provider.max_concurrency == 0 {
                return Err(ConfigError::Invalid(format!(
                    "provider '{}': max_concurrency must be >= 1",
                    provider.name
                )));
            }
        }
        Ok(())
    }
}
