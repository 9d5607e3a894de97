//! Key/value configuration file. Every key is optional; command-line flags
//! take precedence over the file, and the file over built-in defaults.
//!
//! ```toml
//! d = 100
//! beta_min = 0.1
//! iters = 20000000
//! seed = 7
//! mode = "both"
//! grid = [0.1, 0.2, 0.3]
//! workers = 8
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Environment variable that overrides the worker count.
pub const WORKERS_ENV: &str = "LIFTED_TEMPERING_WORKERS";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub c: Option<f64>,
    pub d: Option<usize>,
    pub beta_min: Option<f64>,
    pub iters: Option<u64>,
    pub seed: Option<u64>,
    /// `rev`, `nonrev` or `both`.
    pub mode: Option<String>,
    pub grid: Option<Vec<f64>>,
    pub grid_size: Option<usize>,
    pub replicates: Option<usize>,
    /// `A,B,C` for the volatility check.
    pub params: Option<String>,
    pub target_acc: Option<f64>,
    pub out: Option<String>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Worker count: the environment variable wins over the file; 0 means
    /// "let rayon decide".
    pub fn workers(&self) -> Result<usize> {
        workers_from(std::env::var(WORKERS_ENV).ok().as_deref(), self.workers)
    }
}

fn workers_from(env: Option<&str>, file: Option<usize>) -> Result<usize> {
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        Some(s) => s
            .parse()
            .map_err(|_| Error::Config(format!("{WORKERS_ENV}={s:?} is not a worker count"))),
        None => Ok(file.unwrap_or(0)),
    }
}
