//! Run configuration with flag > config file > default precedence.
//! The config file is TOML, located via --config or the
//! ARBOR_RANK_CONFIG environment variable.

use std::path::{Path, PathBuf};

#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub depth: u32,
    pub omega_width: u32,
    pub witness_depth: u32,
    pub budget_depth: u32,
    pub budget_vertices: usize,
    pub count: u32,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            depth: 6,
            omega_width: 3,
            witness_depth: 12,
            budget_depth: 10,
            budget_vertices: 100_000,
            count: 3,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    /// Loads defaults, then the config file if one is named by flag or
    /// environment. Flag overrides are applied by the caller.
    pub fn load(flag_path: Option<&Path>) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        let path: Option<PathBuf> = flag_path
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os("ARBOR_RANK_CONFIG").map(PathBuf::from));
        let Some(path) = path else {
            return Ok(cfg);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let value: toml::Value = text
            .parse()
            .map_err(|e| format!("bad config {}: {e}", path.display()))?;
        let get_int = |key: &str| value.get(key).and_then(toml::Value::as_integer);
        if let Some(v) = get_int("depth") {
            cfg.depth = v as u32;
        }
        if let Some(v) = get_int("omega_width") {
            cfg.omega_width = v as u32;
        }
        if let Some(v) = get_int("witness_depth") {
            cfg.witness_depth = v as u32;
        }
        if let Some(v) = get_int("budget_depth") {
            cfg.budget_depth = v as u32;
        }
        if let Some(v) = get_int("budget_vertices") {
            cfg.budget_vertices = v as usize;
        }
        if let Some(v) = get_int("count") {
            cfg.count = v as u32;
        }
        match value.get("format").and_then(toml::Value::as_str) {
            Some("text") => cfg.format = Format::Text,
            Some("json") => cfg.format = Format::Json,
            Some(other) => return Err(format!("bad config format value `{other}`")),
            None => {}
        }
        if cfg.omega_width < 1 {
            return Err("omega_width must be at least 1".to_string());
        }
        Ok(cfg)
    }
}
