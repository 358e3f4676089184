//! Server configuration from a TOML file with `STAGESEAT_*` environment overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stageseat_core::Policy;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("environment variable {name}: cannot parse {value:?}")]
    Env { name: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdminBootstrap {
    pub username: String,
    pub password: String,
    #[serde(default)]
    pub email: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub listen: String,
    /// Journal file. `None` keeps everything in memory.
    pub database_path: Option<PathBuf>,
    /// fsync each committed transaction.
    pub journal_sync: bool,
    /// Lexicon TSV. `None` uses the built-in seed lexicon.
    pub lexicon_path: Option<PathBuf>,
    pub session_ttl_hours: i64,
    pub pbkdf2_iterations: u32,
    pub admin: Option<AdminBootstrap>,
    pub policy: Policy,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            listen: "127.0.0.1:8080".into(),
            database_path: None,
            journal_sync: false,
            lexicon_path: None,
            session_ttl_hours: 24,
            pbkdf2_iterations: 100_000,
            admin: None,
            policy: Policy::default(),
        }
    }
}

impl Config {
    /// Read `path` (if given), then apply environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Read {
                    path: p.to_path_buf(),
                    source,
                })?;
                toml::from_str(&text).map_err(|source| ConfigError::Parse {
                    path: p.to_path_buf(),
                    source,
                })?
            }
            None => Config::default(),
        };
        cfg.apply_env(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }

    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        fn parsed<T: std::str::FromStr>(
            var: &impl Fn(&str) -> Option<String>,
            name: &str,
            slot: &mut T,
        ) -> Result<(), ConfigError> {
            if let Some(v) = var(name) {
                *slot = v.trim().parse().map_err(|_| ConfigError::Env {
                    name: name.into(),
                    value: v,
                })?;
            }
            Ok(())
        }
        if let Some(v) = var("STAGESEAT_LISTEN") {
            self.listen = v;
        }
        if let Some(v) = var("STAGESEAT_DB") {
            self.database_path = Some(v.into());
        }
        if let Some(v) = var("STAGESEAT_LEXICON") {
            self.lexicon_path = Some(v.into());
        }
        parsed(&var, "STAGESEAT_JOURNAL_SYNC", &mut self.journal_sync)?;
        parsed(&var, "STAGESEAT_SESSION_TTL_HOURS", &mut self.session_ttl_hours)?;
        parsed(&var, "STAGESEAT_PBKDF2_ITERATIONS", &mut self.pbkdf2_iterations)?;
        let p = &mut self.policy;
        parsed(&var, "STAGESEAT_EARN_PER_SEAT", &mut p.earn_per_seat)?;
        parsed(&var, "STAGESEAT_REVIEW_EARN", &mut p.review_earn)?;
        parsed(&var, "STAGESEAT_COIN_VALUE_MINOR", &mut p.coin_value_minor)?;
        parsed(&var, "STAGESEAT_REDEEM_CAP_PCT", &mut p.redeem_cap_pct)?;
        parsed(&var, "STAGESEAT_CANCEL_CUTOFF_HOURS", &mut p.cancel_cutoff_hours)?;
        if let Some(v) = var("STAGESEAT_CURRENCY") {
            p.currency_code = v;
        }
        if let (Some(username), Some(password)) =
            (var("STAGESEAT_ADMIN_USER"), var("STAGESEAT_ADMIN_PASSWORD"))
        {
            self.admin = Some(AdminBootstrap {
                username,
                password,
                email: var("STAGESEAT_ADMIN_EMAIL"),
            });
        }
        Ok(())
    }
}
