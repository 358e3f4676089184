use std::ops::Deref;
use std::sync::Arc;

use stageseat_core::admin::{self, AdminError};
use stageseat_core::booking::BookingEngine;
use stageseat_core::sentiment::{Lexicon, LexiconError};
use stageseat_core::store::{Store, StoreError};
use stageseat_core::{Policy, Role};
use thiserror::Error;

use crate::auth::{hash_password, SessionStore};
use crate::clock::{Clock, SystemClock};
use crate::config::Config;

#[derive(Debug, Error)]
pub enum StartupError {
    #[error("opening store: {0}")]
    Store(#[from] StoreError),
    #[error("loading lexicon {path}: {source}")]
    Lexicon {
        path: std::path::PathBuf,
        source: LexiconError,
    },
    #[error("bootstrapping admin: {0}")]
    Admin(#[from] AdminError),
}

pub struct Shared {
    pub store: Store,
    pub policy: Policy,
    pub lexicon: Lexicon,
    pub sessions: SessionStore,
    pub clock: Arc<dyn Clock>,
    pub session_ttl_hours: i64,
    pub pbkdf2_iterations: u32,
    /// Verified against when the username is unknown so both login failures
    /// cost the same.
    pub decoy_digest: String,
}

/// Cheap-to-clone handle shared by every request.
#[derive(Clone)]
pub struct AppState(Arc<Shared>);

impl Deref for AppState {
    type Target = Shared;
    fn deref(&self) -> &Shared {
        &self.0
    }
}

impl AppState {
    pub fn from_config(cfg: &Config) -> Result<Self, StartupError> {
        Self::with_clock(cfg, Arc::new(SystemClock))
    }

    pub fn with_clock(cfg: &Config, clock: Arc<dyn Clock>) -> Result<Self, StartupError> {
        let store = match &cfg.database_path {
            Some(p) => Store::open(p, cfg.journal_sync)?,
            None => Store::in_memory(),
        };
        let lexicon = match &cfg.lexicon_path {
            Some(p) => load_lexicon(p)?,
            None => Lexicon::seed(),
        };
        let state = AppState(Arc::new(Shared {
            store,
            policy: cfg.policy.clone(),
            lexicon,
            sessions: SessionStore::default(),
            clock,
            session_ttl_hours: cfg.session_ttl_hours,
            pbkdf2_iterations: cfg.pbkdf2_iterations,
            decoy_digest: hash_password("decoy-password", cfg.pbkdf2_iterations),
        }));
        if let Some(boot) = &cfg.admin {
            let exists = state
                .store
                .read(|t| t.users.values().any(|u| u.username == boot.username));
            if !exists {
                let email = boot
                    .email
                    .clone()
                    .unwrap_or_else(|| format!("{}@localhost", boot.username));
                let digest = hash_password(&boot.password, cfg.pbkdf2_iterations);
                admin::insert_user(&state.store, &boot.username, &email, digest, Role::Admin, state.clock.now())?;
                tracing::info!(username = %boot.username, "created bootstrap admin");
            }
        }
        Ok(state)
    }

    pub fn engine(&self) -> BookingEngine<'_> {
        BookingEngine::new(&self.store, &self.policy)
    }
}

pub fn load_lexicon(path: &std::path::Path) -> Result<Lexicon, StartupError> {
    let wrap = |source| StartupError::Lexicon {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::open(path).map_err(|e| wrap(LexiconError::Io(e)))?;
    Lexicon::from_tsv(std::io::BufReader::new(file)).map_err(wrap)
}
