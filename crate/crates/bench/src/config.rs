use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("mix entry {0:?} is not name=weight")]
    MixSyntax(String),
    #[error("unknown action {0:?} in mix (expected browse, search, book, review)")]
    UnknownAction(String),
    #[error("weight for {0} must be a finite number >= 0")]
    BadWeight(String),
    #[error("every mix weight is zero")]
    EmptyMix,
    #[error("users must be at least 1")]
    NoUsers,
    #[error("sweep steps must be non-empty and strictly ascending")]
    Steps,
    #[error("base url {0:?} must start with http:// or https://")]
    BaseUrl(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Browse,
    Search,
    Book,
    Review,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Browse, Action::Search, Action::Book, Action::Review];

    pub fn name(self) -> &'static str {
        match self {
            Action::Browse => "browse",
            Action::Search => "search",
            Action::Book => "book",
            Action::Review => "review",
        }
    }
}

/// Relative action weights. They need not sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mix {
    pub browse: f64,
    pub search: f64,
    pub book: f64,
    pub review: f64,
}

impl Default for Mix {
    fn default() -> Self {
        Mix {
            browse: 0.5,
            search: 0.2,
            book: 0.2,
            review: 0.1,
        }
    }
}

impl Mix {
    pub fn weight(&self, a: Action) -> f64 {
        match a {
            Action::Browse => self.browse,
            Action::Search => self.search,
            Action::Book => self.book,
            Action::Review => self.review,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for a in Action::ALL {
            let w = self.weight(a);
            if !w.is_finite() || w < 0.0 {
                return Err(ConfigError::BadWeight(a.name().into()));
            }
        }
        if Action::ALL.iter().all(|a| self.weight(*a) == 0.0) {
            return Err(ConfigError::EmptyMix);
        }
        Ok(())
    }
}

impl FromStr for Mix {
    type Err = ConfigError;

    /// `browse=0.5,search=0.2`. Unlisted actions get weight zero.
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let mut mix = Mix {
            browse: 0.0,
            search: 0.0,
            book: 0.0,
            review: 0.0,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| ConfigError::MixSyntax(part.into()))?;
            let name = name.trim();
            let w: f64 = value
                .trim()
                .parse()
                .map_err(|_| ConfigError::BadWeight(name.into()))?;
            let slot = match name {
                "browse" => &mut mix.browse,
                "search" => &mut mix.search,
                "book" => &mut mix.book,
                "review" => &mut mix.review,
                other => return Err(ConfigError::UnknownAction(other.into())),
            };
            *slot = w;
        }
        mix.validate()?;
        Ok(mix)
    }
}

impl fmt::Display for Mix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "browse={},search={},book={},review={}",
            self.browse, self.search, self.book, self.review
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub base_url: String,
    pub users: usize,
    pub duration: Duration,
    pub ramp: Duration,
    pub mix: Mix,
    pub seed: u64,
    pub think: Duration,
    pub request_timeout: Duration,
    /// Local server process to sample for CPU and RSS.
    pub monitor_pid: Option<u32>,
}

impl ScenarioConfig {
    pub fn new(base_url: impl Into<String>, users: usize, duration: Duration) -> Self {
        ScenarioConfig {
            base_url: base_url.into(),
            users,
            duration,
            ramp: Duration::ZERO,
            mix: Mix::default(),
            seed: 42,
            think: Duration::ZERO,
            request_timeout: Duration::from_secs(10),
            monitor_pid: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.users == 0 {
            return Err(ConfigError::NoUsers);
        }
        if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
            return Err(ConfigError::BaseUrl(self.base_url.clone()));
        }
        self.mix.validate()
    }
}

pub fn parse_steps(s: &str) -> Result<Vec<usize>, ConfigError> {
    let steps: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| ConfigError::Steps))
        .collect::<Result<_, _>>()?;
    check_steps(&steps)?;
    Ok(steps)
}

pub fn check_steps(steps: &[usize]) -> Result<(), ConfigError> {
    if steps.is_empty() || steps[0] == 0 || steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::Steps);
    }
    Ok(())
}
