use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use thiserror::Error;

pub const MAX_VALENCE: f64 = 4.0;

const SEED_TSV: &str = include_str!("../../../../lexicon/seed.tsv");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("reading lexicon: {0}")]
    Io(#[from] std::io::Error),
}

/// Token tables used by the scorer. Every token belongs to at most one table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    valences: HashMap<String, f64>,
    negators: HashSet<String>,
    intensifiers: HashMap<String, f64>,
    downtoners: HashMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Valence,
    Negator,
    Intensifier,
    Downtoner,
}

impl Lexicon {
    /// The lexicon shipped in `lexicon/seed.tsv`.
    pub fn seed() -> Self {
        Self::from_tsv(SEED_TSV.as_bytes()).expect("bundled seed lexicon is valid")
    }

    /// Parse `token<TAB>kind<TAB>value` lines. Blank lines and lines starting
    /// with `#` are skipped; a later entry for a token replaces any earlier one.
    pub fn from_tsv(source: impl BufRead) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let trimmed = line.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fail = |reason: String| LexiconError::Format {
                line: line_no,
                reason,
            };
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 3 {
                return Err(fail(format!("expected 3 tab-separated fields, got {}", fields.len())));
            }
            let token = fields[0].trim().to_lowercase();
            if token.is_empty() {
                return Err(fail("empty token".into()));
            }
            let kind = match fields[1].trim() {
                "valence" => Kind::Valence,
                "negator" => Kind::Negator,
                "intensifier" => Kind::Intensifier,
                "downtoner" => Kind::Downtoner,
                other => return Err(fail(format!("unknown kind {other:?}"))),
            };
            let value: f64 = fields[2]
                .trim()
                .parse()
                .map_err(|_| fail(format!("bad number {:?}", fields[2])))?;
            if !value.is_finite() {
                return Err(fail("value must be finite".into()));
            }
            match kind {
                Kind::Valence if value.abs() > MAX_VALENCE => {
                    return Err(fail(format!("valence {value} outside [-4, 4]")))
                }
                Kind::Intensifier if value <= 1.0 => {
                    return Err(fail(format!("intensifier multiplier {value} must be > 1")))
                }
                Kind::Downtoner if value <= 0.0 || value >= 1.0 => {
                    return Err(fail(format!("downtoner multiplier {value} must be in (0, 1)")))
                }
                _ => {}
            }
            lex.insert(token, kind, value);
        }
        Ok(lex)
    }

    fn insert(&mut self, token: String, kind: Kind, value: f64) {
        self.valences.remove(&token);
        self.negators.remove(&token);
        self.intensifiers.remove(&token);
        self.downtoners.remove(&token);
        match kind {
            Kind::Valence => {
                self.valences.insert(token, value);
            }
            Kind::Negator => {
                self.negators.insert(token);
            }
            Kind::Intensifier => {
                self.intensifiers.insert(token, value);
            }
            Kind::Downtoner => {
                self.downtoners.insert(token, value);
            }
        }
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valences.get(token).copied()
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    /// Multiplier for an intensifier or downtoner.
    pub fn modifier(&self, token: &str) -> Option<f64> {
        self.intensifiers
            .get(token)
            .or_else(|| self.downtoners.get(token))
            .copied()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
            && self.negators.is_empty()
            && self.intensifiers.is_empty()
            && self.downtoners.is_empty()
    }

    pub fn valence_tokens(&self) -> impl Iterator<Item = (&str, f64)> {
        self.valences.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn negator_tokens(&self) -> impl Iterator<Item = &str> {
        self.negators.iter().map(String::as_str)
    }

    pub fn modifier_tokens(&self) -> impl Iterator<Item = (&str, f64)> {
        self.intensifiers
            .iter()
            .chain(self.downtoners.iter())
            .map(|(k, v)| (k.as_str(), *v))
    }
}
