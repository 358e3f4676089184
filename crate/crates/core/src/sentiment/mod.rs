//! Lexicon-and-rules review sentiment.
//!
//! Each valence token is adjusted by an adjacent intensifier/downtoner and by
//! a negator in the three tokens before it. The adjusted sum `s` is squashed
//! to `s / sqrt(s^2 + 15)` and classified with a +/-0.05 neutral band.

mod lexicon;

pub use lexicon::{Lexicon, LexiconError, MAX_VALENCE};

use serde::{Deserialize, Serialize};

pub const NEGATION_WINDOW: usize = 3;
pub const NEGATION_FACTOR: f64 = -0.75;
pub const NORMALIZATION_ALPHA: f64 = 15.0;
pub const NEUTRAL_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

impl SentimentLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub raw_sum: f64,
    pub compound: f64,
    pub label: SentimentLabel,
    pub hit_count: u32,
}

impl SentimentScore {
    pub fn neutral() -> Self {
        SentimentScore {
            raw_sum: 0.0,
            compound: 0.0,
            label: SentimentLabel::Neutral,
            hit_count: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateSentiment {
    pub n_reviews: u32,
    pub n_positive: u32,
    pub n_negative: u32,
    pub n_neutral: u32,
    pub mean_compound: f64,
}

/// Lowercase, split on anything that is not a letter, digit or apostrophe,
/// and split a trailing `n't` into its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let mut tokens = Vec::new();
    for piece in lower.split(|c: char| !(c.is_alphanumeric() || c == '\'')) {
        if piece.is_empty() {
            continue;
        }
        match piece.strip_suffix("n't") {
            Some(stem) if !stem.is_empty() => {
                tokens.push(stem.to_string());
                tokens.push("n't".to_string());
            }
            _ => tokens.push(piece.to_string()),
        }
    }
    tokens
}

/// Map a raw valence sum into (-1, 1).
pub fn normalize(raw_sum: f64) -> f64 {
    // hypot keeps the ratio finite for very large sums
    raw_sum / raw_sum.hypot(NORMALIZATION_ALPHA.sqrt())
}

pub fn classify(compound: f64) -> SentimentLabel {
    if compound >= NEUTRAL_THRESHOLD {
        SentimentLabel::Positive
    } else if compound <= -NEUTRAL_THRESHOLD {
        SentimentLabel::Negative
    } else {
        SentimentLabel::Neutral
    }
}

pub fn score_tokens(lex: &Lexicon, tokens: &[String]) -> SentimentScore {
    let mut raw_sum = 0.0;
    let mut hit_count = 0u32;
    for (i, token) in tokens.iter().enumerate() {
        let Some(mut v) = lex.valence(token) else {
            continue;
        };
        hit_count += 1;

        let preceding = &tokens[..i];
        if let Some(m) = preceding
            .iter()
            .rev()
            .find(|t| !lex.is_negator(t))
            .and_then(|t| lex.modifier(t))
        {
            v *= m;
        }

        let window_start = i.saturating_sub(NEGATION_WINDOW);
        if tokens[window_start..i].iter().any(|t| lex.is_negator(t)) {
            v *= NEGATION_FACTOR;
        }
        raw_sum += v;
    }
    let compound = normalize(raw_sum);
    SentimentScore {
        raw_sum,
        compound,
        label: classify(compound),
        hit_count,
    }
}

pub fn score_text(lex: &Lexicon, text: &str) -> SentimentScore {
    score_tokens(lex, &tokenize(text))
}

pub fn aggregate_reviews<'a>(
    scores: impl IntoIterator<Item = &'a SentimentScore>,
) -> AggregateSentiment {
    let mut agg = AggregateSentiment {
        n_reviews: 0,
        n_positive: 0,
        n_negative: 0,
        n_neutral: 0,
        mean_compound: 0.0,
    };
    let mut total = 0.0;
    for s in scores {
        agg.n_reviews += 1;
        match s.label {
            SentimentLabel::Positive => agg.n_positive += 1,
            SentimentLabel::Negative => agg.n_negative += 1,
            SentimentLabel::Neutral => agg.n_neutral += 1,
        }
        total += s.compound;
    }
    if agg.n_reviews > 0 {
        agg.mean_compound = total / f64::from(agg.n_reviews);
    }
    agg
}
