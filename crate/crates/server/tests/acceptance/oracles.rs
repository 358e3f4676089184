//! Brute-force reference implementations, written from the written rules and
//! sharing no code with the library.

use std::collections::{HashMap, HashSet};

use stageseat_core::catalog::{SearchQuery, SortKey};
use stageseat_core::store::Tables;
use stageseat_core::{BookingStatus, MovieId, ShowId};

pub const SEED_TSV: &str = include_str!("../../../../lexicon/seed.tsv");

#[derive(Default)]
pub struct OracleLexicon {
    valence: HashMap<String, f64>,
    negators: HashSet<String>,
    modifiers: HashMap<String, f64>,
}

impl OracleLexicon {
    pub fn parse(tsv: &str) -> Self {
        let mut lex = OracleLexicon::default();
        for line in tsv.lines() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let (token, kind, value) = (cols[0].trim().to_lowercase(), cols[1].trim(), cols[2].trim());
            let value: f64 = value.parse().unwrap();
            lex.valence.remove(&token);
            lex.negators.remove(&token);
            lex.modifiers.remove(&token);
            match kind {
                "valence" => {
                    lex.valence.insert(token, value);
                }
                "negator" => {
                    lex.negators.insert(token);
                }
                "intensifier" | "downtoner" => {
                    lex.modifiers.insert(token, value);
                }
                other => panic!("unknown kind {other}"),
            }
        }
        lex
    }

    pub fn vocabulary(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .valence
            .keys()
            .chain(self.negators.iter())
            .chain(self.modifiers.keys())
            .cloned()
            .collect();
        v.sort();
        v
    }
}

pub fn oracle_tokens(text: &str) -> Vec<String> {
    let mut raw = Vec::new();
    let mut current = String::new();
    for ch in text.to_lowercase().chars() {
        if ch.is_alphanumeric() || ch == '\'' {
            current.push(ch);
        } else if !current.is_empty() {
            raw.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        raw.push(current);
    }
    let mut out = Vec::new();
    for tok in raw {
        if tok.len() > 3 && tok.ends_with("n't") {
            out.push(tok[..tok.len() - 3].to_string());
            out.push("n't".to_string());
        } else {
            out.push(tok);
        }
    }
    out
}

/// `(raw_sum, compound)`.
pub fn oracle_score(lex: &OracleLexicon, text: &str) -> (f64, f64) {
    let tokens = oracle_tokens(text);
    let mut raw = 0.0;
    for i in 0..tokens.len() {
        let Some(&base) = lex.valence.get(&tokens[i]) else { continue };
        let mut v = base;
        let mut j = i;
        while j > 0 && lex.negators.contains(&tokens[j - 1]) {
            j -= 1;
        }
        if j > 0 {
            if let Some(m) = lex.modifiers.get(&tokens[j - 1]) {
                v *= m;
            }
        }
        let lo = i.saturating_sub(3);
        if (lo..i).any(|k| lex.negators.contains(&tokens[k])) {
            v *= -0.75;
        }
        raw += v;
    }
    (raw, raw / (raw * raw + 15.0).sqrt())
}

pub fn oracle_label(compound: f64) -> &'static str {
    if compound >= 0.05 {
        "positive"
    } else if compound <= -0.05 {
        "negative"
    } else {
        "neutral"
    }
}

/// `None` where the query is invalid.
pub fn oracle_search(t: &Tables, q: &SearchQuery) -> Option<Vec<MovieId>> {
    if let (Some(a), Some(b)) = (q.date_from, q.date_to) {
        if a > b {
            return None;
        }
    }
    if let Some(r) = q.min_rating {
        if !(1.0..=5.0).contains(&r) {
            return None;
        }
    }
    let show_movie: HashMap<ShowId, MovieId> = t.shows.values().map(|s| (s.show_id, s.movie_id)).collect();
    let mut popularity: HashMap<MovieId, u64> = HashMap::new();
    for b in t.bookings.values() {
        if b.status == BookingStatus::Active {
            if let Some(m) = show_movie.get(&b.show_id) {
                *popularity.entry(*m).or_default() += 1;
            }
        }
    }
    let mut ratings: HashMap<MovieId, Vec<u8>> = HashMap::new();
    for r in t.reviews.values() {
        ratings.entry(r.movie_id).or_default().push(r.rating);
    }
    let mean = |m: MovieId| {
        ratings
            .get(&m)
            .map(|v| v.iter().map(|&x| f64::from(x)).sum::<f64>() / v.len() as f64)
    };
    let needle = q.text.clone().unwrap_or_default().to_lowercase();

    let mut rows: Vec<(MovieId, u32)> = Vec::new();
    let mut ids: Vec<&MovieId> = t.movies.keys().collect();
    ids.sort();
    for id in ids {
        let m = &t.movies[id];
        let has = |s: &str| s.to_lowercase().contains(&needle);
        let mut relevance = 0;
        if !needle.is_empty() {
            if has(&m.title) {
                relevance += 3;
            }
            if has(&m.director) || m.cast.iter().any(|c| has(c)) {
                relevance += 2;
            }
            if has(&m.description) {
                relevance += 1;
            }
            if relevance == 0 {
                continue;
            }
        }
        if let Some(g) = &q.genre {
            if !m.genres.iter().any(|x| x.to_lowercase() == g.to_lowercase()) {
                continue;
            }
        }
        if let Some(l) = &q.language {
            if m.language.to_lowercase() != l.to_lowercase() {
                continue;
            }
        }
        if q.date_from.is_some_and(|d| m.release_date < d) || q.date_to.is_some_and(|d| m.release_date > d) {
            continue;
        }
        if let Some(min) = q.min_rating {
            match mean(*id) {
                Some(r) if r >= min => {}
                _ => continue,
            }
        }
        rows.push((*id, relevance));
    }
    // rows are in id order, and a stable sort keeps that order on ties
    match q.sort {
        SortKey::Relevance => rows.sort_by(|a, b| b.1.cmp(&a.1)),
        SortKey::Popularity => rows.sort_by_key(|r| std::cmp::Reverse(popularity.get(&r.0).copied().unwrap_or(0))),
        SortKey::ReleaseDate => rows.sort_by_key(|r| std::cmp::Reverse(t.movies[&r.0].release_date)),
        SortKey::Rating => rows.sort_by(|a, b| {
            let (ra, rb) = (mean(a.0).unwrap_or(0.0), mean(b.0).unwrap_or(0.0));
            rb.partial_cmp(&ra).unwrap()
        }),
    }
    Some(rows.into_iter().map(|r| r.0).collect())
}

/// Smallest sample value whose count of values `<=` it reaches the rank
/// `ceil(hundredths * n / 10000)`.
pub fn oracle_percentile(sample: &[f64], hundredths: u64) -> f64 {
    let n = sample.len() as u64;
    let rank = (hundredths * n).div_ceil(10_000).max(1);
    let mut candidates: Vec<f64> = sample.to_vec();
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();
    for x in candidates {
        let at_most = sample.iter().filter(|&&v| v <= x).count() as u64;
        if at_most >= rank {
            return x;
        }
    }
    unreachable!("rank never exceeds n")
}
