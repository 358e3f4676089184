//! Read-only discovery over committed state: movie search, show listings,
//! seat maps, curated collections and recommendations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::*;
use crate::sentiment::{aggregate_reviews, AggregateSentiment, SentimentLabel};
use crate::store::Tables;

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("unknown venue {0}")]
    UnknownVenue(VenueId),
    #[error("unknown movie {0}")]
    UnknownMovie(MovieId),
    #[error("unknown show {0}")]
    UnknownShow(ShowId),
    #[error("unknown user {0}")]
    UnknownUser(UserId),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    #[default]
    Relevance,
    Popularity,
    ReleaseDate,
    Rating,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub text: Option<String>,
    pub genre: Option<String>,
    pub language: Option<String>,
    pub date_from: Option<NaiveDate>,
    pub date_to: Option<NaiveDate>,
    pub min_rating: Option<f64>,
    #[serde(default)]
    pub sort: SortKey,
}

impl SearchQuery {
    pub fn validate(&self) -> Result<(), CatalogError> {
        if let (Some(from), Some(to)) = (self.date_from, self.date_to) {
            if from > to {
                return Err(CatalogError::InvalidQuery("date_from is after date_to".into()));
            }
        }
        if let Some(r) = self.min_rating {
            if !(1.0..=5.0).contains(&r) {
                return Err(CatalogError::InvalidQuery("min_rating must be within [1, 5]".into()));
            }
        }
        Ok(())
    }
}

/// Per-movie figures derived from bookings and reviews.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MovieStats {
    pub popularity: u64,
    pub n_ratings: u32,
    pub mean_rating: Option<f64>,
    pub sentiment: Option<AggregateSentiment>,
}

pub fn movie_stats(t: &Tables) -> HashMap<MovieId, MovieStats> {
    let mut out: HashMap<MovieId, MovieStats> = HashMap::new();
    for b in t.bookings.values().filter(|b| b.is_active()) {
        if let Some(show) = t.shows.get(&b.show_id) {
            out.entry(show.movie_id).or_default().popularity += 1;
        }
    }
    let mut per_movie: HashMap<MovieId, Vec<&Review>> = HashMap::new();
    for r in t.reviews.values() {
        per_movie.entry(r.movie_id).or_default().push(r);
    }
    for (movie, reviews) in per_movie {
        let stats = out.entry(movie).or_default();
        stats.n_ratings = reviews.len() as u32;
        let sum: u32 = reviews.iter().map(|r| u32::from(r.rating)).sum();
        stats.mean_rating = Some(f64::from(sum) / reviews.len() as f64);
        stats.sentiment = Some(aggregate_reviews(reviews.iter().map(|r| &r.sentiment)));
    }
    out
}

fn contains_ci(haystack: &str, needle_lower: &str) -> bool {
    haystack.to_lowercase().contains(needle_lower)
}

fn relevance(m: &Movie, needle: &str) -> u32 {
    if needle.is_empty() {
        return 0;
    }
    let mut score = 0;
    if contains_ci(&m.title, needle) {
        score += 3;
    }
    if contains_ci(&m.director, needle) || m.cast.iter().any(|c| contains_ci(c, needle)) {
        score += 2;
    }
    if contains_ci(&m.description, needle) {
        score += 1;
    }
    score
}

fn desc_f64(a: f64, b: f64) -> Ordering {
    b.total_cmp(&a)
}

pub fn search_movies(t: &Tables, q: &SearchQuery) -> Result<Vec<Movie>, CatalogError> {
    q.validate()?;
    let stats = movie_stats(t);
    let needle = q.text.as_deref().unwrap_or("").to_lowercase();
    let genre = q.genre.as_ref().map(|g| g.to_lowercase());
    let language = q.language.as_ref().map(|l| l.to_lowercase());

    let mut hits: Vec<(&Movie, u32)> = t
        .movies
        .values()
        .filter_map(|m| {
            let rel = relevance(m, &needle);
            if !needle.is_empty() && rel == 0 {
                return None;
            }
            if let Some(g) = &genre {
                if !m.genres.iter().any(|mg| mg.to_lowercase() == *g) {
                    return None;
                }
            }
            if let Some(l) = &language {
                if m.language.to_lowercase() != *l {
                    return None;
                }
            }
            if q.date_from.is_some_and(|d| m.release_date < d) || q.date_to.is_some_and(|d| m.release_date > d) {
                return None;
            }
            if let Some(min) = q.min_rating {
                let mean = stats.get(&m.movie_id).and_then(|s| s.mean_rating);
                if !mean.is_some_and(|r| r >= min) {
                    return None;
                }
            }
            Some((m, rel))
        })
        .collect();

    let pop = |m: &Movie| stats.get(&m.movie_id).map_or(0, |s| s.popularity);
    let rating = |m: &Movie| stats.get(&m.movie_id).and_then(|s| s.mean_rating).unwrap_or(0.0);
    hits.sort_by(|(a, ra), (b, rb)| {
        let primary = match q.sort {
            SortKey::Relevance => rb.cmp(ra),
            SortKey::Popularity => pop(b).cmp(&pop(a)),
            SortKey::ReleaseDate => b.release_date.cmp(&a.release_date),
            SortKey::Rating => desc_f64(rating(a), rating(b)),
        };
        primary.then(a.movie_id.cmp(&b.movie_id))
    });
    Ok(hits.into_iter().map(|(m, _)| m.clone()).collect())
}

pub fn search_venues(t: &Tables, text: Option<&str>) -> Vec<Venue> {
    let needle = text.unwrap_or("").to_lowercase();
    t.venues
        .values()
        .filter(|v| needle.is_empty() || contains_ci(&v.name, &needle) || contains_ci(&v.address, &needle))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShowScope {
    Venue(VenueId),
    Movie(MovieId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShowListing {
    pub show: Show,
    pub capacity: u32,
    pub seats_remaining: u32,
}

/// Shows for a venue or movie, optionally limited to one UTC date, by start time.
pub fn list_shows(
    t: &Tables,
    scope: ShowScope,
    date: Option<NaiveDate>,
) -> Result<Vec<ShowListing>, CatalogError> {
    match scope {
        ShowScope::Venue(v) if !t.venues.contains_key(&v) => return Err(CatalogError::UnknownVenue(v)),
        ShowScope::Movie(m) if !t.movies.contains_key(&m) => return Err(CatalogError::UnknownMovie(m)),
        _ => {}
    }
    let mut out: Vec<ShowListing> = t
        .shows
        .values()
        .filter(|s| match scope {
            ShowScope::Venue(v) => s.venue_id == v,
            ShowScope::Movie(m) => s.movie_id == m,
        })
        .filter(|s| date.is_none_or(|d| s.starts_at.date() == d))
        .filter_map(|s| {
            let capacity = t.venues.get(&s.venue_id)?.capacity();
            Some(ShowListing {
                show: s.clone(),
                capacity,
                seats_remaining: capacity.saturating_sub(s.sold.len() as u32),
            })
        })
        .collect();
    out.sort_by_key(|l| (l.show.starts_at, l.show.show_id));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeatState {
    Free,
    Sold,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeatGrid {
    pub show_id: ShowId,
    pub rows: u32,
    pub cols: u32,
    pub seats_remaining: u32,
    pub houseful: bool,
    /// `cells[row][col]`
    pub cells: Vec<Vec<SeatState>>,
}

pub fn seat_availability(t: &Tables, show_id: ShowId) -> Result<SeatGrid, CatalogError> {
    let show = t.shows.get(&show_id).ok_or(CatalogError::UnknownShow(show_id))?;
    let venue = t
        .venues
        .get(&show.venue_id)
        .ok_or(CatalogError::UnknownVenue(show.venue_id))?;
    let cells: Vec<Vec<SeatState>> = (0..venue.rows)
        .map(|r| {
            (0..venue.cols)
                .map(|c| {
                    if show.sold.contains(&SeatId::new(r, c)) {
                        SeatState::Sold
                    } else {
                        SeatState::Free
                    }
                })
                .collect()
        })
        .collect();
    let remaining = venue.capacity().saturating_sub(show.sold.len() as u32);
    Ok(SeatGrid {
        show_id,
        rows: venue.rows,
        cols: venue.cols,
        seats_remaining: remaining,
        houseful: remaining == 0,
        cells,
    })
}

pub const TOP_RATED: &str = "Top Rated";
pub const AUDIENCE_FAVOURITES: &str = "Audience Favourites";
pub const NEW_RELEASES: &str = "New Releases";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collection {
    pub name: String,
    pub movie_ids: Vec<MovieId>,
}

pub fn curated_collections(t: &Tables, today: NaiveDate) -> Vec<Collection> {
    let stats = movie_stats(t);

    let mut top: Vec<(MovieId, f64)> = stats
        .iter()
        .filter_map(|(id, s)| {
            let mean = s.mean_rating?;
            (s.n_ratings >= 3 && mean >= 4.0).then_some((*id, mean))
        })
        .collect();
    top.sort_by(|a, b| desc_f64(a.1, b.1).then(a.0.cmp(&b.0)));

    let mut fav: Vec<(MovieId, f64)> = stats
        .iter()
        .filter_map(|(id, s)| {
            let agg = s.sentiment?;
            (agg.n_reviews >= 3 && agg.mean_compound >= 0.3).then_some((*id, agg.mean_compound))
        })
        .collect();
    fav.sort_by(|a, b| desc_f64(a.1, b.1).then(a.0.cmp(&b.0)));

    let mut new: Vec<(MovieId, NaiveDate)> = t
        .movies
        .values()
        .filter(|m| {
            let age = (today - m.release_date).num_days();
            (0..=30).contains(&age)
        })
        .map(|m| (m.movie_id, m.release_date))
        .collect();
    new.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    vec![
        Collection {
            name: TOP_RATED.into(),
            movie_ids: top.into_iter().map(|(id, _)| id).collect(),
        },
        Collection {
            name: AUDIENCE_FAVOURITES.into(),
            movie_ids: fav.into_iter().map(|(id, _)| id).collect(),
        },
        Collection {
            name: NEW_RELEASES.into(),
            movie_ids: new.into_iter().map(|(id, _)| id).collect(),
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecommendWeights {
    pub genre_affinity: f64,
    pub rating: f64,
    pub sentiment: f64,
}

impl Default for RecommendWeights {
    fn default() -> Self {
        RecommendWeights {
            genre_affinity: 0.4,
            rating: 0.3,
            sentiment: 0.3,
        }
    }
}

impl RecommendWeights {
    pub fn scaled(self, factor: f64) -> Self {
        RecommendWeights {
            genre_affinity: self.genre_affinity * factor,
            rating: self.rating * factor,
            sentiment: self.sentiment * factor,
        }
    }

    pub fn combine(&self, genre_affinity: f64, norm_rating: f64, sentiment_index: f64) -> f64 {
        self.genre_affinity * genre_affinity + self.rating * norm_rating + self.sentiment * sentiment_index
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreComponents {
    pub genre_affinity: f64,
    pub norm_rating: f64,
    pub sentiment_index: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecommendationScore {
    pub movie_id: MovieId,
    pub score: f64,
    pub components: ScoreComponents,
}

/// Components for one movie given the user's liked genres.
pub fn score_components(m: &Movie, liked: &BTreeSet<String>, stats: Option<&MovieStats>) -> ScoreComponents {
    let overlap = m.genres.intersection(liked).count();
    let genre_affinity = overlap as f64 / m.genres.len().max(1) as f64;
    let norm_rating = stats.and_then(|s| s.mean_rating).map_or(0.0, |r| r / 5.0);
    let sentiment_index = stats
        .and_then(|s| s.sentiment)
        .map_or(0.5, |a| (a.mean_compound + 1.0) / 2.0);
    ScoreComponents {
        genre_affinity,
        norm_rating,
        sentiment_index,
    }
}

/// Genres of movies the user rated at least 4, reviewed positively, or holds
/// an active booking for.
pub fn liked_genres(t: &Tables, user: UserId) -> BTreeSet<String> {
    let mut movies = BTreeSet::new();
    for r in t.reviews.values().filter(|r| r.user_id == user) {
        if r.rating >= 4 || r.sentiment.label == SentimentLabel::Positive {
            movies.insert(r.movie_id);
        }
    }
    movies.extend(booked_movies(t, user));
    movies
        .iter()
        .filter_map(|id| t.movies.get(id))
        .flat_map(|m| m.genres.iter().cloned())
        .collect()
}

fn booked_movies(t: &Tables, user: UserId) -> BTreeSet<MovieId> {
    t.bookings
        .values()
        .filter(|b| b.user_id == user && b.is_active())
        .filter_map(|b| t.shows.get(&b.show_id).map(|s| s.movie_id))
        .collect()
}

pub fn recommend(
    t: &Tables,
    user: UserId,
    k: usize,
    weights: &RecommendWeights,
) -> Result<Vec<RecommendationScore>, CatalogError> {
    if !t.users.contains_key(&user) {
        return Err(CatalogError::UnknownUser(user));
    }
    let stats = movie_stats(t);
    let booked = booked_movies(t, user);
    let cold = booked.is_empty() && !t.reviews.values().any(|r| r.user_id == user);
    let liked = liked_genres(t, user);

    let mut scored: Vec<(RecommendationScore, u64, f64)> = t
        .movies
        .values()
        .filter(|m| !booked.contains(&m.movie_id))
        .map(|m| {
            let s = stats.get(&m.movie_id);
            let c = score_components(m, &liked, s);
            let rec = RecommendationScore {
                movie_id: m.movie_id,
                score: weights.combine(c.genre_affinity, c.norm_rating, c.sentiment_index),
                components: c,
            };
            let popularity = s.map_or(0, |s| s.popularity);
            let rating = s.and_then(|s| s.mean_rating).unwrap_or(0.0);
            (rec, popularity, rating)
        })
        .collect();

    if cold {
        scored.sort_by(|a, b| {
            b.1.cmp(&a.1)
                .then(desc_f64(a.2, b.2))
                .then(a.0.movie_id.cmp(&b.0.movie_id))
        });
    } else {
        scored.sort_by(|a, b| desc_f64(a.0.score, b.0.score).then(a.0.movie_id.cmp(&b.0.movie_id)));
    }
    Ok(scored.into_iter().take(k).map(|(r, _, _)| r).collect())
}

/// Count of active bookings per movie.
pub fn popularity(t: &Tables) -> BTreeMap<MovieId, u64> {
    movie_stats(t)
        .into_iter()
        .map(|(id, s)| (id, s.popularity))
        .collect()
}
