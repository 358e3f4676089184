use axum::extract::State;
use axum::http::StatusCode;
use axum::Json;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use stageseat_core::catalog::{self, Collection, RecommendWeights, SearchQuery, ShowListing, ShowScope, SortKey};
use stageseat_core::reviews::submit_review;
use stageseat_core::booking::balance_of;
use stageseat_core::{MovieId, ShowId, Venue, VenueId};

use crate::error::ApiError;
use crate::extract::{ApiJson, ApiPath, ApiQuery, Authed};
use crate::state::AppState;
use crate::views::{MovieDetail, MovieView, RecommendationView, ReviewCreated, ReviewView, SeatMap};

#[derive(Debug, Default, Deserialize)]
pub struct MoviesParams {
    pub q: Option<String>,
    pub genre: Option<String>,
    pub language: Option<String>,
    pub date_from: Option<NaiveDate>,
    pub date_to: Option<NaiveDate>,
    pub min_rating: Option<f64>,
    pub sort: Option<SortKey>,
}

fn non_blank(s: Option<String>) -> Option<String> {
    s.filter(|s| !s.trim().is_empty())
}

#[derive(Debug, Serialize)]
pub struct MovieList {
    pub movies: Vec<MovieView>,
}

pub async fn search_movies(
    State(state): State<AppState>,
    ApiQuery(p): ApiQuery<MoviesParams>,
) -> Result<Json<MovieList>, ApiError> {
    let query = SearchQuery {
        text: non_blank(p.q),
        genre: non_blank(p.genre),
        language: non_blank(p.language),
        date_from: p.date_from,
        date_to: p.date_to,
        min_rating: p.min_rating,
        sort: p.sort.unwrap_or_default(),
    };
    state.store.read(|t| {
        let found = catalog::search_movies(t, &query)?;
        let stats = catalog::movie_stats(t);
        let movies = found
            .into_iter()
            .map(|m| {
                let s = stats.get(&m.movie_id);
                MovieView::new(m, s)
            })
            .collect();
        Ok(Json(MovieList { movies }))
    })
}

pub async fn movie_detail(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<MovieId>,
) -> Result<Json<MovieDetail>, ApiError> {
    let now = state.clock.now();
    state.store.read(|t| {
        let movie = t.movies.get(&id).cloned().ok_or(catalog::CatalogError::UnknownMovie(id))?;
        let stats = catalog::movie_stats(t);
        let upcoming_shows = catalog::list_shows(t, ShowScope::Movie(id), None)?
            .into_iter()
            .filter(|l| l.show.starts_at > now)
            .collect();
        Ok(Json(MovieDetail {
            movie: MovieView::new(movie, stats.get(&id)),
            upcoming_shows,
        }))
    })
}

#[derive(Debug, Serialize)]
pub struct ReviewList {
    pub reviews: Vec<ReviewView>,
}

pub async fn list_reviews(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<MovieId>,
) -> Result<Json<ReviewList>, ApiError> {
    state.store.read(|t| {
        if !t.movies.contains_key(&id) {
            return Err(catalog::CatalogError::UnknownMovie(id).into());
        }
        let mut reviews: Vec<ReviewView> = t
            .reviews
            .values()
            .filter(|r| r.movie_id == id)
            .map(|r| ReviewView {
                review: r.clone(),
                username: t.users.get(&r.user_id).map(|u| u.username.clone()).unwrap_or_default(),
            })
            .collect();
        reviews.sort_by_key(|r| std::cmp::Reverse(r.review.review_id));
        Ok(Json(ReviewList { reviews }))
    })
}

#[derive(Debug, Deserialize)]
pub struct ReviewRequest {
    pub rating: u8,
    #[serde(default)]
    pub text: String,
}

pub async fn post_review(
    State(state): State<AppState>,
    Authed(s): Authed,
    ApiPath(id): ApiPath<MovieId>,
    ApiJson(req): ApiJson<ReviewRequest>,
) -> Result<(StatusCode, Json<ReviewCreated>), ApiError> {
    let (review, coins) = submit_review(
        &state.store,
        &state.policy,
        &state.lexicon,
        s.user_id,
        id,
        req.rating,
        &req.text,
        state.clock.now(),
    )?;
    let coin_balance = state.store.read(|t| balance_of(t, s.user_id));
    Ok((
        StatusCode::CREATED,
        Json(ReviewCreated {
            review,
            coins_awarded: coins.delta,
            coin_balance,
        }),
    ))
}

#[derive(Debug, Default, Deserialize)]
pub struct DateParam {
    pub date: Option<NaiveDate>,
}

#[derive(Debug, Serialize)]
pub struct ShowList {
    pub shows: Vec<ShowListing>,
}

pub async fn movie_shows(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<MovieId>,
    ApiQuery(p): ApiQuery<DateParam>,
) -> Result<Json<ShowList>, ApiError> {
    let shows = state.store.read(|t| catalog::list_shows(t, ShowScope::Movie(id), p.date))?;
    Ok(Json(ShowList { shows }))
}

pub async fn venue_shows(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<VenueId>,
    ApiQuery(p): ApiQuery<DateParam>,
) -> Result<Json<ShowList>, ApiError> {
    let shows = state.store.read(|t| catalog::list_shows(t, ShowScope::Venue(id), p.date))?;
    Ok(Json(ShowList { shows }))
}

#[derive(Debug, Serialize)]
pub struct CollectionList {
    pub collections: Vec<Collection>,
}

pub async fn collections(State(state): State<AppState>) -> Json<CollectionList> {
    let today = state.clock.now().date();
    Json(CollectionList {
        collections: state.store.read(|t| catalog::curated_collections(t, today)),
    })
}

#[derive(Debug, Default, Deserialize)]
pub struct VenueParams {
    pub q: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct VenueList {
    pub venues: Vec<Venue>,
}

pub async fn search_venues(State(state): State<AppState>, ApiQuery(p): ApiQuery<VenueParams>) -> Json<VenueList> {
    let q = non_blank(p.q);
    Json(VenueList {
        venues: state.store.read(|t| catalog::search_venues(t, q.as_deref())),
    })
}

pub async fn venue_detail(State(state): State<AppState>, ApiPath(id): ApiPath<VenueId>) -> Result<Json<Venue>, ApiError> {
    state
        .store
        .read(|t| t.venues.get(&id).cloned())
        .map(Json)
        .ok_or_else(|| catalog::CatalogError::UnknownVenue(id).into())
}

pub async fn seats(State(state): State<AppState>, ApiPath(id): ApiPath<ShowId>) -> Result<Json<SeatMap>, ApiError> {
    state.store.read(|t| {
        let grid = catalog::seat_availability(t, id)?;
        let show = &t.shows[&id];
        Ok(Json(SeatMap {
            grid,
            movie_id: show.movie_id,
            venue_id: show.venue_id,
            starts_at: show.starts_at,
            price_per_seat: show.price_per_seat.clone(),
        }))
    })
}

#[derive(Debug, Deserialize)]
pub struct RecommendParams {
    pub k: Option<usize>,
}

pub const MAX_RECOMMENDATIONS: usize = 100;

#[derive(Debug, Serialize)]
pub struct RecommendationList {
    pub recommendations: Vec<RecommendationView>,
}

pub async fn recommendations(
    State(state): State<AppState>,
    Authed(s): Authed,
    ApiQuery(p): ApiQuery<RecommendParams>,
) -> Result<Json<RecommendationList>, ApiError> {
    let k = p.k.unwrap_or(10);
    if !(1..=MAX_RECOMMENDATIONS).contains(&k) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "InvalidQuery",
            format!("k must be within 1..={MAX_RECOMMENDATIONS}"),
        ));
    }
    state.store.read(|t| {
        let recs = catalog::recommend(t, s.user_id, k, &RecommendWeights::default())?;
        let recommendations = recs
            .into_iter()
            .map(|r| RecommendationView {
                movie_id: r.movie_id,
                title: t.movies.get(&r.movie_id).map(|m| m.title.clone()).unwrap_or_default(),
                score: r.score,
                components: r.components,
            })
            .collect();
        Ok(Json(RecommendationList { recommendations }))
    })
}
