use axum::extract::State;
use axum::http::header::CONTENT_TYPE;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use stageseat_core::admin::{self, MovieInput, ShowUpdate, UserUpdate, VenueInput};
use stageseat_core::analytics::{self, GroupBy, ToCsv, Window};
use stageseat_core::store::RecordKind;
use stageseat_core::*;

use super::account::check_email;
use crate::error::ApiError;
use crate::extract::{ApiJson, ApiPath, ApiQuery};
use crate::state::AppState;
use crate::views::UserView;

pub async fn create_movie(
    State(state): State<AppState>,
    ApiJson(input): ApiJson<MovieInput>,
) -> Result<(StatusCode, Json<Movie>), ApiError> {
    Ok((StatusCode::CREATED, Json(admin::create_movie(&state.store, input)?)))
}

pub async fn update_movie(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<MovieId>,
    ApiJson(input): ApiJson<MovieInput>,
) -> Result<Json<Movie>, ApiError> {
    Ok(Json(admin::update_movie(&state.store, id, input)?))
}

pub async fn delete_movie(State(state): State<AppState>, ApiPath(id): ApiPath<MovieId>) -> Result<StatusCode, ApiError> {
    admin::delete_movie(&state.store, id)?;
    Ok(StatusCode::NO_CONTENT)
}

pub async fn create_venue(
    State(state): State<AppState>,
    ApiJson(input): ApiJson<VenueInput>,
) -> Result<(StatusCode, Json<Venue>), ApiError> {
    Ok((StatusCode::CREATED, Json(admin::create_venue(&state.store, input)?)))
}

pub async fn update_venue(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<VenueId>,
    ApiJson(input): ApiJson<VenueInput>,
) -> Result<Json<Venue>, ApiError> {
    Ok(Json(admin::update_venue(&state.store, id, input)?))
}

pub async fn delete_venue(State(state): State<AppState>, ApiPath(id): ApiPath<VenueId>) -> Result<StatusCode, ApiError> {
    admin::delete_venue(&state.store, id)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
pub struct ShowRequest {
    pub movie_id: MovieId,
    pub venue_id: VenueId,
    pub starts_at: Timestamp,
    pub price_per_seat_minor: u64,
}

pub async fn create_show(
    State(state): State<AppState>,
    ApiJson(req): ApiJson<ShowRequest>,
) -> Result<(StatusCode, Json<Show>), ApiError> {
    let price = Money::new(req.price_per_seat_minor, state.policy.currency_code.clone());
    let show = state
        .engine()
        .create_show(req.movie_id, req.venue_id, req.starts_at, price, state.clock.now())?;
    Ok((StatusCode::CREATED, Json(show)))
}

pub async fn update_show(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<ShowId>,
    ApiJson(update): ApiJson<ShowUpdate>,
) -> Result<Json<Show>, ApiError> {
    Ok(Json(admin::update_show(&state.store, id, update, state.clock.now())?))
}

pub async fn delete_show(State(state): State<AppState>, ApiPath(id): ApiPath<ShowId>) -> Result<StatusCode, ApiError> {
    admin::delete_show(&state.store, id)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Serialize)]
pub struct UserList {
    pub users: Vec<UserView>,
}

pub async fn list_users(State(state): State<AppState>) -> Json<UserList> {
    Json(UserList {
        users: state.store.read(|t| t.users.values().map(UserView::from).collect()),
    })
}

pub async fn get_user(State(state): State<AppState>, ApiPath(id): ApiPath<UserId>) -> Result<Json<UserView>, ApiError> {
    state
        .store
        .read(|t| t.users.get(&id).map(UserView::from))
        .map(Json)
        .ok_or_else(|| admin::AdminError::NotFound(RecordKind::User, id.0).into())
}

pub async fn update_user(
    State(state): State<AppState>,
    ApiPath(id): ApiPath<UserId>,
    ApiJson(update): ApiJson<UserUpdate>,
) -> Result<Json<UserView>, ApiError> {
    if let Some(e) = &update.email {
        check_email(e)?;
    }
    let user = admin::update_user(&state.store, id, update)?;
    state.sessions.set_role(user.user_id, user.role);
    Ok(Json(UserView::from(&user)))
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn render<R: Serialize + ToCsv>(report: R, format: Format) -> Result<Response, ApiError> {
    match format {
        Format::Json => Ok(Json(report).into_response()),
        Format::Csv => Ok(([(CONTENT_TYPE, "text/csv; charset=utf-8")], report.to_csv()?).into_response()),
    }
}

/// Open-ended bounds default to the whole timeline.
fn window(from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<Window, ApiError> {
    let from = from.map_or(Timestamp(i64::MIN), Timestamp::start_of);
    let to = to.map_or(Timestamp(i64::MAX), Timestamp::end_of);
    Ok(Window::new(from, to)?)
}

#[derive(Debug, Deserialize)]
pub struct SalesParams {
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    pub group_by: Option<GroupBy>,
    #[serde(default)]
    pub format: Format,
}

pub async fn sales(State(state): State<AppState>, ApiQuery(p): ApiQuery<SalesParams>) -> Result<Response, ApiError> {
    let w = window(p.from, p.to)?;
    let group_by = p.group_by.unwrap_or(GroupBy::Movie);
    let report = state
        .store
        .read(|t| analytics::sales_report(t, w, group_by, &state.policy.currency_code));
    render(report, p.format)
}

#[derive(Debug, Deserialize)]
pub struct OccupancyParams {
    pub venue_id: VenueId,
    pub date: Option<NaiveDate>,
    #[serde(default)]
    pub format: Format,
}

pub async fn occupancy(State(state): State<AppState>, ApiQuery(p): ApiQuery<OccupancyParams>) -> Result<Response, ApiError> {
    let date = p.date.unwrap_or_else(|| state.clock.now().date());
    let report = state.store.read(|t| analytics::occupancy_report(t, p.venue_id, date))?;
    render(report, p.format)
}

#[derive(Debug, Deserialize)]
pub struct ActivityParams {
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
    #[serde(default)]
    pub format: Format,
}

pub async fn activity(State(state): State<AppState>, ApiQuery(p): ApiQuery<ActivityParams>) -> Result<Response, ApiError> {
    let w = window(p.from, p.to)?;
    let report = state.store.read(|t| analytics::activity_report(t, w));
    render(report, p.format)
}

#[derive(Debug, Deserialize)]
pub struct SentimentParams {
    pub movie_id: MovieId,
    #[serde(default)]
    pub format: Format,
}

pub async fn sentiment(State(state): State<AppState>, ApiQuery(p): ApiQuery<SentimentParams>) -> Result<Response, ApiError> {
    let report = state.store.read(|t| analytics::sentiment_report(t, p.movie_id))?;
    render(report, p.format)
}
