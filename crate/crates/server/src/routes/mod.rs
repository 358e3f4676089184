use axum::http::StatusCode;
use axum::middleware::from_fn_with_state;
use axum::routing::{delete, get, post, put};
use axum::Router;
use tower_http::trace::TraceLayer;

use crate::error::ApiError;
use crate::extract::{require_admin, require_user};
use crate::state::AppState;

mod account;
mod admin;
mod booking;
mod catalog;

/// Every admin route as `(method, path template)`. The router is built from
/// the same handlers, and tests walk this list.
pub const ADMIN_ROUTES: &[(&str, &str)] = &[
    ("POST", "/api/admin/movies"),
    ("PUT", "/api/admin/movies/{id}"),
    ("DELETE", "/api/admin/movies/{id}"),
    ("POST", "/api/admin/venues"),
    ("PUT", "/api/admin/venues/{id}"),
    ("DELETE", "/api/admin/venues/{id}"),
    ("POST", "/api/admin/shows"),
    ("PUT", "/api/admin/shows/{id}"),
    ("DELETE", "/api/admin/shows/{id}"),
    ("GET", "/api/admin/users"),
    ("GET", "/api/admin/users/{id}"),
    ("PUT", "/api/admin/users/{id}"),
    ("GET", "/api/admin/reports/sales"),
    ("GET", "/api/admin/reports/occupancy"),
    ("GET", "/api/admin/reports/activity"),
    ("GET", "/api/admin/reports/sentiment"),
];

/// Routes that need a session of any role.
pub const USER_ROUTES: &[(&str, &str)] = &[
    ("GET", "/api/movies"),
    ("GET", "/api/movies/{id}"),
    ("GET", "/api/movies/{id}/reviews"),
    ("POST", "/api/movies/{id}/reviews"),
    ("GET", "/api/movies/{id}/shows"),
    ("GET", "/api/collections"),
    ("GET", "/api/venues"),
    ("GET", "/api/venues/{id}"),
    ("GET", "/api/venues/{id}/shows"),
    ("GET", "/api/shows/{id}/seats"),
    ("GET", "/api/shows/{id}/quote"),
    ("POST", "/api/bookings"),
    ("DELETE", "/api/bookings/{id}"),
    ("GET", "/api/me/bookings"),
    ("GET", "/api/me/profile"),
    ("PUT", "/api/me/profile"),
    ("GET", "/api/me/coins"),
    ("GET", "/api/recommendations"),
];

pub fn router(state: AppState) -> Router {
    let public = Router::new()
        .route("/api/register", post(account::register))
        .route("/api/login", post(account::login))
        .route("/api/policy", get(account::policy));

    let user = Router::new()
        .route("/api/movies", get(catalog::search_movies))
        .route("/api/movies/{id}", get(catalog::movie_detail))
        .route("/api/movies/{id}/reviews", get(catalog::list_reviews).post(catalog::post_review))
        .route("/api/movies/{id}/shows", get(catalog::movie_shows))
        .route("/api/collections", get(catalog::collections))
        .route("/api/venues", get(catalog::search_venues))
        .route("/api/venues/{id}", get(catalog::venue_detail))
        .route("/api/venues/{id}/shows", get(catalog::venue_shows))
        .route("/api/shows/{id}/seats", get(catalog::seats))
        .route("/api/shows/{id}/quote", get(booking::quote))
        .route("/api/bookings", post(booking::create))
        .route("/api/bookings/{id}", delete(booking::cancel))
        .route("/api/me/bookings", get(booking::mine))
        .route("/api/me/profile", get(account::profile).put(account::update_profile))
        .route("/api/me/coins", get(account::coins))
        .route("/api/recommendations", get(catalog::recommendations))
        .route_layer(from_fn_with_state(state.clone(), require_user));

    let admin = Router::new()
        .route("/api/admin/movies", post(admin::create_movie))
        .route("/api/admin/movies/{id}", put(admin::update_movie).delete(admin::delete_movie))
        .route("/api/admin/venues", post(admin::create_venue))
        .route("/api/admin/venues/{id}", put(admin::update_venue).delete(admin::delete_venue))
        .route("/api/admin/shows", post(admin::create_show))
        .route("/api/admin/shows/{id}", put(admin::update_show).delete(admin::delete_show))
        .route("/api/admin/users", get(admin::list_users))
        .route("/api/admin/users/{id}", get(admin::get_user).put(admin::update_user))
        .route("/api/admin/reports/sales", get(admin::sales))
        .route("/api/admin/reports/occupancy", get(admin::occupancy))
        .route("/api/admin/reports/activity", get(admin::activity))
        .route("/api/admin/reports/sentiment", get(admin::sentiment))
        .route_layer(from_fn_with_state(state.clone(), require_admin));

    Router::new()
        .merge(public)
        .merge(user)
        .merge(admin)
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "NoRoute", "no such route") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "MethodNotAllowed", "method not allowed")
        })
        .layer(TraceLayer::new_for_http())
        .with_state(state)
}
