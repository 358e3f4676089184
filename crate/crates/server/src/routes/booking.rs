use std::collections::BTreeSet;

use axum::extract::State;
use axum::http::StatusCode;
use axum::Json;
use serde::{Deserialize, Serialize};
use stageseat_core::booking::{balance_of, Actor, Quote};
use stageseat_core::{seat_label_parse, BookingId, SeatId, ShowId};

use crate::error::ApiError;
use crate::extract::{ApiJson, ApiPath, ApiQuery, Authed};
use crate::state::AppState;
use crate::views::{BookingCreated, BookingView, CancelResponse};

#[derive(Debug, Deserialize)]
pub struct BookingRequest {
    pub show_id: ShowId,
    pub seats: Vec<String>,
    #[serde(default)]
    pub coins_redeemed: u64,
}

fn parse_seats(labels: &[String]) -> Result<BTreeSet<SeatId>, ApiError> {
    let mut seats = BTreeSet::new();
    for label in labels {
        let seat = seat_label_parse(label).map_err(|e| {
            ApiError::new(StatusCode::BAD_REQUEST, "InvalidSeat", format!("{label:?}: {e}"))
        })?;
        if !seats.insert(seat) {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "InvalidSeat",
                format!("seat {label} listed twice"),
            ));
        }
    }
    Ok(seats)
}

pub async fn create(
    State(state): State<AppState>,
    Authed(s): Authed,
    ApiJson(req): ApiJson<BookingRequest>,
) -> Result<(StatusCode, Json<BookingCreated>), ApiError> {
    let seats = parse_seats(&req.seats)?;
    let booking = state
        .engine()
        .book_seats(s.user_id, req.show_id, &seats, req.coins_redeemed, state.clock.now())?;
    let coin_balance = state.store.read(|t| balance_of(t, s.user_id));
    Ok((StatusCode::CREATED, Json(BookingCreated { booking, coin_balance })))
}

pub async fn cancel(
    State(state): State<AppState>,
    Authed(s): Authed,
    ApiPath(id): ApiPath<BookingId>,
) -> Result<Json<CancelResponse>, ApiError> {
    let actor = Actor {
        user_id: s.user_id,
        role: s.role,
    };
    let refund = state.engine().cancel_booking(actor, id, state.clock.now())?;
    let coin_balance = state.store.read(|t| balance_of(t, s.user_id));
    Ok(Json(CancelResponse { refund, coin_balance }))
}

#[derive(Debug, Serialize)]
pub struct BookingList {
    pub bookings: Vec<BookingView>,
}

/// Booking history, newest first.
pub async fn mine(State(state): State<AppState>, Authed(s): Authed) -> Json<BookingList> {
    state.store.read(|t| {
        let mut bookings: Vec<BookingView> = t
            .bookings
            .values()
            .filter(|b| b.user_id == s.user_id)
            .filter_map(|b| {
                let show = t.shows.get(&b.show_id)?;
                Some(BookingView {
                    booking: b.clone(),
                    movie_id: show.movie_id,
                    movie_title: t.movies.get(&show.movie_id).map(|m| m.title.clone()).unwrap_or_default(),
                    venue_id: show.venue_id,
                    venue_name: t.venues.get(&show.venue_id).map(|v| v.name.clone()).unwrap_or_default(),
                    starts_at: show.starts_at,
                })
            })
            .collect();
        bookings.sort_by_key(|b| std::cmp::Reverse(b.booking.booking_id));
        Json(BookingList { bookings })
    })
}

#[derive(Debug, Deserialize)]
pub struct QuoteParams {
    pub seats: u32,
    #[serde(default)]
    pub coins: u64,
}

/// Server-side price preview for the seat picker.
pub async fn quote(
    State(state): State<AppState>,
    Authed(s): Authed,
    ApiPath(id): ApiPath<ShowId>,
    ApiQuery(p): ApiQuery<QuoteParams>,
) -> Result<Json<Quote>, ApiError> {
    Ok(Json(state.engine().quote_for(id, s.user_id, p.seats, p.coins)?))
}
