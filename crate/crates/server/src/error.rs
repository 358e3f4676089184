//! JSON error bodies: `{"error": code, "message": text}`.

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use stageseat_core::admin::AdminError;
use stageseat_core::analytics::ReportError;
use stageseat_core::booking::BookingError;
use stageseat_core::catalog::CatalogError;
use stageseat_core::reviews::ReviewError;
use stageseat_core::store::{RecordKind, StoreError};
use stageseat_core::DomainError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    pub fn unauthorized() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "Unauthorized", "missing, unknown or expired session token")
    }

    pub fn forbidden() -> Self {
        Self::new(StatusCode::FORBIDDEN, "Forbidden", "admin role required")
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NotFound", message)
    }

    pub fn internal(err: impl std::fmt::Display) -> Self {
        tracing::error!(error = %err, "internal error");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", "internal server error")
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code.to_string(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

fn unknown(kind: &str, id: impl std::fmt::Display) -> ApiError {
    let code = match kind {
        "movie" => "UnknownMovie",
        "venue" => "UnknownVenue",
        "show" => "UnknownShow",
        "user" => "UnknownUser",
        "review" => "UnknownReview",
        _ => "NotFound",
    };
    ApiError::new(StatusCode::NOT_FOUND, code, format!("unknown {kind} {id}"))
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::ConstraintViolation(c) => {
                ApiError::new(StatusCode::CONFLICT, "ConstraintViolation", c)
            }
            StoreError::Conflict(m) => ApiError::new(StatusCode::CONFLICT, "Conflict", m),
            StoreError::Missing { kind, id } => unknown(kind_name(kind), id),
            other => ApiError::internal(other),
        }
    }
}

fn kind_name(kind: RecordKind) -> &'static str {
    match kind {
        RecordKind::User => "user",
        RecordKind::Movie => "movie",
        RecordKind::Venue => "venue",
        RecordKind::Show => "show",
        RecordKind::Booking => "booking",
        RecordKind::Review => "review",
        RecordKind::CoinTransaction => "coin transaction",
    }
}

impl From<DomainError> for ApiError {
    fn from(e: DomainError) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidAmount", e.to_string())
    }
}

impl From<BookingError> for ApiError {
    fn from(e: BookingError) -> Self {
        use BookingError as B;
        let msg = e.to_string();
        let (status, code) = match e {
            B::UnknownMovie(id) => return unknown("movie", id),
            B::UnknownVenue(id) => return unknown("venue", id),
            B::UnknownShow(id) => return unknown("show", id),
            B::UnknownUser(id) => return unknown("user", id),
            B::UnknownReview(id) => return unknown("review", id),
            B::Store(s) => return s.into(),
            B::Domain(d) => return d.into(),
            B::PastShowtime => (StatusCode::UNPROCESSABLE_ENTITY, "PastShowtime"),
            B::SeatTaken(_) => (StatusCode::CONFLICT, "SeatTaken"),
            B::Houseful => (StatusCode::CONFLICT, "Houseful"),
            B::ShowStarted => (StatusCode::UNPROCESSABLE_ENTITY, "ShowStarted"),
            B::InvalidSeat(_) => (StatusCode::BAD_REQUEST, "InvalidSeat"),
            B::NoSeats => (StatusCode::BAD_REQUEST, "NoSeats"),
            B::InsufficientCoins { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "InsufficientCoins"),
            B::NotFound(_) => (StatusCode::NOT_FOUND, "NotFound"),
            B::NotOwner => (StatusCode::FORBIDDEN, "NotOwner"),
            B::AlreadyCancelled => (StatusCode::CONFLICT, "AlreadyCancelled"),
            B::TooLateToCancel => (StatusCode::UNPROCESSABLE_ENTITY, "TooLateToCancel"),
            B::AlreadyRewarded => (StatusCode::CONFLICT, "AlreadyRewarded"),
        };
        ApiError::new(status, code, msg)
    }
}

impl From<ReviewError> for ApiError {
    fn from(e: ReviewError) -> Self {
        let msg = e.to_string();
        match e {
            ReviewError::UnknownMovie(id) => unknown("movie", id),
            ReviewError::UnknownUser(id) => unknown("user", id),
            ReviewError::InvalidRating(_) => ApiError::new(StatusCode::BAD_REQUEST, "InvalidRating", msg),
            ReviewError::DuplicateReview => ApiError::new(StatusCode::CONFLICT, "DuplicateReview", msg),
            ReviewError::Booking(b) => b.into(),
            ReviewError::Store(s) => s.into(),
        }
    }
}

impl From<CatalogError> for ApiError {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::InvalidQuery(m) => ApiError::new(StatusCode::BAD_REQUEST, "InvalidQuery", m),
            CatalogError::UnknownVenue(id) => unknown("venue", id),
            CatalogError::UnknownMovie(id) => unknown("movie", id),
            CatalogError::UnknownShow(id) => unknown("show", id),
            CatalogError::UnknownUser(id) => unknown("user", id),
        }
    }
}

impl From<ReportError> for ApiError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::InvalidWindow => ApiError::new(StatusCode::BAD_REQUEST, "InvalidWindow", e.to_string()),
            ReportError::UnknownVenue(id) => unknown("venue", id),
            ReportError::UnknownMovie(id) => unknown("movie", id),
            ReportError::Csv(m) => ApiError::internal(m),
        }
    }
}

impl From<AdminError> for ApiError {
    fn from(e: AdminError) -> Self {
        let msg = e.to_string();
        match e {
            AdminError::NotFound(kind, id) => unknown(kind_name(kind), id),
            AdminError::Invalid(_) => ApiError::new(StatusCode::BAD_REQUEST, "InvalidInput", msg),
            AdminError::Duplicate("username") => ApiError::new(StatusCode::CONFLICT, "DuplicateUsername", msg),
            AdminError::Duplicate("email") => ApiError::new(StatusCode::CONFLICT, "DuplicateEmail", msg),
            AdminError::Duplicate(_) => ApiError::new(StatusCode::CONFLICT, "Duplicate", msg),
            AdminError::InUse(_) => ApiError::new(StatusCode::CONFLICT, "InUse", msg),
            AdminError::Store(s) => s.into(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(r: PathRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}
