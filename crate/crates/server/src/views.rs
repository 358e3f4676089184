//! Response shapes that differ from the stored records.

use serde::{Deserialize, Serialize};
use stageseat_core::catalog::{MovieStats, ScoreComponents, SeatGrid, ShowListing};
use stageseat_core::sentiment::AggregateSentiment;
use stageseat_core::*;

/// Account without its password digest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserView {
    pub user_id: UserId,
    pub username: String,
    pub email: String,
    pub role: Role,
    pub preferences: Preferences,
    pub created_at: Timestamp,
}

impl From<&UserAccount> for UserView {
    fn from(u: &UserAccount) -> Self {
        UserView {
            user_id: u.user_id,
            username: u.username.clone(),
            email: u.email.clone(),
            role: u.role,
            preferences: u.preferences.clone(),
            created_at: u.created_at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoginResponse {
    pub token: String,
    pub expires_at: Timestamp,
    pub user: UserView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieView {
    #[serde(flatten)]
    pub movie: Movie,
    pub mean_rating: Option<f64>,
    pub n_ratings: u32,
    pub popularity: u64,
    pub sentiment: Option<AggregateSentiment>,
}

impl MovieView {
    pub fn new(movie: Movie, stats: Option<&MovieStats>) -> Self {
        let s = stats.cloned().unwrap_or_default();
        MovieView {
            movie,
            mean_rating: s.mean_rating,
            n_ratings: s.n_ratings,
            popularity: s.popularity,
            sentiment: s.sentiment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieDetail {
    #[serde(flatten)]
    pub movie: MovieView,
    /// Shows that have not started yet.
    pub upcoming_shows: Vec<ShowListing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewView {
    #[serde(flatten)]
    pub review: Review,
    pub username: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewCreated {
    pub review: Review,
    pub coins_awarded: i64,
    pub coin_balance: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeatMap {
    #[serde(flatten)]
    pub grid: SeatGrid,
    pub movie_id: MovieId,
    pub venue_id: VenueId,
    pub starts_at: Timestamp,
    pub price_per_seat: Money,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookingView {
    #[serde(flatten)]
    pub booking: Booking,
    pub movie_id: MovieId,
    pub movie_title: String,
    pub venue_id: VenueId,
    pub venue_name: String,
    pub starts_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BookingCreated {
    pub booking: Booking,
    pub coin_balance: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CancelResponse {
    pub refund: stageseat_core::booking::Refund,
    pub coin_balance: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinsView {
    pub balance: i64,
    pub transactions: Vec<CoinTransaction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationView {
    pub movie_id: MovieId,
    pub title: String,
    pub score: f64,
    pub components: ScoreComponents,
}
