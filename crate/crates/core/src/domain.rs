//! Domain records shared by every part of the service.
//!
//! All stored money is kept in integer minor units, all instants as UTC epoch
//! milliseconds and calendar dates as ISO-8601 strings.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sentiment::SentimentScore;

/// Value of a single coin in minor currency units (10 coins = 1.00).
pub const COIN_VALUE_MINOR: u64 = 10;

pub const MAX_ROWS: u32 = 26;
pub const MAX_COLS: u32 = 99;

macro_rules! id_type {
    ($($(#[$meta:meta])* $name:ident),* $(,)?) => {$(
        $(#[$meta])*
        #[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    )*};
}

id_type!(UserId, MovieId, VenueId, ShowId, BookingId, ReviewId, TxnId);

/// Instant in UTC epoch milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const MS_PER_HOUR: i64 = 3_600_000;
    pub const MS_PER_DAY: i64 = 86_400_000;

    pub fn now() -> Self {
        Timestamp(Utc::now().timestamp_millis())
    }

    pub fn plus_hours(self, hours: i64) -> Self {
        Timestamp(self.0 + hours * Self::MS_PER_HOUR)
    }

    pub fn plus_days(self, days: i64) -> Self {
        Timestamp(self.0 + days * Self::MS_PER_DAY)
    }

    /// UTC calendar date containing this instant.
    pub fn date(self) -> NaiveDate {
        DateTime::<Utc>::from_timestamp_millis(self.0)
            .map(|dt| dt.date_naive())
            .unwrap_or_default()
    }

    /// Midnight UTC at the start of `date`.
    pub fn start_of(date: NaiveDate) -> Self {
        Timestamp(
            date.and_hms_opt(0, 0, 0)
                .expect("midnight is valid")
                .and_utc()
                .timestamp_millis(),
        )
    }

    /// Last millisecond of `date` in UTC.
    pub fn end_of(date: NaiveDate) -> Self {
        Timestamp(Self::start_of(date).0 + Self::MS_PER_DAY - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("seat row {row} / column {col} is outside the labelable range")]
    OutOfRange { row: u32, col: u32 },
    #[error("malformed seat label {0:?}")]
    ParseError(String),
    #[error("discount of {discount} exceeds subtotal {subtotal}")]
    DiscountExceedsSubtotal { subtotal: u64, discount: u64 },
    #[error("currency mismatch: {0} vs {1}")]
    CurrencyMismatch(String, String),
    #[error("arithmetic overflow")]
    Overflow,
}

/// Non-negative amount in minor currency units.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Money {
    pub amount_minor: u64,
    pub currency_code: String,
}

impl Money {
    pub fn new(amount_minor: u64, currency_code: impl Into<String>) -> Self {
        Money {
            amount_minor,
            currency_code: currency_code.into(),
        }
    }

    pub fn zero(currency_code: impl Into<String>) -> Self {
        Self::new(0, currency_code)
    }

    pub fn checked_add(&self, other: &Money) -> Result<Money, DomainError> {
        self.same_currency(other)?;
        let amount = self
            .amount_minor
            .checked_add(other.amount_minor)
            .ok_or(DomainError::Overflow)?;
        Ok(Money::new(amount, self.currency_code.clone()))
    }

    /// Subtraction that refuses to go below zero.
    pub fn checked_sub(&self, other: &Money) -> Option<Money> {
        if self.currency_code != other.currency_code {
            return None;
        }
        self.amount_minor
            .checked_sub(other.amount_minor)
            .map(|a| Money::new(a, self.currency_code.clone()))
    }

    pub fn times(&self, n: u64) -> Result<Money, DomainError> {
        let amount = self
            .amount_minor
            .checked_mul(n)
            .ok_or(DomainError::Overflow)?;
        Ok(Money::new(amount, self.currency_code.clone()))
    }

    fn same_currency(&self, other: &Money) -> Result<(), DomainError> {
        if self.currency_code == other.currency_code {
            Ok(())
        } else {
            Err(DomainError::CurrencyMismatch(
                self.currency_code.clone(),
                other.currency_code.clone(),
            ))
        }
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{:02} {}",
            self.amount_minor / 100,
            self.amount_minor % 100,
            self.currency_code
        )
    }
}

/// Subtract the value of `coins_redeemed` from `subtotal`.
pub fn apply_discount(
    subtotal: &Money,
    coins_redeemed: u64,
    coin_value_minor: u64,
) -> Result<Money, DomainError> {
    let discount = coins_redeemed
        .checked_mul(coin_value_minor)
        .ok_or(DomainError::Overflow)?;
    subtotal
        .amount_minor
        .checked_sub(discount)
        .map(|a| Money::new(a, subtotal.currency_code.clone()))
        .ok_or(DomainError::DiscountExceedsSubtotal {
            subtotal: subtotal.amount_minor,
            discount,
        })
}

/// Zero-based seat coordinate. Labels read `A1` for `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeatId {
    pub row: u32,
    pub col: u32,
}

impl SeatId {
    pub fn new(row: u32, col: u32) -> Self {
        SeatId { row, col }
    }

    pub fn label(&self) -> Result<String, DomainError> {
        seat_label_encode(*self)
    }
}

pub fn seat_label_encode(seat: SeatId) -> Result<String, DomainError> {
    if seat.row >= MAX_ROWS || seat.col >= MAX_COLS {
        return Err(DomainError::OutOfRange {
            row: seat.row,
            col: seat.col,
        });
    }
    let letter = char::from(b'A' + seat.row as u8);
    Ok(format!("{letter}{}", seat.col + 1))
}

pub fn seat_label_parse(label: &str) -> Result<SeatId, DomainError> {
    let bad = || DomainError::ParseError(label.to_string());
    let mut chars = label.chars();
    let letter = chars.next().ok_or_else(bad)?;
    if !letter.is_ascii_uppercase() {
        return Err(bad());
    }
    let digits = chars.as_str();
    if digits.is_empty()
        || digits.len() > 2
        || digits.starts_with('0')
        || !digits.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let number: u32 = digits.parse().map_err(|_| bad())?;
    Ok(SeatId::new(u32::from(letter as u8 - b'A'), number - 1))
}

impl fmt::Display for SeatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match seat_label_encode(*self) {
            Ok(label) => f.write_str(&label),
            Err(_) => write!(f, "({},{})", self.row, self.col),
        }
    }
}

impl FromStr for SeatId {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        seat_label_parse(s)
    }
}

impl Serialize for SeatId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let label = seat_label_encode(*self).map_err(serde::ser::Error::custom)?;
        serializer.serialize_str(&label)
    }
}

impl<'de> Deserialize<'de> for SeatId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let label = String::deserialize(deserializer)?;
        seat_label_parse(&label).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Admin,
}

impl Role {
    /// Admin satisfies every requirement; user only the user requirement.
    pub fn satisfies(self, required: Role) -> bool {
        matches!((self, required), (Role::Admin, _) | (Role::User, Role::User))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preferences {
    pub notifications: bool,
    pub recommendations: bool,
}

impl Default for Preferences {
    fn default() -> Self {
        Preferences {
            notifications: true,
            recommendations: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserAccount {
    pub user_id: UserId,
    pub username: String,
    pub email: String,
    pub password_digest: String,
    pub role: Role,
    pub preferences: Preferences,
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Movie {
    pub movie_id: MovieId,
    pub title: String,
    pub description: String,
    pub genres: BTreeSet<String>,
    pub director: String,
    pub cast: Vec<String>,
    pub language: String,
    pub release_date: NaiveDate,
    pub poster_url: Option<String>,
    pub trailer_url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Venue {
    pub venue_id: VenueId,
    pub name: String,
    pub address: String,
    pub amenities: Vec<String>,
    pub accessibility: Vec<String>,
    pub rows: u32,
    pub cols: u32,
}

impl Venue {
    pub fn capacity(&self) -> u32 {
        self.rows * self.cols
    }

    pub fn contains(&self, seat: SeatId) -> bool {
        seat.row < self.rows && seat.col < self.cols
    }

    pub fn dimensions_valid(rows: u32, cols: u32) -> bool {
        (1..=MAX_ROWS).contains(&rows) && (1..=MAX_COLS).contains(&cols)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Show {
    pub show_id: ShowId,
    pub movie_id: MovieId,
    pub venue_id: VenueId,
    pub starts_at: Timestamp,
    pub price_per_seat: Money,
    pub sold: BTreeSet<SeatId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BookingStatus {
    Active,
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Booking {
    pub booking_id: BookingId,
    pub user_id: UserId,
    pub show_id: ShowId,
    pub seats: BTreeSet<SeatId>,
    pub paid: Money,
    pub coins_redeemed: u64,
    pub status: BookingStatus,
    pub created_at: Timestamp,
    #[serde(default)]
    pub cancelled_at: Option<Timestamp>,
}

impl Booking {
    pub fn is_active(&self) -> bool {
        self.status == BookingStatus::Active
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub review_id: ReviewId,
    pub user_id: UserId,
    pub movie_id: MovieId,
    pub rating: u8,
    pub text: String,
    pub sentiment: SentimentScore,
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinReason {
    BookingEarn,
    ReviewEarn,
    Redeem,
    RevokeOnCancel,
    RedeemReturn,
}

/// Reference carried by a ledger entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinRef {
    Booking(BookingId),
    Review(ReviewId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinTransaction {
    pub txn_id: TxnId,
    pub user_id: UserId,
    pub delta: i64,
    pub reason: CoinReason,
    pub ref_id: CoinRef,
    pub created_at: Timestamp,
}

/// Balance is the plain sum of deltas, so entry order never matters.
pub fn ledger_balance<'a>(entries: impl IntoIterator<Item = &'a CoinTransaction>) -> i64 {
    entries.into_iter().map(|t| t.delta).sum()
}
