//! Admin reports computed from committed records.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::*;
use crate::sentiment::{aggregate_reviews, AggregateSentiment};
use crate::store::Tables;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("report window starts after it ends")]
    InvalidWindow,
    #[error("unknown venue {0}")]
    UnknownVenue(VenueId),
    #[error("unknown movie {0}")]
    UnknownMovie(MovieId),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for ReportError {
    fn from(e: csv::Error) -> Self {
        ReportError::Csv(e.to_string())
    }
}

/// Inclusive time window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub from: Timestamp,
    pub to: Timestamp,
}

impl Window {
    pub fn new(from: Timestamp, to: Timestamp) -> Result<Self, ReportError> {
        if from > to {
            return Err(ReportError::InvalidWindow);
        }
        Ok(Window { from, to })
    }

    /// Whole UTC days `from..=to`.
    pub fn days(from: NaiveDate, to: NaiveDate) -> Result<Self, ReportError> {
        Self::new(Timestamp::start_of(from), Timestamp::end_of(to))
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.from <= t && t <= self.to
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    Movie,
    Venue,
    Day,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SalesRow {
    pub key: String,
    pub label: String,
    pub tickets_sold: u64,
    pub gross: Money,
    pub refunds: Money,
    pub net: Money,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SalesReport {
    pub window: Window,
    pub group_by: GroupBy,
    pub rows: Vec<SalesRow>,
    pub totals: SalesRow,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum GroupKey {
    Id(u64),
    Day(NaiveDate),
}

#[derive(Default, Clone, Copy)]
struct Acc {
    tickets: u64,
    gross: u64,
    refunds: u64,
}

fn row(key: String, label: String, acc: Acc, currency: &str) -> SalesRow {
    SalesRow {
        key,
        label,
        tickets_sold: acc.tickets,
        gross: Money::new(acc.gross, currency),
        refunds: Money::new(acc.refunds, currency),
        net: Money::new(acc.gross - acc.refunds, currency),
    }
}

/// Seats and money of bookings created inside the window. Cancelled bookings
/// stay in gross and add their refund to refunds.
pub fn sales_report(
    t: &Tables,
    window: Window,
    group_by: GroupBy,
    currency: &str,
) -> SalesReport {
    let mut groups: BTreeMap<GroupKey, (String, Acc)> = BTreeMap::new();
    let mut total = Acc::default();
    for b in t.bookings.values().filter(|b| window.contains(b.created_at)) {
        let Some(show) = t.shows.get(&b.show_id) else { continue };
        let (key, label) = match group_by {
            GroupBy::Movie => (
                GroupKey::Id(show.movie_id.0),
                t.movies.get(&show.movie_id).map(|m| m.title.clone()).unwrap_or_default(),
            ),
            GroupBy::Venue => (
                GroupKey::Id(show.venue_id.0),
                t.venues.get(&show.venue_id).map(|v| v.name.clone()).unwrap_or_default(),
            ),
            GroupBy::Day => {
                let d = b.created_at.date();
                (GroupKey::Day(d), d.to_string())
            }
        };
        let refund = if b.is_active() { 0 } else { b.paid.amount_minor };
        let entry = groups.entry(key).or_insert_with(|| (label, Acc::default()));
        for acc in [&mut entry.1, &mut total] {
            acc.tickets += b.seats.len() as u64;
            acc.gross += b.paid.amount_minor;
            acc.refunds += refund;
        }
    }
    let rows = groups
        .into_iter()
        .map(|(k, (label, acc))| {
            let key = match k {
                GroupKey::Id(id) => id.to_string(),
                GroupKey::Day(d) => d.to_string(),
            };
            row(key, label, acc, currency)
        })
        .collect();
    SalesReport {
        window,
        group_by,
        rows,
        totals: row("total".into(), String::new(), total, currency),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyRow {
    pub show_id: ShowId,
    pub movie_id: MovieId,
    pub starts_at: Timestamp,
    pub capacity: u32,
    pub sold: u32,
    pub occupancy_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyReport {
    pub venue_id: VenueId,
    pub date: NaiveDate,
    pub rows: Vec<OccupancyRow>,
}

pub fn occupancy_report(t: &Tables, venue_id: VenueId, date: NaiveDate) -> Result<OccupancyReport, ReportError> {
    let venue = t.venues.get(&venue_id).ok_or(ReportError::UnknownVenue(venue_id))?;
    let capacity = venue.capacity();
    let mut rows: Vec<OccupancyRow> = t
        .shows
        .values()
        .filter(|s| s.venue_id == venue_id && s.starts_at.date() == date)
        .map(|s| {
            let sold = s.sold.len() as u32;
            OccupancyRow {
                show_id: s.show_id,
                movie_id: s.movie_id,
                starts_at: s.starts_at,
                capacity,
                sold,
                occupancy_pct: 100.0 * f64::from(sold) / f64::from(capacity),
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.starts_at, r.show_id));
    Ok(OccupancyReport { venue_id, date, rows })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityRow {
    pub user_id: UserId,
    pub username: String,
    pub bookings: u64,
    pub cancellations: u64,
    pub reviews: u64,
    pub coins_earned: u64,
    pub coins_redeemed: u64,
}

impl ActivityRow {
    fn is_idle(&self) -> bool {
        self.bookings == 0
            && self.cancellations == 0
            && self.reviews == 0
            && self.coins_earned == 0
            && self.coins_redeemed == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityReport {
    pub window: Window,
    pub rows: Vec<ActivityRow>,
}

pub fn activity_report(t: &Tables, window: Window) -> ActivityReport {
    let mut rows: BTreeMap<UserId, ActivityRow> = BTreeMap::new();
    fn at<'r>(rows: &'r mut BTreeMap<UserId, ActivityRow>, t: &Tables, u: UserId) -> &'r mut ActivityRow {
        rows.entry(u).or_insert_with(|| ActivityRow {
            user_id: u,
            username: t.users.get(&u).map(|x| x.username.clone()).unwrap_or_default(),
            ..Default::default()
        })
    }
    for b in t.bookings.values() {
        if window.contains(b.created_at) {
            at(&mut rows, t, b.user_id).bookings += 1;
        }
        if b.cancelled_at.is_some_and(|c| window.contains(c)) {
            at(&mut rows, t, b.user_id).cancellations += 1;
        }
    }
    for r in t.reviews.values().filter(|r| window.contains(r.created_at)) {
        at(&mut rows, t, r.user_id).reviews += 1;
    }
    for e in t.ledger.values().filter(|e| window.contains(e.created_at)) {
        match e.reason {
            CoinReason::BookingEarn | CoinReason::ReviewEarn => {
                at(&mut rows, t, e.user_id).coins_earned += e.delta.unsigned_abs()
            }
            CoinReason::Redeem => at(&mut rows, t, e.user_id).coins_redeemed += e.delta.unsigned_abs(),
            CoinReason::RevokeOnCancel | CoinReason::RedeemReturn => {}
        }
    }
    ActivityReport {
        window,
        rows: rows.into_values().filter(|r| !r.is_idle()).collect(),
    }
}

pub const WORST_REVIEWS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentReport {
    pub movie_id: MovieId,
    pub aggregate: AggregateSentiment,
    pub most_negative: Vec<Review>,
}

pub fn sentiment_report(t: &Tables, movie_id: MovieId) -> Result<SentimentReport, ReportError> {
    if !t.movies.contains_key(&movie_id) {
        return Err(ReportError::UnknownMovie(movie_id));
    }
    let mut reviews: Vec<&Review> = t.reviews.values().filter(|r| r.movie_id == movie_id).collect();
    let aggregate = aggregate_reviews(reviews.iter().map(|r| &r.sentiment));
    reviews.sort_by(|a, b| {
        a.sentiment
            .compound
            .total_cmp(&b.sentiment.compound)
            .then(a.review_id.cmp(&b.review_id))
    });
    Ok(SentimentReport {
        movie_id,
        aggregate,
        most_negative: reviews.into_iter().take(WORST_REVIEWS).cloned().collect(),
    })
}

/// CSV rendering with a mandatory header row.
pub trait ToCsv {
    fn to_csv(&self) -> Result<String, ReportError>;
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, ReportError> {
    let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| ReportError::Csv(e.to_string()))
}

impl ToCsv for SalesReport {
    fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["key", "label", "tickets_sold", "gross_minor", "refunds_minor", "net_minor", "currency"])?;
        for r in self.rows.iter().chain(std::iter::once(&self.totals)) {
            w.write_record([
                r.key.clone(),
                r.label.clone(),
                r.tickets_sold.to_string(),
                r.gross.amount_minor.to_string(),
                r.refunds.amount_minor.to_string(),
                r.net.amount_minor.to_string(),
                r.gross.currency_code.clone(),
            ])?;
        }
        finish(w)
    }
}

impl ToCsv for OccupancyReport {
    fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["show_id", "movie_id", "starts_at", "capacity", "sold", "occupancy_pct"])?;
        for r in &self.rows {
            w.write_record([
                r.show_id.to_string(),
                r.movie_id.to_string(),
                r.starts_at.0.to_string(),
                r.capacity.to_string(),
                r.sold.to_string(),
                format!("{:.2}", r.occupancy_pct),
            ])?;
        }
        finish(w)
    }
}

impl ToCsv for ActivityReport {
    fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "user_id",
            "username",
            "bookings",
            "cancellations",
            "reviews",
            "coins_earned",
            "coins_redeemed",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.user_id.to_string(),
                r.username.clone(),
                r.bookings.to_string(),
                r.cancellations.to_string(),
                r.reviews.to_string(),
                r.coins_earned.to_string(),
                r.coins_redeemed.to_string(),
            ])?;
        }
        finish(w)
    }
}

impl ToCsv for SentimentReport {
    fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["review_id", "user_id", "rating", "compound", "label", "text"])?;
        for r in &self.most_negative {
            w.write_record([
                r.review_id.to_string(),
                r.user_id.to_string(),
                r.rating.to_string(),
                format!("{:.4}", r.sentiment.compound),
                r.sentiment.label.as_str().to_string(),
                r.text.clone(),
            ])?;
        }
        finish(w)
    }
}
