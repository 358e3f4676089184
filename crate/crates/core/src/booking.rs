//! Seat reservation, cancellation and the coin ledger.
//!
//! Every mutation runs inside one store transaction, so the houseful check,
//! the seat-conflict check and the writes that follow are a single
//! linearizable step.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::*;
use crate::policy::Policy;
use crate::store::{RecordKind, Store, StoreError, Tables, Tx};

#[derive(Debug, Error)]
pub enum BookingError {
    #[error("unknown movie {0}")]
    UnknownMovie(MovieId),
    #[error("unknown venue {0}")]
    UnknownVenue(VenueId),
    #[error("unknown show {0}")]
    UnknownShow(ShowId),
    #[error("unknown user {0}")]
    UnknownUser(UserId),
    #[error("unknown review {0}")]
    UnknownReview(ReviewId),
    #[error("showtime is not in the future")]
    PastShowtime,
    #[error("seats already sold: {}", labels(.0))]
    SeatTaken(Vec<SeatId>),
    #[error("show is houseful")]
    Houseful,
    #[error("show has already started")]
    ShowStarted,
    #[error("seats outside the venue grid: {0:?}")]
    InvalidSeat(Vec<SeatId>),
    #[error("no seats requested")]
    NoSeats,
    #[error("requested {requested} coins but balance is {balance}")]
    InsufficientCoins { requested: u64, balance: i64 },
    #[error("booking {0} not found")]
    NotFound(BookingId),
    #[error("booking belongs to another user")]
    NotOwner,
    #[error("booking already cancelled")]
    AlreadyCancelled,
    #[error("cancellation window has closed")]
    TooLateToCancel,
    #[error("review coins already granted for this movie")]
    AlreadyRewarded,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

fn labels(seats: &[SeatId]) -> String {
    seats.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quote {
    pub subtotal: Money,
    pub max_redeemable_coins: u64,
    pub coins_redeemed: u64,
    pub discount: Money,
    pub total: Money,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refund {
    pub booking_id: BookingId,
    pub amount: Money,
    pub coins_returned: u64,
    pub coins_revoked: u64,
}

/// Who is performing a mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Actor {
    pub user_id: UserId,
    pub role: Role,
}

/// Price `n_seats` and clamp the coin request to the balance and redemption cap.
pub fn quote(
    policy: &Policy,
    price_per_seat: &Money,
    n_seats: u32,
    coins_requested: u64,
    user_balance: i64,
) -> Result<Quote, DomainError> {
    let subtotal = price_per_seat.times(u64::from(n_seats))?;
    let cap = subtotal
        .amount_minor
        .checked_mul(policy.redeem_cap_pct)
        .ok_or(DomainError::Overflow)?
        / (100 * policy.coin_value_minor);
    let balance = u64::try_from(user_balance.max(0)).unwrap_or(0);
    let max_redeemable_coins = balance.min(cap);
    let coins_redeemed = coins_requested.min(max_redeemable_coins);
    let discount = Money::new(
        coins_redeemed * policy.coin_value_minor,
        subtotal.currency_code.clone(),
    );
    let total = apply_discount(&subtotal, coins_redeemed, policy.coin_value_minor)?;
    Ok(Quote {
        subtotal,
        max_redeemable_coins,
        coins_redeemed,
        discount,
        total,
    })
}

pub fn balance_of(tables: &Tables, user: UserId) -> i64 {
    ledger_balance(tables.ledger.values().filter(|t| t.user_id == user))
}

fn append_coins(
    tx: &mut Tx<'_>,
    user_id: UserId,
    delta: i64,
    reason: CoinReason,
    ref_id: CoinRef,
    now: Timestamp,
) -> Result<CoinTransaction, StoreError> {
    let txn = CoinTransaction {
        txn_id: TxnId(tx.next_id(RecordKind::CoinTransaction)),
        user_id,
        delta,
        reason,
        ref_id,
        created_at: now,
    };
    tx.put(txn.clone())?;
    Ok(txn)
}

pub struct BookingEngine<'a> {
    store: &'a Store,
    policy: &'a Policy,
}

impl<'a> BookingEngine<'a> {
    pub fn new(store: &'a Store, policy: &'a Policy) -> Self {
        BookingEngine { store, policy }
    }

    pub fn create_show(
        &self,
        movie_id: MovieId,
        venue_id: VenueId,
        starts_at: Timestamp,
        price_per_seat: Money,
        now: Timestamp,
    ) -> Result<Show, BookingError> {
        self.store.transaction(|tx| {
            if tx.get::<Movie>(movie_id).is_none() {
                return Err(BookingError::UnknownMovie(movie_id));
            }
            if tx.get::<Venue>(venue_id).is_none() {
                return Err(BookingError::UnknownVenue(venue_id));
            }
            if starts_at <= now {
                return Err(BookingError::PastShowtime);
            }
            let show = Show {
                show_id: ShowId(tx.next_id(RecordKind::Show)),
                movie_id,
                venue_id,
                starts_at,
                price_per_seat,
                sold: BTreeSet::new(),
            };
            tx.put(show.clone())?;
            Ok(show)
        })
    }

    pub fn quote_for(
        &self,
        show_id: ShowId,
        user_id: UserId,
        n_seats: u32,
        coins_requested: u64,
    ) -> Result<Quote, BookingError> {
        self.store.read(|t| {
            let show = t.shows.get(&show_id).ok_or(BookingError::UnknownShow(show_id))?;
            if !t.users.contains_key(&user_id) {
                return Err(BookingError::UnknownUser(user_id));
            }
            Ok(quote(
                self.policy,
                &show.price_per_seat,
                n_seats,
                coins_requested,
                balance_of(t, user_id),
            )?)
        })
    }

    pub fn book_seats(
        &self,
        user_id: UserId,
        show_id: ShowId,
        seats: &BTreeSet<SeatId>,
        coins_requested: u64,
        now: Timestamp,
    ) -> Result<Booking, BookingError> {
        let policy = self.policy;
        self.store.transaction(|tx| {
            let t = tx.tables();
            if !t.users.contains_key(&user_id) {
                return Err(BookingError::UnknownUser(user_id));
            }
            let show = t
                .shows
                .get(&show_id)
                .ok_or(BookingError::UnknownShow(show_id))?
                .clone();
            if seats.is_empty() {
                return Err(BookingError::NoSeats);
            }
            if now >= show.starts_at {
                return Err(BookingError::ShowStarted);
            }
            let venue = t
                .venues
                .get(&show.venue_id)
                .ok_or(BookingError::UnknownVenue(show.venue_id))?;
            let outside: Vec<SeatId> = seats.iter().filter(|s| !venue.contains(**s)).copied().collect();
            if !outside.is_empty() {
                return Err(BookingError::InvalidSeat(outside));
            }
            if show.sold.len() >= venue.capacity() as usize {
                return Err(BookingError::Houseful);
            }
            let taken: Vec<SeatId> = seats.intersection(&show.sold).copied().collect();
            if !taken.is_empty() {
                return Err(BookingError::SeatTaken(taken));
            }
            let balance = balance_of(t, user_id);
            if coins_requested > 0 && i128::from(coins_requested) > i128::from(balance) {
                return Err(BookingError::InsufficientCoins {
                    requested: coins_requested,
                    balance,
                });
            }
            let q = quote(
                policy,
                &show.price_per_seat,
                seats.len() as u32,
                coins_requested,
                balance,
            )?;

            let booking = Booking {
                booking_id: BookingId(tx.next_id(RecordKind::Booking)),
                user_id,
                show_id,
                seats: seats.clone(),
                paid: q.total.clone(),
                coins_redeemed: q.coins_redeemed,
                status: BookingStatus::Active,
                created_at: now,
                cancelled_at: None,
            };
            let mut show = show;
            show.sold.extend(seats.iter().copied());
            tx.put(show)?;
            tx.put(booking.clone())?;
            let r = CoinRef::Booking(booking.booking_id);
            if q.coins_redeemed > 0 {
                append_coins(tx, user_id, -(q.coins_redeemed as i64), CoinReason::Redeem, r, now)?;
            }
            let earned = policy.earn_per_seat * seats.len() as u64;
            if earned > 0 {
                append_coins(tx, user_id, earned as i64, CoinReason::BookingEarn, r, now)?;
            }
            Ok(booking)
        })
    }

    pub fn cancel_booking(
        &self,
        actor: Actor,
        booking_id: BookingId,
        now: Timestamp,
    ) -> Result<Refund, BookingError> {
        let policy = self.policy;
        self.store.transaction(|tx| {
            let t = tx.tables();
            let booking = t
                .bookings
                .get(&booking_id)
                .ok_or(BookingError::NotFound(booking_id))?
                .clone();
            if booking.user_id != actor.user_id && actor.role != Role::Admin {
                return Err(BookingError::NotOwner);
            }
            if !booking.is_active() {
                return Err(BookingError::AlreadyCancelled);
            }
            let mut show = t
                .shows
                .get(&booking.show_id)
                .ok_or(BookingError::UnknownShow(booking.show_id))?
                .clone();
            if now > show.starts_at.plus_hours(-policy.cancel_cutoff_hours) {
                return Err(BookingError::TooLateToCancel);
            }
            let r = CoinRef::Booking(booking_id);
            let earned: i64 = t
                .ledger
                .values()
                .filter(|e| e.ref_id == r && e.reason == CoinReason::BookingEarn)
                .map(|e| e.delta)
                .sum();

            for seat in &booking.seats {
                show.sold.remove(seat);
            }
            let user_id = booking.user_id;
            let mut cancelled = booking;
            cancelled.status = BookingStatus::Cancelled;
            cancelled.cancelled_at = Some(now);
            let refund = Refund {
                booking_id,
                amount: cancelled.paid.clone(),
                coins_returned: cancelled.coins_redeemed,
                coins_revoked: earned.max(0) as u64,
            };
            tx.put(show)?;
            tx.put(cancelled)?;
            if refund.coins_returned > 0 {
                append_coins(tx, user_id, refund.coins_returned as i64, CoinReason::RedeemReturn, r, now)?;
            }
            if earned > 0 {
                append_coins(tx, user_id, -earned, CoinReason::RevokeOnCancel, r, now)?;
            }
            Ok(refund)
        })
    }

    pub fn coin_balance(&self, user_id: UserId) -> Result<i64, BookingError> {
        self.store.read(|t| {
            if !t.users.contains_key(&user_id) {
                return Err(BookingError::UnknownUser(user_id));
            }
            Ok(balance_of(t, user_id))
        })
    }

    pub fn earn_review_coins(
        &self,
        user_id: UserId,
        review_id: ReviewId,
        now: Timestamp,
    ) -> Result<CoinTransaction, BookingError> {
        let policy = self.policy;
        self.store
            .transaction(|tx| earn_review_coins_in(tx, policy, user_id, review_id, now))
    }
}

/// Grant the first-review reward inside an open transaction.
pub(crate) fn earn_review_coins_in(
    tx: &mut Tx<'_>,
    policy: &Policy,
    user_id: UserId,
    review_id: ReviewId,
    now: Timestamp,
) -> Result<CoinTransaction, BookingError> {
    let t = tx.tables();
    let review = t
        .reviews
        .get(&review_id)
        .filter(|r| r.user_id == user_id)
        .ok_or(BookingError::UnknownReview(review_id))?;
    let movie = review.movie_id;
    let already = t.ledger.values().any(|e| {
        e.user_id == user_id
            && e.reason == CoinReason::ReviewEarn
            && matches!(e.ref_id, CoinRef::Review(rid)
                if t.reviews.get(&rid).map(|r| r.movie_id) == Some(movie))
    });
    if already {
        return Err(BookingError::AlreadyRewarded);
    }
    Ok(append_coins(
        tx,
        user_id,
        policy.review_earn as i64,
        CoinReason::ReviewEarn,
        CoinRef::Review(review_id),
        now,
    )?)
}
