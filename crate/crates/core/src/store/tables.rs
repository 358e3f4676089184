use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    User,
    Movie,
    Venue,
    Show,
    Booking,
    Review,
    CoinTransaction,
}

impl RecordKind {
    pub const ALL: [RecordKind; 7] = [
        RecordKind::User,
        RecordKind::Movie,
        RecordKind::Venue,
        RecordKind::Show,
        RecordKind::Booking,
        RecordKind::Review,
        RecordKind::CoinTransaction,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn table_name(self) -> &'static str {
        match self {
            RecordKind::User => "users",
            RecordKind::Movie => "movies",
            RecordKind::Venue => "venues",
            RecordKind::Show => "shows",
            RecordKind::Booking => "bookings",
            RecordKind::Review => "reviews",
            RecordKind::CoinTransaction => "coin_ledger",
        }
    }
}

/// One stored row, tagged by kind. Serializes as `{"kind": ..., "data": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Record {
    User(UserAccount),
    Movie(Movie),
    Venue(Venue),
    Show(Show),
    Booking(Booking),
    Review(Review),
    CoinTransaction(CoinTransaction),
}

impl Record {
    pub fn kind(&self) -> RecordKind {
        match self {
            Record::User(_) => RecordKind::User,
            Record::Movie(_) => RecordKind::Movie,
            Record::Venue(_) => RecordKind::Venue,
            Record::Show(_) => RecordKind::Show,
            Record::Booking(_) => RecordKind::Booking,
            Record::Review(_) => RecordKind::Review,
            Record::CoinTransaction(_) => RecordKind::CoinTransaction,
        }
    }

    pub fn id(&self) -> u64 {
        match self {
            Record::User(r) => r.user_id.0,
            Record::Movie(r) => r.movie_id.0,
            Record::Venue(r) => r.venue_id.0,
            Record::Show(r) => r.show_id.0,
            Record::Booking(r) => r.booking_id.0,
            Record::Review(r) => r.review_id.0,
            Record::CoinTransaction(r) => r.txn_id.0,
        }
    }
}

/// Typed access to the table holding a record type.
pub trait Entity: Clone + Into<Record> {
    type Id: Copy + Ord + From<u64> + Into<u64>;
    const KIND: RecordKind;

    fn id(&self) -> Self::Id;
    fn table(tables: &Tables) -> &BTreeMap<Self::Id, Self>;
    fn table_mut(tables: &mut Tables) -> &mut BTreeMap<Self::Id, Self>;
}

macro_rules! entity {
    ($ty:ty, $id:ident, $field:ident, $kind:ident, $table:ident) => {
        impl From<u64> for $id {
            fn from(v: u64) -> Self {
                $id(v)
            }
        }

        impl From<$id> for u64 {
            fn from(v: $id) -> u64 {
                v.0
            }
        }

        impl From<$ty> for Record {
            fn from(v: $ty) -> Record {
                Record::$kind(v)
            }
        }

        impl Entity for $ty {
            type Id = $id;
            const KIND: RecordKind = RecordKind::$kind;

            fn id(&self) -> $id {
                self.$field
            }

            fn table(tables: &Tables) -> &BTreeMap<$id, Self> {
                &tables.$table
            }

            fn table_mut(tables: &mut Tables) -> &mut BTreeMap<$id, Self> {
                &mut tables.$table
            }
        }
    };
}

entity!(UserAccount, UserId, user_id, User, users);
entity!(Movie, MovieId, movie_id, Movie, movies);
entity!(Venue, VenueId, venue_id, Venue, venues);
entity!(Show, ShowId, show_id, Show, shows);
entity!(Booking, BookingId, booking_id, Booking, bookings);
entity!(Review, ReviewId, review_id, Review, reviews);
entity!(CoinTransaction, TxnId, txn_id, CoinTransaction, ledger);

/// Committed state of every table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tables {
    pub users: BTreeMap<UserId, UserAccount>,
    pub movies: BTreeMap<MovieId, Movie>,
    pub venues: BTreeMap<VenueId, Venue>,
    pub shows: BTreeMap<ShowId, Show>,
    pub bookings: BTreeMap<BookingId, Booking>,
    pub reviews: BTreeMap<ReviewId, Review>,
    pub ledger: BTreeMap<TxnId, CoinTransaction>,
}

impl Tables {
    pub fn get<T: Entity>(&self, id: T::Id) -> Option<&T> {
        T::table(self).get(&id)
    }

    pub fn count(&self, kind: RecordKind) -> usize {
        match kind {
            RecordKind::User => self.users.len(),
            RecordKind::Movie => self.movies.len(),
            RecordKind::Venue => self.venues.len(),
            RecordKind::Show => self.shows.len(),
            RecordKind::Booking => self.bookings.len(),
            RecordKind::Review => self.reviews.len(),
            RecordKind::CoinTransaction => self.ledger.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        RecordKind::ALL.iter().all(|k| self.count(*k) == 0)
    }

    pub fn max_id(&self, kind: RecordKind) -> u64 {
        fn last<K: Copy + Into<u64>, V>(m: &BTreeMap<K, V>) -> u64 {
            m.keys().next_back().map(|k| (*k).into()).unwrap_or(0)
        }
        match kind {
            RecordKind::User => last(&self.users),
            RecordKind::Movie => last(&self.movies),
            RecordKind::Venue => last(&self.venues),
            RecordKind::Show => last(&self.shows),
            RecordKind::Booking => last(&self.bookings),
            RecordKind::Review => last(&self.reviews),
            RecordKind::CoinTransaction => last(&self.ledger),
        }
    }

    pub fn lookup(&self, kind: RecordKind, id: u64) -> Option<Record> {
        match kind {
            RecordKind::User => self.users.get(&UserId(id)).cloned().map(Record::User),
            RecordKind::Movie => self.movies.get(&MovieId(id)).cloned().map(Record::Movie),
            RecordKind::Venue => self.venues.get(&VenueId(id)).cloned().map(Record::Venue),
            RecordKind::Show => self.shows.get(&ShowId(id)).cloned().map(Record::Show),
            RecordKind::Booking => self.bookings.get(&BookingId(id)).cloned().map(Record::Booking),
            RecordKind::Review => self.reviews.get(&ReviewId(id)).cloned().map(Record::Review),
            RecordKind::CoinTransaction => {
                self.ledger.get(&TxnId(id)).cloned().map(Record::CoinTransaction)
            }
        }
    }

    /// Insert or replace; returns the previous row.
    pub(crate) fn put_record(&mut self, rec: Record) -> Option<Record> {
        match rec {
            Record::User(r) => self.users.insert(r.user_id, r).map(Record::User),
            Record::Movie(r) => self.movies.insert(r.movie_id, r).map(Record::Movie),
            Record::Venue(r) => self.venues.insert(r.venue_id, r).map(Record::Venue),
            Record::Show(r) => self.shows.insert(r.show_id, r).map(Record::Show),
            Record::Booking(r) => self.bookings.insert(r.booking_id, r).map(Record::Booking),
            Record::Review(r) => self.reviews.insert(r.review_id, r).map(Record::Review),
            Record::CoinTransaction(r) => self.ledger.insert(r.txn_id, r).map(Record::CoinTransaction),
        }
    }

    pub(crate) fn remove_record(&mut self, kind: RecordKind, id: u64) -> Option<Record> {
        match kind {
            RecordKind::User => self.users.remove(&UserId(id)).map(Record::User),
            RecordKind::Movie => self.movies.remove(&MovieId(id)).map(Record::Movie),
            RecordKind::Venue => self.venues.remove(&VenueId(id)).map(Record::Venue),
            RecordKind::Show => self.shows.remove(&ShowId(id)).map(Record::Show),
            RecordKind::Booking => self.bookings.remove(&BookingId(id)).map(Record::Booking),
            RecordKind::Review => self.reviews.remove(&ReviewId(id)).map(Record::Review),
            RecordKind::CoinTransaction => self.ledger.remove(&TxnId(id)).map(Record::CoinTransaction),
        }
    }

    /// Every row in fixture order: kinds in schema order, ids ascending.
    pub fn records(&self) -> impl Iterator<Item = Record> + '_ {
        self.users
            .values()
            .cloned()
            .map(Record::User)
            .chain(self.movies.values().cloned().map(Record::Movie))
            .chain(self.venues.values().cloned().map(Record::Venue))
            .chain(self.shows.values().cloned().map(Record::Show))
            .chain(self.bookings.values().cloned().map(Record::Booking))
            .chain(self.reviews.values().cloned().map(Record::Review))
            .chain(self.ledger.values().cloned().map(Record::CoinTransaction))
    }

    /// Constraint names violated by the row `(kind, id)` as currently stored.
    pub fn row_violations(&self, kind: RecordKind, id: u64) -> Vec<&'static str> {
        let mut out = Vec::new();
        match kind {
            RecordKind::User => {
                let Some(u) = self.users.get(&UserId(id)) else { return out };
                if u.username.trim().is_empty() {
                    out.push("users.username_non_empty");
                }
                if !u.email.contains('@') {
                    out.push("users.email_format");
                }
                for other in self.users.values().filter(|o| o.user_id != u.user_id) {
                    if other.username == u.username {
                        out.push("users.username");
                    }
                    if other.email.eq_ignore_ascii_case(&u.email) {
                        out.push("users.email");
                    }
                }
            }
            RecordKind::Movie => {
                let Some(m) = self.movies.get(&MovieId(id)) else { return out };
                if m.title.trim().is_empty() {
                    out.push("movies.title_non_empty");
                }
                if m.genres.is_empty() {
                    out.push("movies.genres_non_empty");
                }
                if self.movies.values().any(|o| {
                    o.movie_id != m.movie_id && o.title == m.title && o.release_date == m.release_date
                }) {
                    out.push("movies.title_release_date");
                }
            }
            RecordKind::Venue => {
                let Some(v) = self.venues.get(&VenueId(id)) else { return out };
                if !Venue::dimensions_valid(v.rows, v.cols) {
                    out.push("venues.dimensions");
                }
                if self
                    .shows
                    .values()
                    .any(|s| s.venue_id == v.venue_id && s.sold.iter().any(|seat| !v.contains(*seat)))
                {
                    out.push("shows.sold_in_grid");
                }
            }
            RecordKind::Show => {
                let Some(s) = self.shows.get(&ShowId(id)) else { return out };
                if !self.movies.contains_key(&s.movie_id) {
                    out.push("shows.movie_id");
                }
                match self.venues.get(&s.venue_id) {
                    None => out.push("shows.venue_id"),
                    Some(v) => {
                        if s.sold.iter().any(|seat| !v.contains(*seat)) {
                            out.push("shows.sold_in_grid");
                        }
                    }
                }
            }
            RecordKind::Booking => {
                let Some(b) = self.bookings.get(&BookingId(id)) else { return out };
                if !self.users.contains_key(&b.user_id) {
                    out.push("bookings.user_id");
                }
                if b.seats.is_empty() {
                    out.push("bookings.seats_non_empty");
                }
                match self.shows.get(&b.show_id) {
                    None => out.push("bookings.show_id"),
                    Some(s) => {
                        if b.is_active() && !b.seats.is_subset(&s.sold) {
                            out.push("bookings.seats_sold");
                        }
                    }
                }
                if b.is_active()
                    && self.bookings.values().any(|o| {
                        o.booking_id != b.booking_id
                            && o.show_id == b.show_id
                            && o.is_active()
                            && !o.seats.is_disjoint(&b.seats)
                    })
                {
                    out.push("bookings.seat_exclusive");
                }
            }
            RecordKind::Review => {
                let Some(r) = self.reviews.get(&ReviewId(id)) else { return out };
                if !self.users.contains_key(&r.user_id) {
                    out.push("reviews.user_id");
                }
                if !self.movies.contains_key(&r.movie_id) {
                    out.push("reviews.movie_id");
                }
                if !(1..=5).contains(&r.rating) {
                    out.push("reviews.rating");
                }
                if self.reviews.values().any(|o| {
                    o.review_id != r.review_id && o.user_id == r.user_id && o.movie_id == r.movie_id
                }) {
                    out.push("reviews.user_movie");
                }
            }
            RecordKind::CoinTransaction => {
                let Some(t) = self.ledger.get(&TxnId(id)) else { return out };
                if !self.users.contains_key(&t.user_id) {
                    out.push("coin_ledger.user_id");
                }
                let ref_ok = match t.ref_id {
                    CoinRef::Booking(b) => self.bookings.contains_key(&b),
                    CoinRef::Review(r) => self.reviews.contains_key(&r),
                };
                if !ref_ok {
                    out.push("coin_ledger.ref_id");
                }
            }
        }
        out
    }

    /// Constraint names broken by rows that still point at a deleted row.
    pub fn dangling_references_to(&self, kind: RecordKind, id: u64) -> Vec<&'static str> {
        let mut out = Vec::new();
        match kind {
            RecordKind::User => {
                if self.bookings.values().any(|b| b.user_id.0 == id) {
                    out.push("bookings.user_id");
                }
                if self.reviews.values().any(|r| r.user_id.0 == id) {
                    out.push("reviews.user_id");
                }
                if self.ledger.values().any(|t| t.user_id.0 == id) {
                    out.push("coin_ledger.user_id");
                }
            }
            RecordKind::Movie => {
                if self.shows.values().any(|s| s.movie_id.0 == id) {
                    out.push("shows.movie_id");
                }
                if self.reviews.values().any(|r| r.movie_id.0 == id) {
                    out.push("reviews.movie_id");
                }
            }
            RecordKind::Venue => {
                if self.shows.values().any(|s| s.venue_id.0 == id) {
                    out.push("shows.venue_id");
                }
            }
            RecordKind::Show => {
                if self.bookings.values().any(|b| b.show_id.0 == id) {
                    out.push("bookings.show_id");
                }
            }
            RecordKind::Booking => {
                if self.ledger.values().any(|t| t.ref_id == CoinRef::Booking(BookingId(id))) {
                    out.push("coin_ledger.ref_id");
                }
            }
            RecordKind::Review => {
                if self.ledger.values().any(|t| t.ref_id == CoinRef::Review(ReviewId(id))) {
                    out.push("coin_ledger.ref_id");
                }
            }
            RecordKind::CoinTransaction => {}
        }
        out
    }

    /// Full scan over every row. Empty means the store is consistent.
    pub fn integrity_violations(&self) -> Vec<(RecordKind, u64, &'static str)> {
        let mut out = Vec::new();
        for rec in self.records() {
            let (kind, id) = (rec.kind(), rec.id());
            for v in self.row_violations(kind, id) {
                out.push((kind, id, v));
            }
        }
        out
    }
}
