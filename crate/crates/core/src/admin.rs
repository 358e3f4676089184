//! Catalog and account management used by the admin panel.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::*;
use crate::store::{RecordKind, Store, StoreError};

#[derive(Debug, Error)]
pub enum AdminError {
    #[error("{0:?} {1} not found")]
    NotFound(RecordKind, u64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("duplicate {0}")]
    Duplicate(&'static str),
    #[error("still referenced: {0}")]
    InUse(String),
    #[error(transparent)]
    Store(StoreError),
}

impl From<StoreError> for AdminError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::ConstraintViolation(c) => match c.as_str() {
                "users.username" => AdminError::Duplicate("username"),
                "users.email" => AdminError::Duplicate("email"),
                "movies.title_release_date" => AdminError::Duplicate("title and release date"),
                "shows.sold_in_grid" => AdminError::InUse("sold seats fall outside the new grid".into()),
                _ if c.ends_with("_id") || c == "coin_ledger.ref_id" => AdminError::InUse(c),
                _ => AdminError::Invalid(c),
            },
            StoreError::Missing { kind, id } => AdminError::NotFound(kind, id),
            other => AdminError::Store(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieInput {
    pub title: String,
    #[serde(default)]
    pub description: String,
    pub genres: BTreeSet<String>,
    #[serde(default)]
    pub director: String,
    #[serde(default)]
    pub cast: Vec<String>,
    #[serde(default)]
    pub language: String,
    pub release_date: NaiveDate,
    #[serde(default)]
    pub poster_url: Option<String>,
    #[serde(default)]
    pub trailer_url: Option<String>,
}

impl MovieInput {
    fn into_movie(self, movie_id: MovieId) -> Result<Movie, AdminError> {
        if self.title.trim().is_empty() {
            return Err(AdminError::Invalid("title must not be empty".into()));
        }
        if self.genres.is_empty() {
            return Err(AdminError::Invalid("at least one genre is required".into()));
        }
        Ok(Movie {
            movie_id,
            title: self.title,
            description: self.description,
            genres: self.genres,
            director: self.director,
            cast: self.cast,
            language: self.language,
            release_date: self.release_date,
            poster_url: self.poster_url,
            trailer_url: self.trailer_url,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VenueInput {
    pub name: String,
    #[serde(default)]
    pub address: String,
    #[serde(default)]
    pub amenities: Vec<String>,
    #[serde(default)]
    pub accessibility: Vec<String>,
    pub rows: u32,
    pub cols: u32,
}

impl VenueInput {
    fn into_venue(self, venue_id: VenueId) -> Result<Venue, AdminError> {
        if self.name.trim().is_empty() {
            return Err(AdminError::Invalid("name must not be empty".into()));
        }
        if !Venue::dimensions_valid(self.rows, self.cols) {
            return Err(AdminError::Invalid(format!(
                "grid {}x{} outside 1..=26 rows, 1..=99 cols",
                self.rows, self.cols
            )));
        }
        Ok(Venue {
            venue_id,
            name: self.name,
            address: self.address,
            amenities: self.amenities,
            accessibility: self.accessibility,
            rows: self.rows,
            cols: self.cols,
        })
    }
}

pub fn create_movie(store: &Store, input: MovieInput) -> Result<Movie, AdminError> {
    store.transaction(|tx| {
        let movie = input.into_movie(MovieId(tx.next_id(RecordKind::Movie)))?;
        tx.put(movie.clone())?;
        Ok(movie)
    })
}

pub fn update_movie(store: &Store, id: MovieId, input: MovieInput) -> Result<Movie, AdminError> {
    store.transaction(|tx| {
        if tx.get::<Movie>(id).is_none() {
            return Err(AdminError::NotFound(RecordKind::Movie, id.0));
        }
        let movie = input.into_movie(id)?;
        tx.put(movie.clone())?;
        Ok(movie)
    })
}

pub fn delete_movie(store: &Store, id: MovieId) -> Result<(), AdminError> {
    store.transaction(|tx| Ok(tx.delete(RecordKind::Movie, id.0)?))
}

pub fn create_venue(store: &Store, input: VenueInput) -> Result<Venue, AdminError> {
    store.transaction(|tx| {
        let venue = input.into_venue(VenueId(tx.next_id(RecordKind::Venue)))?;
        tx.put(venue.clone())?;
        Ok(venue)
    })
}

pub fn update_venue(store: &Store, id: VenueId, input: VenueInput) -> Result<Venue, AdminError> {
    store.transaction(|tx| {
        if tx.get::<Venue>(id).is_none() {
            return Err(AdminError::NotFound(RecordKind::Venue, id.0));
        }
        let venue = input.into_venue(id)?;
        tx.put(venue.clone())?;
        Ok(venue)
    })
}

pub fn delete_venue(store: &Store, id: VenueId) -> Result<(), AdminError> {
    store.transaction(|tx| Ok(tx.delete(RecordKind::Venue, id.0)?))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ShowUpdate {
    pub starts_at: Option<Timestamp>,
    pub price_per_seat_minor: Option<u64>,
}

/// Reschedule or reprice a show that has no bookings yet.
pub fn update_show(store: &Store, id: ShowId, update: ShowUpdate, now: Timestamp) -> Result<Show, AdminError> {
    store.transaction(|tx| {
        let mut show = tx
            .get::<Show>(id)
            .cloned()
            .ok_or(AdminError::NotFound(RecordKind::Show, id.0))?;
        if tx.tables().bookings.values().any(|b| b.show_id == id) {
            return Err(AdminError::InUse("show already has bookings".into()));
        }
        if let Some(at) = update.starts_at {
            if at <= now {
                return Err(AdminError::Invalid("showtime must be in the future".into()));
            }
            show.starts_at = at;
        }
        if let Some(p) = update.price_per_seat_minor {
            show.price_per_seat.amount_minor = p;
        }
        tx.put(show.clone())?;
        Ok(show)
    })
}

pub fn delete_show(store: &Store, id: ShowId) -> Result<(), AdminError> {
    store.transaction(|tx| Ok(tx.delete(RecordKind::Show, id.0)?))
}

pub fn insert_user(
    store: &Store,
    username: &str,
    email: &str,
    password_digest: String,
    role: Role,
    now: Timestamp,
) -> Result<UserAccount, AdminError> {
    store.transaction(|tx| {
        let user = UserAccount {
            user_id: UserId(tx.next_id(RecordKind::User)),
            username: username.to_string(),
            email: email.to_string(),
            password_digest,
            role,
            preferences: Preferences::default(),
            created_at: now,
        };
        tx.put(user.clone())?;
        Ok(user)
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UserUpdate {
    pub email: Option<String>,
    pub role: Option<Role>,
    pub preferences: Option<Preferences>,
}

pub fn update_user(store: &Store, id: UserId, update: UserUpdate) -> Result<UserAccount, AdminError> {
    store.transaction(|tx| {
        let mut user = tx
            .get::<UserAccount>(id)
            .cloned()
            .ok_or(AdminError::NotFound(RecordKind::User, id.0))?;
        if let Some(email) = update.email {
            user.email = email;
        }
        if let Some(role) = update.role {
            user.role = role;
        }
        if let Some(p) = update.preferences {
            user.preferences = p;
        }
        tx.put(user.clone())?;
        Ok(user)
    })
}
