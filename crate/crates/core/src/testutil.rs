use std::collections::BTreeSet;

use chrono::NaiveDate;

use crate::booking::BookingEngine;
use crate::domain::*;
use crate::policy::Policy;
use crate::sentiment::SentimentScore;
use crate::store::{RecordKind, Store};

pub(crate) fn user(id: u64, name: &str) -> UserAccount {
    UserAccount {
        user_id: UserId(id),
        username: name.to_string(),
        email: format!("{name}@example.com"),
        password_digest: "x".into(),
        role: Role::User,
        preferences: Preferences::default(),
        created_at: Timestamp(0),
    }
}

pub(crate) fn movie(id: u64, title: &str, genres: &[&str]) -> Movie {
    Movie {
        movie_id: MovieId(id),
        title: title.to_string(),
        description: String::new(),
        genres: genres.iter().map(|g| g.to_string()).collect(),
        director: "Someone".into(),
        cast: vec![],
        language: "English".into(),
        release_date: NaiveDate::from_ymd_opt(2026, 1, 1).unwrap(),
        poster_url: None,
        trailer_url: None,
    }
}

pub(crate) fn venue(id: u64, rows: u32, cols: u32) -> Venue {
    Venue {
        venue_id: VenueId(id),
        name: format!("Venue {id}"),
        address: "Main St".into(),
        amenities: vec![],
        accessibility: vec![],
        rows,
        cols,
    }
}

pub(crate) struct Fixture {
    pub store: Store,
    pub policy: Policy,
    pub alice: UserId,
    pub bob: UserId,
    pub movie: MovieId,
    pub movie2: MovieId,
    pub venue: VenueId,
    pub show: ShowId,
    pub now: Timestamp,
    pub show_starts: Timestamp,
}

impl Fixture {
    /// Two users, two movies, one 5x10 venue and one show three days out.
    pub fn new() -> Self {
        let store = Store::in_memory();
        let now = Timestamp(1_780_000_000_000);
        let show_starts = now.plus_days(3);
        store
            .transaction(|tx| {
                tx.put(user(1, "alice"))?;
                tx.put(user(2, "bob"))?;
                tx.put(movie(1, "Godfather", &["drama"]))?;
                tx.put(movie(2, "Alien", &["scifi"]))?;
                tx.put(venue(1, 5, 10))?;
                tx.put(Show {
                    show_id: ShowId(1),
                    movie_id: MovieId(1),
                    venue_id: VenueId(1),
                    starts_at: show_starts,
                    price_per_seat: Money::new(25_000, "INR"),
                    sold: BTreeSet::new(),
                })?;
                Ok::<_, crate::store::StoreError>(())
            })
            .unwrap();
        Fixture {
            store,
            policy: Policy::default(),
            alice: UserId(1),
            bob: UserId(2),
            movie: MovieId(1),
            movie2: MovieId(2),
            venue: VenueId(1),
            show: ShowId(1),
            now,
            show_starts,
        }
    }

    pub fn engine(&self) -> BookingEngine<'_> {
        BookingEngine::new(&self.store, &self.policy)
    }

    pub fn sold(&self) -> usize {
        self.store.read(|t| t.shows[&self.show].sold.len())
    }

    pub fn add_review(&self, user: UserId, movie: MovieId) -> ReviewId {
        self.store
            .transaction(|tx| {
                let id = ReviewId(tx.next_id(RecordKind::Review));
                tx.put(Review {
                    review_id: id,
                    user_id: user,
                    movie_id: movie,
                    rating: 4,
                    text: String::new(),
                    sentiment: SentimentScore::neutral(),
                    created_at: self.now,
                })?;
                Ok::<_, crate::store::StoreError>(id)
            })
            .unwrap()
    }
}
