//! Deterministic demo data.

use std::collections::BTreeSet;

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::booking::{Actor, BookingEngine, BookingError};
use crate::domain::*;
use crate::policy::Policy;
use crate::reviews::{submit_review, ReviewError};
use crate::sentiment::Lexicon;
use crate::store::{RecordKind, Store, StoreError};

pub const GENRES: [&str; 10] = [
    "action", "comedy", "drama", "horror", "romance", "scifi", "thriller", "animation", "documentary", "fantasy",
];
pub const LANGUAGES: [&str; 5] = ["English", "Hindi", "Tamil", "French", "Korean"];
const WORDS: [&str; 16] = [
    "night", "river", "shadow", "king", "star", "storm", "garden", "echo", "iron", "glass", "summer", "ghost",
    "harbor", "crown", "signal", "winter",
];
const PEOPLE: [&str; 12] = [
    "Asha Rao", "Ben Ortiz", "Chen Wei", "Dara Singh", "Eli Novak", "Fatima Khan", "Gus Lind", "Hana Sato",
    "Ivo Petrov", "Jia Park", "Kofi Mensah", "Lena Berg",
];
const REVIEW_SNIPPETS: [&str; 12] = [
    "great movie",
    "not good at all",
    "absolutely excellent acting",
    "somewhat boring middle act",
    "a masterpiece",
    "terrible sound in the hall",
    "i love the soundtrack",
    "mediocre plot but very good visuals",
    "never bad",
    "the projector was fine",
    "extremely boring",
    "",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedConfig {
    pub movies: usize,
    pub venues: usize,
    pub users: usize,
    pub shows_per_movie: usize,
    pub bookings: usize,
    pub reviews: usize,
    pub seed: u64,
    /// Anchor for release dates and showtimes.
    pub now: Timestamp,
}

impl SeedConfig {
    pub fn new(movies: usize, venues: usize, seed: u64, now: Timestamp) -> Self {
        SeedConfig {
            movies,
            venues,
            users: (movies / 2).max(5),
            shows_per_movie: 2,
            bookings: movies * 2,
            reviews: movies * 2,
            seed,
            now,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SeedError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Booking(#[from] BookingError),
    #[error(transparent)]
    Review(#[from] ReviewError),
}

fn pick<'a, R: Rng>(rng: &mut R, items: &[&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len())]
}

pub fn random_movie(rng: &mut impl Rng, id: MovieId, anchor: NaiveDate) -> Movie {
    let title = format!(
        "{} {} {}",
        capitalize(pick(rng, &WORDS)),
        capitalize(pick(rng, &WORDS)),
        id.0
    );
    let n_genres = rng.gen_range(1..=3);
    let genres: BTreeSet<String> = GENRES
        .choose_multiple(rng, n_genres)
        .map(|g| g.to_string())
        .collect();
    let cast = (0..rng.gen_range(0..4))
        .map(|_| pick(rng, &PEOPLE).to_string())
        .collect();
    Movie {
        movie_id: id,
        description: format!("A story of {} and {}.", pick(rng, &WORDS), pick(rng, &WORDS)),
        title,
        genres,
        director: pick(rng, &PEOPLE).to_string(),
        cast,
        language: pick(rng, &LANGUAGES).to_string(),
        release_date: anchor - Duration::days(rng.gen_range(0..3650)),
        poster_url: None,
        trailer_url: None,
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Populate an empty store. The same config always yields the same records.
pub fn seed_store(store: &Store, policy: &Policy, lexicon: &Lexicon, cfg: &SeedConfig) -> Result<(), SeedError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let now = cfg.now;
    let anchor = now.date();

    store.transaction(|tx| {
        for i in 0..cfg.users {
            let id = UserId(tx.next_id(RecordKind::User));
            tx.put(UserAccount {
                user_id: id,
                username: format!("demo{}", i + 1),
                email: format!("demo{}@example.com", i + 1),
                password_digest: "!".into(),
                role: Role::User,
                preferences: Preferences::default(),
                created_at: now,
            })?;
        }
        for _ in 0..cfg.movies {
            let id = MovieId(tx.next_id(RecordKind::Movie));
            tx.put(random_movie(&mut rng, id, anchor))?;
        }
        for i in 0..cfg.venues {
            let id = VenueId(tx.next_id(RecordKind::Venue));
            tx.put(Venue {
                venue_id: id,
                name: format!("{} Cinema {}", capitalize(pick(&mut rng, &WORDS)), i + 1),
                address: format!("{} {} Road", rng.gen_range(1..400), capitalize(pick(&mut rng, &WORDS))),
                amenities: vec!["parking".into(), "food court".into()],
                accessibility: vec!["wheelchair".into()],
                rows: rng.gen_range(4..=12),
                cols: rng.gen_range(6..=20),
            })?;
        }
        if cfg.venues > 0 {
            for m in 1..=cfg.movies as u64 {
                for _ in 0..cfg.shows_per_movie {
                    let id = ShowId(tx.next_id(RecordKind::Show));
                    tx.put(Show {
                        show_id: id,
                        movie_id: MovieId(m),
                        venue_id: VenueId(rng.gen_range(1..=cfg.venues as u64)),
                        starts_at: now.plus_hours(rng.gen_range(6..24 * 14)),
                        price_per_seat: Money::new(100 * rng.gen_range(150..=500), policy.currency_code.clone()),
                        sold: BTreeSet::new(),
                    })?;
                }
            }
        }
        Ok::<_, StoreError>(())
    })?;

    let engine = BookingEngine::new(store, policy);
    let n_users = cfg.users as u64;
    let n_shows = (cfg.movies * cfg.shows_per_movie) as u64;
    if n_users > 0 && n_shows > 0 {
        for _ in 0..cfg.bookings {
            let user = UserId(rng.gen_range(1..=n_users));
            let show = ShowId(rng.gen_range(1..=n_shows));
            let (rows, cols) = store.read(|t| {
                let v = &t.venues[&t.shows[&show].venue_id];
                (v.rows, v.cols)
            });
            let n = rng.gen_range(1..=3);
            let seats: BTreeSet<SeatId> = (0..n)
                .map(|_| SeatId::new(rng.gen_range(0..rows), rng.gen_range(0..cols)))
                .collect();
            let coins = if rng.gen_bool(0.2) { rng.gen_range(1..=5) } else { 0 };
            match engine.book_seats(user, show, &seats, coins, now) {
                Ok(b) => {
                    if rng.gen_bool(0.1) {
                        engine.cancel_booking(Actor { user_id: user, role: Role::User }, b.booking_id, now)?;
                    }
                }
                Err(BookingError::SeatTaken(_) | BookingError::Houseful | BookingError::InsufficientCoins { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    if n_users > 0 && cfg.movies > 0 {
        for _ in 0..cfg.reviews {
            let user = UserId(rng.gen_range(1..=n_users));
            let movie = MovieId(rng.gen_range(1..=cfg.movies as u64));
            let rating = rng.gen_range(1..=5);
            let text = pick(&mut rng, &REVIEW_SNIPPETS);
            match submit_review(store, policy, lexicon, user, movie, rating, text, now) {
                Ok(_) | Err(ReviewError::DuplicateReview) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(())
}
