use std::collections::{BTreeSet, HashMap};

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stageseat_core::analytics::{self, GroupBy, ToCsv, Window};
use stageseat_core::booking::{balance_of, Actor, BookingEngine, BookingError};
use stageseat_core::catalog::{self, RecommendWeights, SearchQuery, SortKey};
use stageseat_core::reviews::{submit_review, ReviewError};
use stageseat_core::seed::{seed_store, SeedConfig, GENRES, LANGUAGES};
use stageseat_core::sentiment::{score_text, tokenize, AggregateSentiment, Lexicon, SentimentLabel, SentimentScore};
use stageseat_core::store::{RecordKind, Store, StoreError, Tables};
use stageseat_core::*;
use tokio::runtime::Runtime;

use crate::oracles::*;
use crate::Verdict;

const NOW: Timestamp = Timestamp(1_780_000_000_000);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- sentiment

const FILLER: &[&str] = &[
    "the", "movie", "plot", "was", "is", "and", "but", "acting", "film", "a", "it", "story", "don't", "isn't", "wasn't",
    "can't", "n't", "not", "never", "no", "hardly", "very", "extremely", "somewhat", "barely", "Good", "GREAT", "NOT",
    "café", "naïve", "2024", "10/10", "o'clock", "good's", "'good'", "goodn't", "ÉPIQUE",
];
const SEPARATORS: &[&str] = &[" ", " ", " ", ", ", "! ", "... ", "-", "\t", "?", ";", "\n", "  ", ".", "\"", "(", ")"];

fn random_text(r: &mut ChaCha8Rng, vocab: &[String]) -> String {
    let n = r.gen_range(0..=20);
    let mut s = String::new();
    for i in 0..n {
        if i > 0 {
            s += SEPARATORS.choose(r).unwrap();
        }
        if r.gen_bool(0.55) {
            let w = vocab.choose(r).unwrap();
            if r.gen_bool(0.1) {
                s += &w.to_uppercase();
            } else {
                s += w;
            }
        } else {
            s += FILLER.choose(r).unwrap();
        }
    }
    s
}

pub fn sentiment(_: &Runtime) -> Verdict {
    let mut v = Verdict::default();
    let lex = Lexicon::seed();
    let golden: &[(&str, &str, f64, SentimentLabel)] = &[
        ("golden-good", "good", 0.4404, SentimentLabel::Positive),
        ("golden-not-good", "not good", -0.3263, SentimentLabel::Negative),
        ("golden-very-good", "very good", 0.5927, SentimentLabel::Positive),
        ("golden-empty", "", 0.0, SentimentLabel::Neutral),
        ("golden-no-hit", "the projector", 0.0, SentimentLabel::Neutral),
    ];
    for (key, text, expected, label) in golden {
        let s = score_text(&lex, text);
        let ok = (s.compound - expected).abs() <= 1e-4 && s.label == *label;
        v.note(format!("{text:?} -> compound {:.6} {} (expected {expected} {})", s.compound, s.label.as_str(), label.as_str()));
        v.check(key, ok, format!("{text:?}: got {:.6} {}, expected {expected} ± 1e-4 {}", s.compound, s.label.as_str(), label.as_str()));
    }

    let oracle = OracleLexicon::parse(SEED_TSV);
    let vocab = oracle.vocabulary();
    let mut r = rng(2024);
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    let mut hits = 0;
    for _ in 0..1000 {
        let text = random_text(&mut r, &vocab);
        let s = score_text(&lex, &text);
        let (raw, compound) = oracle_score(&oracle, &text);
        let diff = (s.compound - compound).abs().max((s.raw_sum - raw).abs());
        worst = worst.max(diff);
        if s.hit_count > 0 {
            hits += 1;
        }
        if diff > 1e-9 || s.label.as_str() != oracle_label(compound) || tokenize(&text) != oracle_tokens(&text) {
            mismatches += 1;
            if mismatches <= 3 {
                v.check("oracle", false, format!("{text:?}: lib {:.12} oracle {compound:.12}", s.compound));
            }
        }
    }
    v.check("oracle", mismatches == 0, format!("{mismatches} of 1000 strings disagree"));
    v.note(format!("oracle: 1000 random strings ({hits} with lexicon hits), max |diff| {worst:.2e}"));
    v
}

// ------------------------------------------------------------- shared setup

fn user(id: u64) -> UserAccount {
    UserAccount {
        user_id: UserId(id),
        username: format!("user{id}"),
        email: format!("user{id}@example.com"),
        password_digest: "!".into(),
        role: Role::User,
        preferences: Preferences::default(),
        created_at: NOW,
    }
}

fn movie(id: u64, genre: &str) -> Movie {
    Movie {
        movie_id: MovieId(id),
        title: format!("Movie {id}"),
        description: String::new(),
        genres: [genre.to_string()].into(),
        director: "Someone".into(),
        cast: vec![],
        language: "English".into(),
        release_date: NaiveDate::from_ymd_opt(2026, 1, 1).unwrap(),
        poster_url: None,
        trailer_url: None,
    }
}

fn venue(id: u64, rows: u32, cols: u32) -> Venue {
    Venue {
        venue_id: VenueId(id),
        name: format!("Venue {id}"),
        address: String::new(),
        amenities: vec![],
        accessibility: vec![],
        rows,
        cols,
    }
}

/// `users` users, three movies, venues 4x5 and 3x3, and one show per
/// (movie, venue) three days out priced 12_000.
fn small_world(users: u64) -> Store {
    let store = Store::in_memory();
    store
        .transaction(|tx| {
            for u in 1..=users {
                tx.put(user(u))?;
            }
            for (m, g) in [(1, "drama"), (2, "comedy"), (3, "drama")] {
                tx.put(movie(m, g))?;
            }
            tx.put(venue(1, 4, 5))?;
            tx.put(venue(2, 3, 3))?;
            let mut id = 0;
            for m in 1..=3 {
                for v in 1..=2 {
                    id += 1;
                    tx.put(Show {
                        show_id: ShowId(id),
                        movie_id: MovieId(m),
                        venue_id: VenueId(v),
                        starts_at: NOW.plus_days(3),
                        price_per_seat: Money::new(12_000, "INR"),
                        sold: BTreeSet::new(),
                    })?;
                }
            }
            Ok::<_, StoreError>(())
        })
        .unwrap();
    store
}

fn random_seats(r: &mut ChaCha8Rng, rows: u32, cols: u32, max: usize) -> BTreeSet<SeatId> {
    let n = r.gen_range(1..=max);
    (0..n).map(|_| SeatId::new(r.gen_range(0..rows), r.gen_range(0..cols))).collect()
}

fn ledger_sum(t: &Tables, u: UserId) -> i64 {
    t.ledger.values().filter(|e| e.user_id == u).map(|e| e.delta).sum()
}

// ------------------------------------------------------- ledger conservation

pub fn ledger_conservation(_: &Runtime) -> Verdict {
    let mut v = Verdict::default();
    let policy = Policy::default();
    let lex = Lexicon::seed();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    let mut violations = 0usize;
    let mut blocked_checks = 0usize;
    for seq in 0..5u64 {
        let store = small_world(6);
        let engine = BookingEngine::new(&store, &policy);
        let mut r = rng(100 + seq);
        let mut model: HashMap<UserId, i64> = (1..=6).map(|u| (UserId(u), 0)).collect();
        for op in 0..1000 {
            let u = UserId(r.gen_range(1..=6));
            let roll = r.gen_range(0..100);
            let mut fail = |what: String| {
                violations += 1;
                if violations <= 5 {
                    v.check("ledger", false, format!("seq {seq} op {op}: {what}"));
                }
            };
            if roll < 55 {
                // book, sometimes redeeming
                let show = ShowId(r.gen_range(1..=6));
                let (rows, cols, price) = store.read(|t| {
                    let s = &t.shows[&show];
                    let ve = &t.venues[&s.venue_id];
                    (ve.rows, ve.cols, s.price_per_seat.amount_minor)
                });
                let seats = random_seats(&mut r, rows, cols, 3);
                let bal = model[&u];
                let coins: u64 = match r.gen_range(0..4) {
                    0 => 0,
                    1 if bal > 0 => r.gen_range(1..=bal as u64),
                    1 => r.gen_range(1..=3),
                    2 => bal.max(0) as u64 + r.gen_range(0..=2),
                    _ => bal.max(0) as u64,
                };
                let kind = if coins > 0 { "redeem" } else { "book" };
                match engine.book_seats(u, show, &seats, coins, NOW) {
                    Ok(b) => {
                        *counts.entry(kind).or_default() += 1;
                        let subtotal = price * seats.len() as u64;
                        if b.coins_redeemed * policy.coin_value_minor * 100 > subtotal * policy.redeem_cap_pct {
                            fail(format!("redeemed {} coins on subtotal {subtotal}", b.coins_redeemed));
                        }
                        if b.coins_redeemed > 0 && bal <= 0 {
                            fail(format!("redeemed at balance {bal}"));
                        }
                        if b.coins_redeemed > coins || b.paid.amount_minor != subtotal - b.coins_redeemed * policy.coin_value_minor {
                            fail(format!("booking {b:?} inconsistent with request {coins}"));
                        }
                        *model.get_mut(&u).unwrap() += seats.len() as i64 * policy.earn_per_seat as i64 - b.coins_redeemed as i64;
                    }
                    Err(BookingError::InsufficientCoins { requested, balance }) => {
                        *counts.entry("blocked").or_default() += 1;
                        if bal <= 0 {
                            blocked_checks += 1;
                        }
                        if i128::from(requested) <= i128::from(bal) || balance != bal {
                            fail(format!("InsufficientCoins for {requested} at model balance {bal}"));
                        }
                    }
                    Err(BookingError::SeatTaken(_) | BookingError::Houseful) => {
                        *counts.entry("contended").or_default() += 1;
                    }
                    Err(e) => fail(format!("unexpected {e}")),
                }
            } else if roll < 75 {
                let m = MovieId(r.gen_range(1..=3));
                match submit_review(&store, &policy, &lex, u, m, r.gen_range(1..=5), "good", NOW) {
                    Ok((_, coins)) => {
                        *counts.entry("review").or_default() += 1;
                        if coins.delta != policy.review_earn as i64 {
                            fail(format!("review earned {}", coins.delta));
                        }
                        *model.get_mut(&u).unwrap() += coins.delta;
                    }
                    Err(ReviewError::DuplicateReview) => {}
                    Err(e) => fail(format!("review: {e}")),
                }
            } else {
                let active: Vec<Booking> = store.read(|t| t.bookings.values().filter(|b| b.is_active()).cloned().collect());
                if let Some(b) = active.choose(&mut r) {
                    let actor = Actor { user_id: b.user_id, role: Role::User };
                    match engine.cancel_booking(actor, b.booking_id, NOW) {
                        Ok(refund) => {
                            *counts.entry("cancel").or_default() += 1;
                            let earned = b.seats.len() as u64 * policy.earn_per_seat;
                            if refund.amount != b.paid || refund.coins_returned != b.coins_redeemed || refund.coins_revoked != earned {
                                fail(format!("refund {refund:?} for {b:?}"));
                            }
                            *model.get_mut(&b.user_id).unwrap() += b.coins_redeemed as i64 - earned as i64;
                        }
                        Err(e) => fail(format!("cancel: {e}")),
                    }
                }
            }
            store.read(|t| {
                for (uid, expected) in &model {
                    let engine_balance = balance_of(t, *uid);
                    let sum = ledger_sum(t, *uid);
                    if engine_balance != sum || sum != *expected {
                        violations += 1;
                        if violations <= 5 {
                            v.check(
                                "ledger",
                                false,
                                format!("seq {seq} op {op}: user {uid} balance {engine_balance}, ledger sum {sum}, model {expected}"),
                            );
                        }
                    }
                }
            });
        }
    }
    v.check("ledger", violations == 0, format!("{violations} violations"));
    v.check("blocked-at-nonpositive", blocked_checks > 0, "no redemption was attempted at a non-positive balance");
    let mut c: Vec<_> = counts.into_iter().collect();
    c.sort();
    v.note(format!("5 sequences x 1000 ops, {violations} violations; outcomes {c:?}; {blocked_checks} redemptions blocked at balance <= 0"));
    v
}

// ---------------------------------------------------------- cancel inversion

pub fn cancel_inversion(_: &Runtime) -> Verdict {
    let mut v = Verdict::default();
    let policy = Policy::default();
    let lex = Lexicon::seed();
    let store = small_world(4);
    let engine = BookingEngine::new(&store, &policy);
    let mut r = rng(7);
    for u in 1..=4 {
        for m in 1..=3 {
            submit_review(&store, &policy, &lex, UserId(u), MovieId(m), 4, "fine", NOW).unwrap();
        }
    }
    let mut inversions = 0;
    let mut bad = 0;
    for i in 0..600 {
        let u = UserId(r.gen_range(1..=4));
        let show = ShowId(r.gen_range(1..=6));
        let (rows, cols) = store.read(|t| {
            let ve = &t.venues[&t.shows[&show].venue_id];
            (ve.rows, ve.cols)
        });
        let seats = random_seats(&mut r, rows, cols, 4);
        let before_grid = store.read(|t| catalog::seat_availability(t, show)).unwrap();
        let before_balance = store.read(|t| balance_of(t, u));
        let coins = if before_balance > 0 { r.gen_range(0..=before_balance as u64) } else { 0 };
        let Ok(b) = engine.book_seats(u, show, &seats, coins, NOW) else { continue };
        // keep some bookings so later iterations see partly sold grids
        if i % 5 == 0 {
            continue;
        }
        let when = Timestamp(r.gen_range(NOW.0..=NOW.plus_days(3).plus_hours(-2).0));
        match engine.cancel_booking(Actor { user_id: u, role: Role::User }, b.booking_id, when) {
            Ok(refund) => {
                inversions += 1;
                let grid = store.read(|t| catalog::seat_availability(t, show)).unwrap();
                let balance = store.read(|t| balance_of(t, u));
                if grid != before_grid || balance != before_balance || refund.amount != b.paid {
                    bad += 1;
                    v.check("inverse", false, format!("booking {}: balance {before_balance}->{balance}, refund {:?} paid {:?}", b.booking_id, refund.amount, b.paid));
                }
            }
            Err(e) => {
                bad += 1;
                v.check("inverse", false, format!("cancel at {when:?}: {e}"));
            }
        }
    }
    v.check("inverse", bad == 0 && inversions > 100, format!("{bad} bad of {inversions}"));

    // cutoff: exactly 2h before is allowed, a millisecond later is not
    let fresh = small_world(1);
    let engine = BookingEngine::new(&fresh, &policy);
    let starts = NOW.plus_days(3);
    let seat = |c| BTreeSet::from([SeatId::new(3, c)]);
    let a = engine.book_seats(UserId(1), ShowId(1), &seat(4), 0, NOW);
    let b = engine.book_seats(UserId(1), ShowId(1), &seat(3), 0, NOW);
    match (a, b) {
        (Ok(a), Ok(b)) => {
            let actor = Actor { user_id: UserId(1), role: Role::User };
            let late = engine.cancel_booking(actor, a.booking_id, Timestamp(starts.plus_hours(-2).0 + 1));
            v.check("too-late", matches!(late, Err(BookingError::TooLateToCancel)), format!("{late:?}"));
            let inside = engine.cancel_booking(actor, a.booking_id, starts.plus_hours(-1));
            v.check("too-late", matches!(inside, Err(BookingError::TooLateToCancel)), format!("{inside:?}"));
            let edge = engine.cancel_booking(actor, b.booking_id, starts.plus_hours(-2));
            v.check("edge", edge.is_ok(), format!("{edge:?}"));
        }
        other => v.check("setup", false, format!("{other:?}")),
    }
    v.note(format!("{inversions} book/cancel pairs restored grid, balance and payment exactly"));
    v
}

// ------------------------------------------------------------ search oracle

fn seeded(movies: usize, venues: usize, seed: u64) -> Store {
    let store = Store::in_memory();
    let mut cfg = SeedConfig::new(movies, venues, seed, NOW);
    cfg.users = 40;
    cfg.bookings = movies * 3;
    cfg.reviews = movies * 3;
    seed_store(&store, &Policy::default(), &Lexicon::seed(), &cfg).unwrap();
    store
}

fn random_query(r: &mut ChaCha8Rng, t: &Tables) -> SearchQuery {
    let movies: Vec<&Movie> = t.movies.values().collect();
    let text = match r.gen_range(0..6) {
        0 => None,
        1 => Some(String::new()),
        2 | 3 => {
            let m = movies.choose(r).unwrap();
            let field = match r.gen_range(0..4) {
                0 => m.title.clone(),
                1 => m.director.clone(),
                2 => m.cast.first().cloned().unwrap_or_default(),
                _ => m.description.clone(),
            };
            let chars: Vec<char> = field.chars().collect();
            if chars.is_empty() {
                Some("a".into())
            } else {
                let a = r.gen_range(0..chars.len());
                let b = r.gen_range(a..=chars.len().min(a + 6));
                let s: String = chars[a..b].iter().collect();
                Some(if r.gen_bool(0.3) { s.to_uppercase() } else { s })
            }
        }
        4 => Some(["e", "the", "zzz", "an", "o"].choose(r).unwrap().to_string()),
        _ => Some(char::from(r.gen_range(b'a'..=b'z')).to_string()),
    };
    let genre = match r.gen_range(0..3) {
        0 => Some(GENRES.choose(r).unwrap().to_string()),
        1 if r.gen_bool(0.3) => Some(GENRES.choose(r).unwrap().to_uppercase()),
        _ => None,
    };
    let language = r.gen_bool(0.25).then(|| LANGUAGES.choose(r).unwrap().to_string());
    let anchor = NOW.date();
    let day = |r: &mut ChaCha8Rng| anchor + chrono::Duration::days(r.gen_range(-800..60));
    let date_from = r.gen_bool(0.3).then(|| day(r));
    let date_to = r.gen_bool(0.3).then(|| day(r));
    let min_rating = match r.gen_range(0..5) {
        0 => Some(r.gen_range(1.0..=5.0)),
        1 => Some(f64::from(r.gen_range(1..=5))),
        2 if r.gen_bool(0.2) => Some([0.5, 5.5, 0.0][r.gen_range(0..3)]),
        _ => None,
    };
    let sort = *[SortKey::Relevance, SortKey::Popularity, SortKey::ReleaseDate, SortKey::Rating]
        .choose(r)
        .unwrap();
    SearchQuery { text, genre, language, date_from, date_to, min_rating, sort }
}

pub fn search_oracle(_: &Runtime) -> Verdict {
    let mut v = Verdict::default();
    let store = seeded(100, 5, 11);
    let t = store.snapshot();
    v.check("catalog", t.movies.len() == 100, format!("{} movies", t.movies.len()));
    let mut r = rng(5);
    let (mut nonempty, mut invalid, mut mismatches) = (0, 0, 0);
    for i in 0..500 {
        let q = random_query(&mut r, &t);
        let lib = catalog::search_movies(&t, &q).ok().map(|ms| ms.into_iter().map(|m| m.movie_id).collect::<Vec<_>>());
        let oracle = oracle_search(&t, &q);
        match &oracle {
            None => invalid += 1,
            Some(ids) if !ids.is_empty() => nonempty += 1,
            _ => {}
        }
        if lib != oracle {
            mismatches += 1;
            if mismatches <= 3 {
                v.check("oracle", false, format!("query {i} {q:?}: lib {lib:?} oracle {oracle:?}"));
            }
        }
    }
    v.check("oracle", mismatches == 0, format!("{mismatches} of 500 queries differ"));
    v.note(format!("500 queries: {nonempty} non-empty results, {invalid} invalid, {mismatches} mismatches"));
    v
}

// ------------------------------------------------------------ recommendation

pub fn recommendation(_: &Runtime) -> Verdict {
    let mut v = Verdict::default();
    let store = seeded(60, 4, 23);
    let t = store.snapshot();
    let base = RecommendWeights::default();
    let factors = [1e-6, 0.001, 0.37, 3.0, 1e3, 1e6];
    let mut users_checked = 0;
    let mut changed = 0;
    for u in t.users.keys() {
        let has_history = t.reviews.values().any(|r| r.user_id == *u) || t.bookings.values().any(|b| b.user_id == *u && b.is_active());
        if !has_history {
            continue;
        }
        users_checked += 1;
        let order = |w: &RecommendWeights| -> Vec<MovieId> {
            catalog::recommend(&t, *u, t.movies.len(), w).unwrap().into_iter().map(|r| r.movie_id).collect()
        };
        let reference = order(&base);
        for f in factors {
            if order(&base.scaled(f)) != reference {
                changed += 1;
                v.check("invariance", false, format!("user {u} factor {f}: ordering changed"));
            }
        }
    }
    v.check("invariance", changed == 0 && users_checked > 10, format!("{changed} changes over {users_checked} users"));

    // worked example: drama fan, drama movie with mean rating 4.0 and mean compound 0.44
    let store = Store::in_memory();
    let setup = store.transaction(|tx| {
        for u in 1..=3 {
            tx.put(user(u))?;
        }
        tx.put(movie(1, "drama"))?;
        tx.put(movie(2, "drama"))?;
        let mut put_review = |id: u64, u: u64, m: u64, rating: u8, compound: f64| {
            tx.put(Review {
                review_id: ReviewId(id),
                user_id: UserId(u),
                movie_id: MovieId(m),
                rating,
                text: String::new(),
                sentiment: SentimentScore { raw_sum: 0.0, compound, label: SentimentLabel::Positive, hit_count: 1 },
                created_at: NOW,
            })
        };
        put_review(1, 1, 1, 5, 0.5)?;
        put_review(2, 2, 2, 4, 0.40)?;
        put_review(3, 3, 2, 4, 0.48)?;
        Ok::<_, StoreError>(())
    });
    v.check("example-setup", setup.is_ok(), format!("{setup:?}"));
    let t = store.snapshot();
    let recs = catalog::recommend(&t, UserId(1), 5, &base).unwrap();
    let score = recs.iter().find(|r| r.movie_id == MovieId(2)).map(|r| r.score);
    let ok = score.is_some_and(|s| (s - 0.856).abs() <= 1e-9);
    v.check("example", ok, format!("score {score:?}, expected 0.856"));
    let direct = base.combine(1.0, 4.0 / 5.0, (0.44 + 1.0) / 2.0);
    v.check("example-formula", (direct - 0.856).abs() <= 1e-9, format!("{direct}"));
    let agg: Option<AggregateSentiment> = catalog::movie_stats(&t)[&MovieId(2)].sentiment;
    v.note(format!(
        "{users_checked} users x {} factors, {changed} ordering changes; example score {:.12} (mean compound {:?})",
        factors.len(),
        score.unwrap_or(f64::NAN),
        agg.map(|a| a.mean_compound)
    ));
    v
}

// ---------------------------------------------------------------- percentile

pub fn percentile_oracle(_: &Runtime) -> Verdict {
    use stageseat_bench::percentile;
    let mut v = Verdict::default();
    let ten: Vec<f64> = (1..=10).map(|x| f64::from(x * 10)).collect();
    v.check("example", percentile(&ten, 50.0) == Ok(50.0), format!("p50 {:?}", percentile(&ten, 50.0)));
    v.check("example", percentile(&ten, 95.0) == Ok(100.0), format!("p95 {:?}", percentile(&ten, 95.0)));
    v.check("singleton", percentile(&[42.0], 73.0) == Ok(42.0), "singleton");
    v.check("empty", percentile(&[], 50.0).is_err(), "empty sample accepted");
    let mut r = rng(77);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n = r.gen_range(1..=300);
        let spread = *[5u32, 100, 100_000].choose(&mut r).unwrap();
        let mut sample: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(0..spread)) / 4.0).collect();
        let h = if r.gen_bool(0.5) { 100 * r.gen_range(1..=100u64) } else { r.gen_range(1..=10_000u64) };
        let expected = oracle_percentile(&sample, h);
        sample.sort_by(f64::total_cmp);
        let got = percentile(&sample, h as f64 / 100.0);
        if got != Ok(expected) {
            mismatches += 1;
            if mismatches <= 3 {
                v.check("oracle", false, format!("n {n} p {}: got {got:?} expected {expected}", h as f64 / 100.0));
            }
        }
    }
    v.check("oracle", mismatches == 0, format!("{mismatches} of 1000 samples differ"));
    v.note(format!("1000 random samples, {mismatches} mismatches; p50=50 and p95=100 on the ten-value example"));
    v
}

// --------------------------------------------------------------- persistence

fn reports(t: &Tables) -> Vec<u8> {
    let mut out = Vec::new();
    let all = Window::new(Timestamp(i64::MIN), Timestamp(i64::MAX)).unwrap();
    for g in [GroupBy::Movie, GroupBy::Venue, GroupBy::Day] {
        let r = analytics::sales_report(t, all, g, "INR");
        out.extend(serde_json::to_vec(&r).unwrap());
        out.extend(r.to_csv().unwrap().into_bytes());
    }
    let a = analytics::activity_report(t, all);
    out.extend(serde_json::to_vec(&a).unwrap());
    out.extend(a.to_csv().unwrap().into_bytes());
    let dates: BTreeSet<NaiveDate> = t.shows.values().map(|s| s.starts_at.date()).collect();
    for venue in t.venues.keys() {
        for d in &dates {
            let o = analytics::occupancy_report(t, *venue, *d).unwrap();
            out.extend(serde_json::to_vec(&o).unwrap());
            out.extend(o.to_csv().unwrap().into_bytes());
        }
    }
    for m in t.movies.keys() {
        let s = analytics::sentiment_report(t, *m).unwrap();
        out.extend(serde_json::to_vec(&s).unwrap());
        out.extend(s.to_csv().unwrap().into_bytes());
    }
    out
}

fn export(store: &Store) -> Vec<u8> {
    let mut buf = Vec::new();
    store.export_to_writer(&mut buf).unwrap();
    buf
}

pub fn persistence(_: &Runtime) -> Verdict {
    let mut v = Verdict::default();
    let store = Store::in_memory();
    let mut cfg = SeedConfig::new(150, 6, 99, NOW);
    cfg.users = 80;
    cfg.bookings = 350;
    cfg.reviews = 250;
    seed_store(&store, &Policy::default(), &Lexicon::seed(), &cfg).unwrap();
    let records = store.read(|t| t.records().count());
    v.check("size", records >= 1000, format!("{records} records"));

    let bytes = export(&store);
    let copy = Store::in_memory();
    let counts = copy.import_from_reader(&bytes[..]).unwrap();
    v.check("counts", counts.total() == records, format!("imported {} of {records}", counts.total()));
    let (a, b) = (reports(&store.snapshot()), reports(&copy.snapshot()));
    v.check("reports", a == b, format!("report bytes differ ({} vs {})", a.len(), b.len()));
    v.check("re-export", export(&copy) == bytes, "re-export differs");
    v.check("snapshot", copy.snapshot() == store.snapshot(), "tables differ");

    // randomized workload with injected aborts on a journaled store
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("journal.jsonl");
    let policy = Policy::default();
    let lex = Lexicon::seed();
    let (mut committed, mut aborted) = (0, 0);
    {
        let live = Store::open(&path, false).unwrap();
        live.import_from_reader(&bytes[..]).unwrap();
        let engine = BookingEngine::new(&live, &policy);
        let mut r = rng(31);
        let n_users = cfg.users as u64;
        let n_shows = (cfg.movies * cfg.shows_per_movie) as u64;
        for _ in 0..1500 {
            let res: Result<(), String> = match r.gen_range(0..7) {
                0 | 1 => {
                    let show = ShowId(r.gen_range(1..=n_shows));
                    // deleted shows fall back to a 1x1 probe, which the engine rejects
                    let (rows, cols) = live.read(|t| {
                        t.shows.get(&show).and_then(|s| t.venues.get(&s.venue_id)).map_or((1, 1), |ve| (ve.rows, ve.cols))
                    });
                    let seats = random_seats(&mut r, rows, cols, 3);
                    engine.book_seats(UserId(r.gen_range(1..=n_users)), show, &seats, 0, NOW).map(drop).map_err(|e| e.to_string())
                }
                2 => {
                    let active: Vec<Booking> = live.read(|t| t.bookings.values().filter(|b| b.is_active()).cloned().collect());
                    match active.choose(&mut r) {
                        Some(b) => engine
                            .cancel_booking(Actor { user_id: b.user_id, role: Role::User }, b.booking_id, NOW)
                            .map(drop)
                            .map_err(|e| e.to_string()),
                        None => Ok(()),
                    }
                }
                3 => submit_review(
                    &live,
                    &policy,
                    &lex,
                    UserId(r.gen_range(1..=n_users)),
                    MovieId(r.gen_range(1..=cfg.movies as u64)),
                    r.gen_range(1..=5),
                    "not bad",
                    NOW,
                )
                .map(drop)
                .map_err(|e| e.to_string()),
                4 => {
                    // delete something that may still be referenced
                    let kind = *[RecordKind::Movie, RecordKind::Venue, RecordKind::Show, RecordKind::User].choose(&mut r).unwrap();
                    let id = r.gen_range(1..=40);
                    live.transaction(|tx| tx.delete(kind, id)).map_err(|e| e.to_string())
                }
                _ => {
                    // several valid writes, then an injected abort
                    let k = r.gen_range(1..=4);
                    let out: Result<(), StoreError> = live.transaction(|tx| {
                        for _ in 0..k {
                            let id = tx.next_id(RecordKind::Movie);
                            tx.put(movie(id, "noir"))?;
                        }
                        let show = ShowId(r.gen_range(1..=n_shows));
                        if let Some(mut s) = tx.get::<Show>(show).cloned() {
                            s.sold.insert(SeatId::new(0, 0));
                            tx.put(s)?;
                        }
                        Err(StoreError::Conflict("injected abort".into()))
                    });
                    out.map_err(|e| e.to_string())
                }
            };
            match res {
                Ok(()) => committed += 1,
                Err(_) => aborted += 1,
            }
        }
        let t = live.snapshot();
        let dangling = t.integrity_violations();
        v.check("integrity", dangling.is_empty(), format!("{} violations, first {:?}", dangling.len(), dangling.first()));
        let sold_consistent = t.shows.values().all(|s| {
            let booked: BTreeSet<SeatId> = t
                .bookings
                .values()
                .filter(|b| b.show_id == s.show_id && b.is_active())
                .flat_map(|b| b.seats.iter().copied())
                .collect();
            booked == s.sold
        });
        v.check("sold-sets", sold_consistent, "show.sold differs from active booking seats");
        drop(t);
        let before = export(&live);
        drop(live);
        let reopened = Store::open(&path, false).unwrap();
        v.check("replay", export(&reopened) == before, "journal replay differs from live state");
        v.check("replay-integrity", reopened.read(|t| t.integrity_violations().is_empty()), "replayed store has violations");
    }
    v.note(format!(
        "{records} records round-tripped with identical report bytes; workload: {committed} commits, {aborted} aborts/rejections, 0 dangling ids required"
    ));
    v
}
