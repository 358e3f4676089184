use thiserror::Error;

use crate::booking::{earn_review_coins_in, BookingError};
use crate::domain::*;
use crate::policy::Policy;
use crate::sentiment::{score_text, Lexicon};
use crate::store::{RecordKind, Store, StoreError};

#[derive(Debug, Error)]
pub enum ReviewError {
    #[error("unknown movie {0}")]
    UnknownMovie(MovieId),
    #[error("unknown user {0}")]
    UnknownUser(UserId),
    #[error("rating {0} is outside 1..=5")]
    InvalidRating(u8),
    #[error("user already reviewed this movie")]
    DuplicateReview,
    #[error(transparent)]
    Booking(#[from] BookingError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Score the text, store the review and grant the first-review coins in one
/// transaction.
pub fn submit_review(
    store: &Store,
    policy: &Policy,
    lexicon: &Lexicon,
    user_id: UserId,
    movie_id: MovieId,
    rating: u8,
    text: &str,
    now: Timestamp,
) -> Result<(Review, CoinTransaction), ReviewError> {
    if !(1..=5).contains(&rating) {
        return Err(ReviewError::InvalidRating(rating));
    }
    let sentiment = score_text(lexicon, text);
    store.transaction(|tx| {
        let t = tx.tables();
        if !t.users.contains_key(&user_id) {
            return Err(ReviewError::UnknownUser(user_id));
        }
        if !t.movies.contains_key(&movie_id) {
            return Err(ReviewError::UnknownMovie(movie_id));
        }
        if t
            .reviews
            .values()
            .any(|r| r.user_id == user_id && r.movie_id == movie_id)
        {
            return Err(ReviewError::DuplicateReview);
        }
        let review = Review {
            review_id: ReviewId(tx.next_id(RecordKind::Review)),
            user_id,
            movie_id,
            rating,
            text: text.to_string(),
            sentiment,
            created_at: now,
        };
        tx.put(review.clone())?;
        let coins = earn_review_coins_in(tx, policy, user_id, review.review_id, now)?;
        Ok((review, coins))
    })
}
