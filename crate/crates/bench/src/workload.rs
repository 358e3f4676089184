//! Deterministic per-user action streams.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{Action, ConfigError, Mix};

/// Two independent streams per virtual user: one picks actions, the other
/// picks parameters. Responses only influence the second, so the action
/// sequence depends on `(seed, user)` alone.
pub fn user_rngs(seed: u64, user: usize) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut actions = ChaCha8Rng::seed_from_u64(seed);
    actions.set_stream(2 * user as u64);
    let mut params = ChaCha8Rng::seed_from_u64(seed);
    params.set_stream(2 * user as u64 + 1);
    (actions, params)
}

pub struct ActionStream {
    rng: ChaCha8Rng,
    dist: WeightedIndex<f64>,
}

impl ActionStream {
    pub fn new(mix: &Mix, rng: ChaCha8Rng) -> Result<Self, ConfigError> {
        mix.validate()?;
        let dist = WeightedIndex::new(Action::ALL.map(|a| mix.weight(a))).map_err(|_| ConfigError::EmptyMix)?;
        Ok(ActionStream { rng, dist })
    }

    pub fn for_user(mix: &Mix, seed: u64, user: usize) -> Result<Self, ConfigError> {
        Self::new(mix, user_rngs(seed, user).0)
    }
}

impl Iterator for ActionStream {
    type Item = Action;

    fn next(&mut self) -> Option<Action> {
        Some(Action::ALL[self.dist.sample(&mut self.rng)])
    }
}
