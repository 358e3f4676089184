use serde::{Deserialize, Serialize};

use crate::domain::COIN_VALUE_MINOR;

/// Coin economy and cancellation constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Policy {
    pub earn_per_seat: u64,
    pub review_earn: u64,
    pub coin_value_minor: u64,
    pub redeem_cap_pct: u64,
    pub cancel_cutoff_hours: i64,
    pub currency_code: String,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            earn_per_seat: 1,
            review_earn: 5,
            coin_value_minor: COIN_VALUE_MINOR,
            redeem_cap_pct: 20,
            cancel_cutoff_hours: 2,
            currency_code: "INR".to_string(),
        }
    }
}
