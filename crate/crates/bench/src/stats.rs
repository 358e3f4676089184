use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("percentile of an empty sample")]
    EmptySample,
    #[error("percentile {0} outside (0, 100]")]
    InvalidPercentile(f64),
}

/// Nearest-rank percentile of an ascending sample: the value at 1-based rank
/// `ceil(p/100 * n)`.
///
/// `p * n / 100` within 1e-9 of an integer counts as that integer, so decimal
/// percentiles such as 70 on n = 10 land on rank 7 rather than 8.
pub fn percentile(sorted: &[f64], p: f64) -> Result<f64, StatsError> {
    if sorted.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if !(p > 0.0 && p <= 100.0) {
        return Err(StatsError::InvalidPercentile(p));
    }
    let n = sorted.len();
    let exact = p * n as f64 / 100.0;
    let nearest = exact.round();
    let rank = if (exact - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        exact.ceil()
    };
    let rank = (rank as usize).clamp(1, n);
    Ok(sorted[rank - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub p50: f64,
    pub p95: f64,
    pub p99: f64,
    pub mean: f64,
    pub max: f64,
}

impl LatencyStats {
    /// `None` for an empty sample. Sorts in place.
    pub fn from_samples(samples: &mut [f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        samples.sort_by(f64::total_cmp);
        let p = |q| percentile(samples, q).ok();
        Some(LatencyStats {
            p50: p(50.0)?,
            p95: p(95.0)?,
            p99: p(99.0)?,
            mean: samples.iter().sum::<f64>() / samples.len() as f64,
            max: *samples.last()?,
        })
    }
}
