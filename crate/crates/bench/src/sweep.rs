use serde::{Deserialize, Serialize};

use crate::config::{check_steps, ConfigError, ScenarioConfig};
use crate::report::KpiReport;
use crate::runner::{run_load, BenchError};

/// Error rate above this marks the knee.
pub const KNEE_ERROR_RATE_PCT: f64 = 1.0;
/// p95 growth versus the first step that marks the knee.
pub const KNEE_P95_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStep {
    pub users: usize,
    pub report: Option<KpiReport>,
    /// Set when the step failed; earlier steps are unaffected.
    pub error: Option<String>,
    pub knee: bool,
}

/// Index of the first step whose error rate exceeds 1% or whose p95 is more
/// than double the first step's.
pub fn find_knee(steps: &[SweepStep]) -> Option<usize> {
    let baseline = steps
        .first()
        .and_then(|s| s.report.as_ref())
        .and_then(|r| r.overall.latency_ms)
        .map(|l| l.p95);
    steps.iter().position(|s| {
        let Some(r) = &s.report else { return false };
        let p95 = r.overall.latency_ms.map(|l| l.p95);
        r.overall.error_rate_pct > KNEE_ERROR_RATE_PCT
            || matches!((baseline, p95), (Some(b), Some(p)) if p > KNEE_P95_FACTOR * b)
    })
}

/// Run one cold-started load per step. A failing step is recorded and the
/// sweep moves on.
pub async fn stress_sweep(cfg: &ScenarioConfig, user_steps: &[usize]) -> Result<Vec<SweepStep>, ConfigError> {
    check_steps(user_steps)?;
    let mut out = Vec::with_capacity(user_steps.len());
    for &users in user_steps {
        let step_cfg = ScenarioConfig { users, ..cfg.clone() };
        let step = match run_load(&step_cfg).await {
            Ok(report) => SweepStep {
                users,
                report: Some(report),
                error: None,
                knee: false,
            },
            Err(BenchError::Config(e)) => return Err(e),
            Err(e) => SweepStep {
                users,
                report: None,
                error: Some(e.to_string()),
                knee: false,
            },
        };
        out.push(step);
    }
    if let Some(i) = find_knee(&out) {
        out[i].knee = true;
    }
    Ok(out)
}

/// Fixed-width comparison table for terminals.
pub fn comparison_table(steps: &[SweepStep]) -> String {
    let mut s = format!(
        "{:>6} {:>9} {:>8} {:>9} {:>9} {:>9}  note\n",
        "users", "requests", "err%", "rps", "p50 ms", "p95 ms"
    );
    for step in steps {
        match &step.report {
            Some(r) => {
                let l = r.overall.latency_ms;
                s += &format!(
                    "{:>6} {:>9} {:>8.2} {:>9.1} {:>9.2} {:>9.2}  {}\n",
                    step.users,
                    r.overall.request_count,
                    r.overall.error_rate_pct,
                    r.overall.throughput_rps,
                    l.map_or(0.0, |l| l.p50),
                    l.map_or(0.0, |l| l.p95),
                    if step.knee { "knee" } else { "" }
                );
            }
            None => {
                s += &format!(
                    "{:>6} {:>9} {:>8} {:>9} {:>9} {:>9}  {}\n",
                    step.users,
                    "-",
                    "-",
                    "-",
                    "-",
                    "-",
                    step.error.as_deref().unwrap_or("failed")
                );
            }
        }
    }
    s
}
