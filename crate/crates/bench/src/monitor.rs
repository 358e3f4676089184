//! CPU and RSS sampling of a local process through `/proc`.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use tokio::sync::watch;

/// `/proc` reports CPU time in USER_HZ ticks, which Linux fixes at 100.
const TICKS_PER_SEC: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceSample {
    pub t_s: f64,
    pub cpu_pct: f64,
    pub rss_kb: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceSummary {
    pub pid: u32,
    pub mean_cpu_pct: f64,
    pub max_cpu_pct: f64,
    pub max_rss_kb: u64,
    pub samples: Vec<ResourceSample>,
}

impl ResourceSummary {
    fn from_samples(pid: u32, samples: Vec<ResourceSample>) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let n = samples.len() as f64;
        Some(ResourceSummary {
            pid,
            mean_cpu_pct: samples.iter().map(|s| s.cpu_pct).sum::<f64>() / n,
            max_cpu_pct: samples.iter().map(|s| s.cpu_pct).fold(0.0, f64::max),
            max_rss_kb: samples.iter().map(|s| s.rss_kb).max().unwrap_or(0),
            samples,
        })
    }
}

/// utime + stime in ticks. Fields 14 and 15, counted after the `)` that
/// closes the command name.
pub fn parse_cpu_ticks(stat: &str) -> Option<u64> {
    let rest = &stat[stat.rfind(')')? + 1..];
    let fields: Vec<&str> = rest.split_whitespace().collect();
    let utime: u64 = fields.get(11)?.parse().ok()?;
    let stime: u64 = fields.get(12)?.parse().ok()?;
    Some(utime + stime)
}

pub fn parse_rss_kb(status: &str) -> Option<u64> {
    status
        .lines()
        .find_map(|l| l.strip_prefix("VmRSS:"))
        .and_then(|v| v.split_whitespace().next()?.parse().ok())
}

fn read(pid: u32) -> Option<(u64, u64)> {
    let stat = std::fs::read_to_string(format!("/proc/{pid}/stat")).ok()?;
    let status = std::fs::read_to_string(format!("/proc/{pid}/status")).ok()?;
    Some((parse_cpu_ticks(&stat)?, parse_rss_kb(&status)?))
}

/// Sample `pid` every `every` until `stop` flips to true.
pub async fn sample_until(pid: u32, every: Duration, mut stop: watch::Receiver<bool>) -> Option<ResourceSummary> {
    let start = Instant::now();
    let mut prev = (Instant::now(), read(pid)?.0);
    let mut samples = Vec::new();
    loop {
        tokio::select! {
            _ = tokio::time::sleep(every) => {}
            _ = stop.changed() => break,
        }
        let Some((ticks, rss_kb)) = read(pid) else { break };
        let now = Instant::now();
        let dt = now.duration_since(prev.0).as_secs_f64();
        let cpu_pct = if dt > 0.0 {
            100.0 * (ticks.saturating_sub(prev.1)) as f64 / TICKS_PER_SEC / dt
        } else {
            0.0
        };
        samples.push(ResourceSample {
            t_s: now.duration_since(start).as_secs_f64(),
            cpu_pct,
            rss_kb,
        });
        prev = (now, ticks);
    }
    ResourceSummary::from_samples(pid, samples)
}
