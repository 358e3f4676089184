use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::monitor::ResourceSummary;
use crate::stats::LatencyStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    /// SeatTaken or Houseful: correct refusals, not failures.
    Contended,
    /// Any other 4xx.
    ClientError,
    ServerError,
    Transport,
}

impl Outcome {
    pub fn is_error(self) -> bool {
        matches!(self, Outcome::ClientError | Outcome::ServerError | Outcome::Transport)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub endpoint: &'static str,
    pub latency_ms: f64,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointKpi {
    pub request_count: u64,
    pub ok_count: u64,
    pub contended_count: u64,
    pub error_count: u64,
    pub client_error_count: u64,
    pub server_error_count: u64,
    pub transport_error_count: u64,
    pub error_rate_pct: f64,
    pub throughput_rps: f64,
    /// `None` when no requests were made.
    pub latency_ms: Option<LatencyStats>,
}

impl EndpointKpi {
    fn build(samples: &[&Sample], wall_time_s: f64) -> Self {
        let count = |o: Outcome| samples.iter().filter(|s| s.outcome == o).count() as u64;
        let request_count = samples.len() as u64;
        let error_count = samples.iter().filter(|s| s.outcome.is_error()).count() as u64;
        let mut latencies: Vec<f64> = samples.iter().map(|s| s.latency_ms).collect();
        EndpointKpi {
            request_count,
            ok_count: count(Outcome::Ok),
            contended_count: count(Outcome::Contended),
            error_count,
            client_error_count: count(Outcome::ClientError),
            server_error_count: count(Outcome::ServerError),
            transport_error_count: count(Outcome::Transport),
            error_rate_pct: if request_count == 0 {
                0.0
            } else {
                100.0 * error_count as f64 / request_count as f64
            },
            throughput_rps: if wall_time_s > 0.0 {
                request_count as f64 / wall_time_s
            } else {
                0.0
            },
            latency_ms: LatencyStats::from_samples(&mut latencies),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostInfo {
    pub os: String,
    pub arch: String,
    pub cpus: usize,
}

impl HostInfo {
    pub fn current() -> Self {
        HostInfo {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub base_url: String,
    pub users: usize,
    pub seed: u64,
    pub mix: String,
    pub wall_time_s: f64,
    pub overall: EndpointKpi,
    pub endpoints: BTreeMap<String, EndpointKpi>,
    pub host: HostInfo,
    pub resources: Option<ResourceSummary>,
}

impl KpiReport {
    pub fn assemble(
        base_url: &str,
        users: usize,
        seed: u64,
        mix: String,
        wall_time_s: f64,
        samples: &[Sample],
        resources: Option<ResourceSummary>,
    ) -> Self {
        let mut by_endpoint: BTreeMap<&str, Vec<&Sample>> = BTreeMap::new();
        for s in samples {
            by_endpoint.entry(s.endpoint).or_default().push(s);
        }
        let all: Vec<&Sample> = samples.iter().collect();
        KpiReport {
            base_url: base_url.into(),
            users,
            seed,
            mix,
            wall_time_s,
            overall: EndpointKpi::build(&all, wall_time_s),
            endpoints: by_endpoint
                .into_iter()
                .map(|(k, v)| (k.to_string(), EndpointKpi::build(&v, wall_time_s)))
                .collect(),
            host: HostInfo::current(),
            resources,
        }
    }

    /// Rows per endpoint followed by an `overall` row.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut csv::Writer<W>, users_column: bool) -> csv::Result<()> {
        for (name, kpi) in self.endpoints.iter().chain(std::iter::once((&"overall".to_string(), &self.overall))) {
            let l = kpi.latency_ms;
            let f = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.3}"));
            let mut rec = Vec::new();
            if users_column {
                rec.push(self.users.to_string());
            }
            rec.extend([
                name.clone(),
                kpi.request_count.to_string(),
                kpi.error_count.to_string(),
                format!("{:.3}", kpi.error_rate_pct),
                format!("{:.3}", kpi.throughput_rps),
                f(l.map(|l| l.p50)),
                f(l.map(|l| l.p95)),
                f(l.map(|l| l.p99)),
                f(l.map(|l| l.mean)),
                f(l.map(|l| l.max)),
            ]);
            w.write_record(rec)?;
        }
        Ok(())
    }
}

pub const CSV_HEADER: [&str; 10] = [
    "endpoint",
    "count",
    "errors",
    "error_rate_pct",
    "rps",
    "p50",
    "p95",
    "p99",
    "mean",
    "max",
];

pub fn to_csv(reports: &[&KpiReport], users_column: bool) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = Vec::new();
    if users_column {
        header.push("users");
    }
    header.extend(CSV_HEADER);
    w.write_record(&header)?;
    for r in reports {
        r.write_csv(&mut w, users_column)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}
