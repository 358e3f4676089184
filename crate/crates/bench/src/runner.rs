//! Closed-loop virtual users against a live server.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reqwest::{Client, Method, StatusCode};
use serde_json::{json, Value};
use thiserror::Error;
use tokio::sync::{mpsc, watch};

use crate::config::{Action, ConfigError, ScenarioConfig};
use crate::monitor;
use crate::report::{KpiReport, Outcome, Sample};
use crate::workload::{user_rngs, ActionStream};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("target {url} unreachable: {reason}")]
    TargetUnreachable { url: String, reason: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("http client: {0}")]
    Client(String),
}

const PASSWORD: &str = "bench-password";
const CANCEL_PROBABILITY: f64 = 0.15;
const REDEEM_PROBABILITY: f64 = 0.3;
const SEARCH_TERMS: &[&str] = &[
    "night", "love", "city", "war", "dream", "the", "star", "king", "river", "shadow", "ghost", "last",
];
const SORTS: &[&str] = &["relevance", "popularity", "release_date", "rating"];
const REVIEW_TEXTS: &[&str] = &[
    "great movie",
    "not good at all",
    "very good acting",
    "boring and slow",
    "an absolute masterpiece",
    "the projector was fine",
    "terrible sound, hated it",
    "",
];

async fn precheck(client: &Client, base: &str) -> Result<(), BenchError> {
    let url = format!("{base}/api/policy");
    let unreachable = |reason: String| BenchError::TargetUnreachable {
        url: base.to_string(),
        reason,
    };
    let resp = client
        .get(&url)
        .timeout(Duration::from_secs(5))
        .send()
        .await
        .map_err(|e| unreachable(e.to_string()))?;
    if !resp.status().is_success() {
        return Err(unreachable(format!("GET /api/policy returned {}", resp.status())));
    }
    Ok(())
}

/// Run `cfg.users` virtual users for `cfg.duration` and summarise every
/// request they made.
pub async fn run_load(cfg: &ScenarioConfig) -> Result<KpiReport, BenchError> {
    cfg.validate()?;
    let base = cfg.base_url.trim_end_matches('/').to_string();
    let client = Client::builder()
        .timeout(cfg.request_timeout)
        .pool_max_idle_per_host(cfg.users)
        .build()
        .map_err(|e| BenchError::Client(e.to_string()))?;
    precheck(&client, &base).await?;

    let (tx, mut rx) = mpsc::unbounded_channel::<Sample>();
    let collector = tokio::spawn(async move {
        let mut all = Vec::new();
        while let Some(s) = rx.recv().await {
            all.push(s);
        }
        all
    });
    let (stop_tx, stop_rx) = watch::channel(false);
    let monitor = cfg
        .monitor_pid
        .map(|pid| tokio::spawn(monitor::sample_until(pid, Duration::from_millis(500), stop_rx)));

    let nonce = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_nanos() as u64 & 0xffff_ffff);
    let start = Instant::now();
    let deadline = start + cfg.duration;
    let shared = Arc::new(Shared {
        client,
        base: base.clone(),
        tx,
    });
    let mut handles = Vec::with_capacity(cfg.users);
    for idx in 0..cfg.users {
        let delay = cfg.ramp.mul_f64(idx as f64 / cfg.users as f64);
        let (actions, params) = user_rngs(cfg.seed, idx);
        let actions = ActionStream::new(&cfg.mix, actions)?;
        let vu = VirtualUser {
            shared: shared.clone(),
            username: format!("vu{nonce:08x}_{idx}"),
            token: None,
            params,
            movies: Vec::new(),
            reviewed: HashSet::new(),
            balance: 0,
        };
        let think = cfg.think;
        handles.push(tokio::spawn(async move {
            tokio::time::sleep(delay).await;
            vu.run(actions, deadline, think).await;
        }));
    }
    drop(shared);
    for h in handles {
        // a panicking user loses only its own remaining samples
        let _ = h.await;
    }
    let wall_time_s = start.elapsed().as_secs_f64();
    let samples = collector.await.unwrap_or_default();
    let _ = stop_tx.send(true);
    let resources = match monitor {
        Some(h) => h.await.ok().flatten(),
        None => None,
    };
    Ok(KpiReport::assemble(
        &base,
        cfg.users,
        cfg.seed,
        cfg.mix.to_string(),
        wall_time_s,
        &samples,
        resources,
    ))
}

struct Shared {
    client: Client,
    base: String,
    tx: mpsc::UnboundedSender<Sample>,
}

struct VirtualUser {
    shared: Arc<Shared>,
    username: String,
    token: Option<String>,
    params: ChaCha8Rng,
    movies: Vec<u64>,
    reviewed: HashSet<u64>,
    balance: i64,
}

fn classify(status: StatusCode, body: &Value) -> Outcome {
    if status.is_success() {
        Outcome::Ok
    } else if status == StatusCode::CONFLICT && matches!(body["error"].as_str(), Some("SeatTaken" | "Houseful")) {
        Outcome::Contended
    } else if status.is_server_error() {
        Outcome::ServerError
    } else {
        Outcome::ClientError
    }
}

fn seat_label(row: usize, col: usize) -> String {
    format!("{}{}", (b'A' + row as u8) as char, col + 1)
}

impl VirtualUser {
    /// One timed request. Returns the body on 2xx.
    async fn request(&self, endpoint: &'static str, method: Method, path: &str, body: Option<Value>) -> Option<Value> {
        let s = &self.shared;
        let mut req = s.client.request(method, format!("{}{path}", s.base));
        if let Some(t) = &self.token {
            req = req.bearer_auth(t);
        }
        if let Some(b) = &body {
            req = req.json(b);
        }
        let started = Instant::now();
        let result = match req.send().await {
            Ok(resp) => {
                let status = resp.status();
                match resp.bytes().await {
                    Ok(bytes) => {
                        let value: Value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
                        Ok((status, value))
                    }
                    Err(_) => Err(()),
                }
            }
            Err(_) => Err(()),
        };
        let latency_ms = started.elapsed().as_secs_f64() * 1e3;
        let (outcome, value) = match result {
            Ok((status, value)) => (classify(status, &value), Some(value)),
            Err(()) => (Outcome::Transport, None),
        };
        let _ = s.tx.send(Sample {
            endpoint,
            latency_ms,
            outcome,
        });
        value.filter(|_| outcome == Outcome::Ok)
    }

    async fn login(&mut self) -> bool {
        let creds = json!({
            "username": self.username,
            "email": format!("{}@bench.invalid", self.username),
            "password": PASSWORD,
        });
        if self.request("register", Method::POST, "/api/register", Some(creds.clone())).await.is_none() {
            return false;
        }
        match self.request("login", Method::POST, "/api/login", Some(creds)).await {
            Some(v) => {
                self.token = v["token"].as_str().map(String::from);
                self.token.is_some()
            }
            None => false,
        }
    }

    async fn run(mut self, actions: ActionStream, deadline: Instant, think: Duration) {
        if Instant::now() >= deadline || !self.login().await {
            return;
        }
        for action in actions {
            if Instant::now() >= deadline {
                break;
            }
            match action {
                Action::Browse => self.browse().await,
                Action::Search => self.search().await,
                Action::Book => self.book().await,
                Action::Review => self.review().await,
            }
            if !think.is_zero() {
                tokio::time::sleep(think).await;
            }
        }
    }

    async fn browse(&mut self) {
        if let Some(v) = self.request("browse", Method::GET, "/api/movies?sort=popularity", None).await {
            self.movies = v["movies"]
                .as_array()
                .map(|a| a.iter().filter_map(|m| m["movie_id"].as_u64()).collect())
                .unwrap_or_default();
        }
    }

    async fn search(&mut self) {
        let term = *SEARCH_TERMS.choose(&mut self.params).unwrap_or(&"the");
        if self.params.gen_bool(0.25) {
            self.request("venue_search", Method::GET, &format!("/api/venues?q={term}"), None).await;
        } else {
            let sort = *SORTS.choose(&mut self.params).unwrap_or(&"relevance");
            self.request("search", Method::GET, &format!("/api/movies?q={term}&sort={sort}"), None)
                .await;
        }
    }

    async fn known_movie(&mut self) -> Option<u64> {
        if self.movies.is_empty() {
            self.browse().await;
        }
        self.movies.choose(&mut self.params).copied()
    }

    async fn book(&mut self) {
        let Some(movie) = self.known_movie().await else { return };
        let Some(detail) = self.request("movie_detail", Method::GET, &format!("/api/movies/{movie}"), None).await else {
            return;
        };
        let shows: Vec<u64> = detail["upcoming_shows"]
            .as_array()
            .map(|a| a.iter().filter_map(|l| l["show"]["show_id"].as_u64()).collect())
            .unwrap_or_default();
        let Some(&show) = shows.choose(&mut self.params) else { return };
        let Some(grid) = self.request("seats", Method::GET, &format!("/api/shows/{show}/seats"), None).await else {
            return;
        };
        let mut free = Vec::new();
        let mut all = Vec::new();
        for (r, row) in grid["cells"].as_array().into_iter().flatten().enumerate() {
            for (c, cell) in row.as_array().into_iter().flatten().enumerate() {
                all.push(seat_label(r, c));
                if cell == "free" {
                    free.push(seat_label(r, c));
                }
            }
        }
        // a sold-out grid still gets one attempt, which exercises Houseful
        let pool = if free.is_empty() { &all } else { &free };
        let n = self.params.gen_range(1..=2usize).min(pool.len());
        let seats: Vec<String> = pool.choose_multiple(&mut self.params, n).cloned().collect();
        if seats.is_empty() {
            return;
        }
        let coins = if self.balance > 0 && self.params.gen_bool(REDEEM_PROBABILITY) {
            self.params.gen_range(1..=self.balance.min(10))
        } else {
            0
        };
        let body = json!({"show_id": show, "seats": seats, "coins_redeemed": coins});
        let Some(created) = self.request("book", Method::POST, "/api/bookings", Some(body)).await else {
            return;
        };
        self.balance = created["coin_balance"].as_i64().unwrap_or(self.balance);
        if self.params.gen_bool(CANCEL_PROBABILITY) {
            if let Some(id) = created["booking"]["booking_id"].as_u64() {
                if let Some(v) = self.request("cancel", Method::DELETE, &format!("/api/bookings/{id}"), None).await {
                    self.balance = v["coin_balance"].as_i64().unwrap_or(self.balance);
                }
            }
        }
    }

    async fn review(&mut self) {
        if self.movies.is_empty() {
            self.browse().await;
        }
        let candidates: Vec<u64> = self.movies.iter().copied().filter(|m| !self.reviewed.contains(m)).collect();
        let Some(&movie) = candidates.choose(&mut self.params) else {
            self.browse().await;
            return;
        };
        self.reviewed.insert(movie);
        let text = *REVIEW_TEXTS.choose(&mut self.params).unwrap_or(&"");
        let rating = self.params.gen_range(1..=5u8);
        let body = json!({"rating": rating, "text": text});
        if let Some(v) = self
            .request("review", Method::POST, &format!("/api/movies/{movie}/reviews"), Some(body))
            .await
        {
            self.balance = v["coin_balance"].as_i64().unwrap_or(self.balance);
        }
    }
}
