#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::Arc;

use reqwest::{Client, Method, Response, StatusCode};
use serde_json::{json, Value};
use stageseat_core::Timestamp;
use stageseat_server::clock::{Clock, ManualClock};
use stageseat_server::config::AdminBootstrap;
use stageseat_server::{AppState, Config};
use tokio::sync::oneshot;

pub const ADMIN: &str = "root";
pub const ADMIN_PASSWORD: &str = "admin-password";
pub const START: Timestamp = Timestamp(1_780_000_000_000);

pub struct TestServer {
    pub base: String,
    pub addr: SocketAddr,
    pub state: AppState,
    pub clock: Arc<ManualClock>,
    pub client: Client,
    stop: Option<oneshot::Sender<()>>,
}

impl Drop for TestServer {
    fn drop(&mut self) {
        if let Some(tx) = self.stop.take() {
            let _ = tx.send(());
        }
    }
}

pub fn test_config() -> Config {
    Config {
        pbkdf2_iterations: 1_000,
        admin: Some(AdminBootstrap {
            username: ADMIN.into(),
            password: ADMIN_PASSWORD.into(),
            email: None,
        }),
        ..Config::default()
    }
}

pub async fn spawn() -> TestServer {
    spawn_with(test_config()).await
}

pub async fn spawn_with(cfg: Config) -> TestServer {
    let clock = Arc::new(ManualClock::new(START));
    let state = AppState::with_clock(&cfg, clock.clone() as Arc<dyn Clock>).unwrap();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = oneshot::channel();
    let served = state.clone();
    tokio::spawn(async move {
        stageseat_server::serve(listener, served, async {
            let _ = rx.await;
        })
        .await
        .unwrap();
    });
    TestServer {
        base: format!("http://{addr}"),
        addr,
        state,
        clock,
        client: Client::new(),
        stop: Some(tx),
    }
}

impl TestServer {
    pub async fn call(&self, method: Method, path: &str, token: Option<&str>, body: Option<Value>) -> Response {
        let mut req = self.client.request(method, format!("{}{path}", self.base));
        if let Some(t) = token {
            req = req.bearer_auth(t);
        }
        if let Some(b) = body {
            req = req.json(&b);
        }
        req.send().await.unwrap()
    }

    pub async fn json(&self, method: Method, path: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
        let resp = self.call(method, path, token, body).await;
        let status = resp.status();
        let text = resp.text().await.unwrap();
        let value = if text.is_empty() { Value::Null } else { serde_json::from_str(&text).unwrap_or(Value::String(text)) };
        (status, value)
    }

    pub async fn register(&self, name: &str) -> StatusCode {
        self.json(
            Method::POST,
            "/api/register",
            None,
            Some(json!({"username": name, "email": format!("{name}@example.com"), "password": "password123"})),
        )
        .await
        .0
    }

    pub async fn login(&self, name: &str, password: &str) -> String {
        let (status, body) = self
            .json(Method::POST, "/api/login", None, Some(json!({"username": name, "password": password})))
            .await;
        assert_eq!(status, StatusCode::OK, "{body}");
        body["token"].as_str().unwrap().to_string()
    }

    pub async fn user_token(&self, name: &str) -> String {
        assert_eq!(self.register(name).await, StatusCode::CREATED);
        self.login(name, "password123").await
    }

    pub async fn admin_token(&self) -> String {
        self.login(ADMIN, ADMIN_PASSWORD).await
    }

    /// Movie, `rows`x`cols` venue and one show three days out. Returns ids.
    pub async fn catalog(&self, admin: &str, rows: u32, cols: u32) -> (u64, u64, u64) {
        let (s, movie) = self
            .json(
                Method::POST,
                "/api/admin/movies",
                Some(admin),
                Some(json!({
                    "title": "The Long Night",
                    "description": "A slow thriller",
                    "genres": ["thriller"],
                    "director": "Ana Diaz",
                    "cast": ["Kim Lee"],
                    "language": "English",
                    "release_date": "2026-05-01"
                })),
            )
            .await;
        assert_eq!(s, StatusCode::CREATED, "{movie}");
        let (s, venue) = self
            .json(
                Method::POST,
                "/api/admin/venues",
                Some(admin),
                Some(json!({"name": "Grand Hall", "address": "1 Main St", "rows": rows, "cols": cols})),
            )
            .await;
        assert_eq!(s, StatusCode::CREATED, "{venue}");
        let movie_id = movie["movie_id"].as_u64().unwrap();
        let venue_id = venue["venue_id"].as_u64().unwrap();
        let (s, show) = self
            .json(
                Method::POST,
                "/api/admin/shows",
                Some(admin),
                Some(json!({
                    "movie_id": movie_id,
                    "venue_id": venue_id,
                    "starts_at": START.plus_days(3).0,
                    "price_per_seat_minor": 25_000
                })),
            )
            .await;
        assert_eq!(s, StatusCode::CREATED, "{show}");
        (movie_id, venue_id, show["show_id"].as_u64().unwrap())
    }
}

/// Every error body is exactly `{"error": string, "message": string}`.
pub fn assert_error_shape(body: &Value, code: &str) {
    let obj = body.as_object().unwrap_or_else(|| panic!("not an object: {body}"));
    assert_eq!(obj.len(), 2, "{body}");
    assert_eq!(obj["error"], code, "{body}");
    assert!(obj["message"].is_string(), "{body}");
}

pub fn concrete(path: &str) -> String {
    path.replace("{id}", "1")
}

pub fn method(m: &str) -> Method {
    Method::from_bytes(m.as_bytes()).unwrap()
}
