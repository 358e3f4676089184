use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reqwest::{Method, StatusCode};
use serde_json::{json, Value};
use stageseat_bench::{run_load, ScenarioConfig};
use stageseat_core::seed::{seed_store, SeedConfig};
use stageseat_core::sentiment::Lexicon;
use stageseat_core::{SeatId, ShowId};
use stageseat_server::ADMIN_ROUTES;
use tokio::runtime::Runtime;

use crate::common::*;
use crate::Verdict;

fn is_error_shape(body: &Value, code: &str) -> bool {
    body.as_object()
        .is_some_and(|o| o.len() == 2 && o.get("error") == Some(&json!(code)) && o["message"].is_string())
}

pub fn overbooking(rt: &Runtime) -> Verdict {
    rt.block_on(async {
        let mut v = Verdict::default();
        let srv = spawn().await;
        let admin = srv.admin_token().await;
        let (_, _, show) = srv.catalog(&admin, 5, 10).await;
        let mut tokens = Vec::new();
        for i in 0..20 {
            tokens.push(srv.user_token(&format!("buyer{i}")).await);
        }
        let mut r = ChaCha8Rng::seed_from_u64(1);
        let all: Vec<SeatId> = (0..5).flat_map(|row| (0..10).map(move |col| SeatId::new(row, col))).collect();
        let mut requests: Vec<Vec<SeatId>> = all.iter().map(|s| vec![*s]).collect();
        for _ in 0..150 {
            let n = r.gen_range(1..=2);
            requests.push(all.choose_multiple(&mut r, n).copied().collect());
        }
        requests.shuffle(&mut r);

        let started = Instant::now();
        let mut handles = Vec::new();
        for (i, seats) in requests.into_iter().enumerate() {
            let client = srv.client.clone();
            let url = format!("{}/api/bookings", srv.base);
            let token = tokens[i % tokens.len()].clone();
            let labels: Vec<String> = seats.iter().map(|s| s.label().unwrap()).collect();
            handles.push(tokio::spawn(async move {
                let resp = client
                    .post(url)
                    .bearer_auth(token)
                    .json(&json!({"show_id": show, "seats": labels}))
                    .send()
                    .await
                    .unwrap();
                let status = resp.status();
                (status, resp.json::<Value>().await.unwrap_or(Value::Null))
            }));
        }
        let mut outcomes: HashMap<String, usize> = HashMap::new();
        let mut unexpected = 0;
        for h in handles {
            let (status, body) = h.await.unwrap();
            let key = match status {
                StatusCode::CREATED => "created".to_string(),
                StatusCode::CONFLICT => body["error"].as_str().unwrap_or("?").to_string(),
                other => {
                    unexpected += 1;
                    format!("{other} {body}")
                }
            };
            *outcomes.entry(key).or_default() += 1;
        }
        let elapsed = started.elapsed();
        v.check("statuses", unexpected == 0, format!("{outcomes:?}"));

        let (sold, overlap, active_seats) = srv.state.store.read(|t| {
            let show = &t.shows[&ShowId(show)];
            let mut seen = BTreeSet::new();
            let mut overlap = 0;
            for b in t.bookings.values().filter(|b| b.show_id == show.show_id && b.is_active()) {
                for s in &b.seats {
                    if !seen.insert(*s) {
                        overlap += 1;
                    }
                }
            }
            (show.sold.len(), overlap, seen)
        });
        v.check("sold", sold == 50, format!("{sold} seats sold"));
        v.check("no-double-sale", overlap == 0, format!("{overlap} seats in two active bookings"));
        v.check("sold-matches-bookings", active_seats.len() == sold, "sold set differs from bookings");

        let (status, body) = srv
            .json(Method::POST, "/api/bookings", Some(&tokens[0]), Some(json!({"show_id": show, "seats": ["A1"]})))
            .await;
        v.check("houseful", status == StatusCode::CONFLICT && is_error_shape(&body, "Houseful"), format!("{status} {body}"));
        v.check("runtime", elapsed < Duration::from_secs(30), format!("{elapsed:?}"));
        let mut o: Vec<_> = outcomes.into_iter().collect();
        o.sort();
        v.note(format!("200 concurrent requests in {:.2}s: {o:?}; sold {sold}/50", elapsed.as_secs_f64()));
        v
    })
}

pub fn bench_run(rt: &Runtime) -> Verdict {
    rt.block_on(async {
        let mut v = Verdict::default();
        let mut cfg = test_config();
        cfg.pbkdf2_iterations = 10_000;
        let srv = spawn_with(cfg).await;
        seed_store(&srv.state.store, &srv.state.policy, &Lexicon::seed(), &SeedConfig::new(40, 4, 7, START)).unwrap();

        let scenario = ScenarioConfig::new(srv.base.clone(), 50, Duration::from_secs(30));
        let report = match run_load(&scenario).await {
            Ok(r) => r,
            Err(e) => {
                v.check("run", false, e.to_string());
                return v;
            }
        };
        let o = &report.overall;
        v.check("server-errors", o.server_error_count == 0, format!("{} server errors", o.server_error_count));
        v.check("transport-errors", o.transport_error_count == 0, format!("{} transport errors", o.transport_error_count));
        v.check("requests", o.request_count > 0 && o.latency_ms.is_some(), "no requests recorded");
        for name in ["browse", "search", "book", "review"] {
            let present = report.endpoints.get(name).is_some_and(|k| k.request_count > 0 && k.latency_ms.is_some());
            v.check("kpis", present, format!("no KPIs for {name}"));
        }
        let json = serde_json::to_value(&report).unwrap();
        for field in ["overall", "endpoints", "host", "wall_time_s"] {
            v.check("kpis", json.get(field).is_some(), format!("report lacks {field}"));
        }
        if let Some(b) = report.endpoints.get("browse").and_then(|k| k.latency_ms) {
            v.note(format!("browse p50 {:.2} ms, p95 {:.2} ms, p99 {:.2} ms", b.p50, b.p95, b.p99));
        }
        v.note(format!(
            "50 users x 30s: {} requests, {:.1} req/s, {} contended, {} client errors, error rate {:.2}%",
            o.request_count, o.throughput_rps, o.contended_count, o.client_error_count, o.error_rate_pct
        ));
        v.note(format!(
            "host {} {} with {} cpus, {} build",
            report.host.os,
            report.host.arch,
            report.host.cpus,
            if cfg!(debug_assertions) { "debug" } else { "release" }
        ));
        v
    })
}

pub fn auth_matrix(rt: &Runtime) -> Verdict {
    rt.block_on(async {
        let mut v = Verdict::default();
        let srv = spawn().await;
        let admin = srv.admin_token().await;
        let user = srv.user_token("plainuser").await;
        let mut cells = 0;
        for (m, path) in ADMIN_ROUTES {
            let path = concrete(path);
            let cases: [(&str, Option<&str>, fn(StatusCode) -> bool, &str); 4] = [
                ("no-token", None, |s| s == StatusCode::UNAUTHORIZED, "Unauthorized"),
                ("garbage-token", Some("not-a-real-token"), |s| s == StatusCode::UNAUTHORIZED, "Unauthorized"),
                ("user-token", Some(&user), |s| s == StatusCode::FORBIDDEN, "Forbidden"),
                ("admin-token", Some(&admin), |s| s != StatusCode::UNAUTHORIZED && s != StatusCode::FORBIDDEN, ""),
            ];
            for (key, token, ok, code) in cases {
                cells += 1;
                let (status, body) = srv.json(method(m), &path, token, Some(json!({}))).await;
                v.check(key, ok(status), format!("{m} {path}: {status} {body}"));
                if !code.is_empty() {
                    v.check("error-shape", is_error_shape(&body, code), format!("{m} {path}: {body}"));
                }
            }
        }
        srv.clock.advance_ms(25 * 3_600_000);
        for (m, path) in ADMIN_ROUTES {
            let path = concrete(path);
            for (key, token) in [("expired-admin", &admin), ("expired-user", &user)] {
                cells += 1;
                let (status, body) = srv.json(method(m), &path, Some(token), None).await;
                v.check(
                    key,
                    status == StatusCode::UNAUTHORIZED && is_error_shape(&body, "Unauthorized"),
                    format!("{m} {path}: {status} {body}"),
                );
            }
        }
        v.note(format!("{} admin routes, {cells} cells checked", ADMIN_ROUTES.len()));
        v
    })
}
