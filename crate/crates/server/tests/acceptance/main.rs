//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! A criterion listed in `KNOWN_DIVERGENCES` still prints FAIL, but only
//! fails the run if its failure set changes (including when it starts to
//! pass).

#[path = "../common/mod.rs"]
mod common;
mod core_checks;
mod http_checks;
mod oracles;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

/// Outcome of one criterion: every failed check by key.
#[derive(Default)]
pub struct Verdict {
    pub failures: Vec<(&'static str, String)>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn check(&mut self, key: &'static str, ok: bool, detail: impl Into<String>) {
        if !ok {
            self.failures.push((key, detail.into()));
        }
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }
}

/// `(criterion, failing check keys)` that are expected and documented in
/// the README.
const KNOWN_DIVERGENCES: &[(u8, &[&str])] = &[(2, &["golden-not-good"])];

type Criterion = (u8, &'static str, fn(&tokio::runtime::Runtime) -> Verdict);

const CRITERIA: &[Criterion] = &[
    (1, "no overbooking under contention", http_checks::overbooking),
    (2, "sentiment golden values and oracle", core_checks::sentiment),
    (3, "coin ledger conservation", core_checks::ledger_conservation),
    (4, "cancel inverts book", core_checks::cancel_inversion),
    (5, "search matches brute-force oracle", core_checks::search_oracle),
    (6, "recommendation scale invariance and example", core_checks::recommendation),
    (7, "percentile matches rank scan", core_checks::percentile_oracle),
    (8, "load run against local instance", http_checks::bench_run),
    (9, "persistence round trip and integrity", core_checks::persistence),
    (10, "admin route auth matrix", http_checks::auth_matrix),
];

fn main() {
    // `cargo test` may pass libtest flags; plain numbers select criteria.
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
    let mut unexpected = 0;
    let mut passed = 0;
    let mut selected = 0;
    for (n, name, run) in CRITERIA {
        if !only.is_empty() && !only.contains(n) {
            continue;
        }
        selected += 1;
        let started = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(|| run(&rt))).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Verdict {
                failures: vec![("panic", msg)],
                notes: vec![],
            }
        });
        let secs = started.elapsed().as_secs_f64();
        let known: &[&str] = KNOWN_DIVERGENCES
            .iter()
            .find(|(k, _)| k == n)
            .map_or(&[], |(_, keys)| keys);
        let mut failed_keys: Vec<&str> = verdict.failures.iter().map(|(k, _)| *k).collect();
        failed_keys.sort_unstable();
        let mut known_sorted = known.to_vec();
        known_sorted.sort_unstable();

        let status = if verdict.failures.is_empty() { "PASS" } else { "FAIL" };
        let tag = if !known.is_empty() && failed_keys == known_sorted {
            " (known divergence)"
        } else {
            ""
        };
        println!("criterion {n:>2} [{name}]: {status}{tag} ({secs:.1}s)");
        for note in &verdict.notes {
            println!("    note: {note}");
        }
        for (key, msg) in &verdict.failures {
            println!("    failed {key}: {msg}");
        }
        if verdict.failures.is_empty() {
            passed += 1;
        }
        if failed_keys != known_sorted {
            unexpected += 1;
            if verdict.failures.is_empty() {
                println!("    expected failures {known:?} no longer fail; update KNOWN_DIVERGENCES");
            }
        }
    }
    println!("acceptance: {passed}/{selected} criteria pass, {unexpected} unexpected result(s)");
    if unexpected > 0 {
        std::process::exit(1);
    }
}
