use std::path::PathBuf;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::Parser;
use stageseat_bench::config::parse_steps;
use stageseat_bench::report::to_csv;
use stageseat_bench::sweep::comparison_table;
use stageseat_bench::{run_load, stress_sweep, Mix, ScenarioConfig};

#[derive(Parser)]
#[command(name = "stageseat-bench", version, about = "Load test a stageseat server")]
struct Args {
    #[arg(long, default_value = "http://127.0.0.1:8080")]
    base_url: String,
    #[arg(long, default_value_t = 10)]
    users: usize,
    #[arg(long, default_value_t = 30)]
    duration_s: u64,
    #[arg(long, default_value_t = 0)]
    ramp_s: u64,
    #[arg(long, default_value = "browse=0.5,search=0.2,book=0.2,review=0.1")]
    mix: Mix,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// JSON report path. Printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Ascending user counts for a stress sweep, e.g. 10,50,100.
    #[arg(long)]
    steps: Option<String>,
    #[arg(long, default_value_t = 0)]
    think_ms: u64,
    /// Sample CPU and RSS of this local process.
    #[arg(long)]
    monitor_pid: Option<u32>,
}

fn write(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[tokio::main]
async fn main() -> Result<()> {
    let args = Args::parse();
    let cfg = ScenarioConfig {
        base_url: args.base_url,
        users: args.users,
        duration: Duration::from_secs(args.duration_s),
        ramp: Duration::from_secs(args.ramp_s),
        mix: args.mix,
        seed: args.seed,
        think: Duration::from_millis(args.think_ms),
        request_timeout: Duration::from_secs(10),
        monitor_pid: args.monitor_pid,
    };
    match args.steps {
        Some(steps) => {
            let steps = parse_steps(&steps)?;
            let results = stress_sweep(&cfg, &steps).await?;
            eprint!("{}", comparison_table(&results));
            write(args.out.as_ref(), &serde_json::to_string_pretty(&results)?)?;
            if let Some(p) = &args.csv {
                let reports: Vec<_> = results.iter().filter_map(|s| s.report.as_ref()).collect();
                std::fs::write(p, to_csv(&reports, true)?)?;
            }
        }
        None => {
            let report = run_load(&cfg).await?;
            let o = &report.overall;
            eprintln!(
                "{} requests in {:.1}s: {:.1} rps, {:.2}% errors, {} contended",
                o.request_count, report.wall_time_s, o.throughput_rps, o.error_rate_pct, o.contended_count
            );
            write(args.out.as_ref(), &serde_json::to_string_pretty(&report)?)?;
            if let Some(p) = &args.csv {
                std::fs::write(p, to_csv(&[&report], false)?)?;
            }
        }
    }
    Ok(())
}
