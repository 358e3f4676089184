use std::io::{BufRead, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use stageseat_core::seed::{seed_store, SeedConfig};
use stageseat_core::sentiment::Lexicon;
use stageseat_core::sentiment::score_text;
use stageseat_core::store::Store;
use stageseat_core::Timestamp;
use stageseat_server::state::load_lexicon;
use stageseat_server::{AppState, Config};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "stageseat", version, about = "Movie ticketing service")]
struct Cli {
    /// TOML config file. STAGESEAT_* environment variables override it.
    #[arg(long, global = true, env = "STAGESEAT_CONFIG")]
    config: Option<PathBuf>,
    /// Journal path, overriding the config.
    #[arg(long, global = true)]
    db: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        listen: Option<String>,
    },
    /// Fill an empty store with a deterministic demo dataset.
    Seed {
        #[arg(long, default_value_t = 20)]
        movies: usize,
        #[arg(long, default_value_t = 3)]
        venues: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Anchor instant in epoch ms. Defaults to now.
        #[arg(long)]
        now_ms: Option<i64>,
    },
    /// Export or import JSON-lines fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
    /// Sentiment utilities.
    Sentiment {
        #[command(subcommand)]
        action: SentimentAction,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    Export { path: PathBuf },
    Import { path: PathBuf },
}

#[derive(Subcommand)]
enum SentimentAction {
    /// Print `compound<TAB>label` for the text, or for each stdin line.
    Score {
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, conflicts_with = "stdin")]
        text: Option<String>,
        #[arg(long)]
        stdin: bool,
    },
}

fn open_store(cfg: &Config) -> Result<Store> {
    let Some(path) = &cfg.database_path else {
        bail!("no database path: pass --db or set database_path / STAGESEAT_DB");
    };
    Store::open(path, true).with_context(|| format!("opening {}", path.display()))
}

fn lexicon(path: Option<&PathBuf>, cfg: &Config) -> Result<Lexicon> {
    match path.or(cfg.lexicon_path.as_ref()) {
        Some(p) => Ok(load_lexicon(p)?),
        None => Ok(Lexicon::seed()),
    }
}

#[tokio::main]
async fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(db) = cli.db {
        cfg.database_path = Some(db);
    }

    match cli.command {
        Command::Serve { listen } => {
            if let Some(l) = listen {
                cfg.listen = l;
            }
            let state = AppState::from_config(&cfg)?;
            let listener = tokio::net::TcpListener::bind(&cfg.listen)
                .await
                .with_context(|| format!("binding {}", cfg.listen))?;
            tracing::info!(addr = %listener.local_addr()?, "listening");
            stageseat_server::serve(listener, state, async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        }
        Command::Seed { movies, venues, seed, now_ms } => {
            let store = open_store(&cfg)?;
            let now = now_ms.map_or_else(Timestamp::now, Timestamp);
            let seed_cfg = SeedConfig::new(movies, venues, seed, now);
            seed_store(&store, &cfg.policy, &lexicon(None, &cfg)?, &seed_cfg)?;
            let n = store.read(|t| t.records().count());
            println!("seeded {n} records");
        }
        Command::Fixtures { action } => {
            let store = open_store(&cfg)?;
            match action {
                FixtureAction::Export { path } => {
                    let n = store.export_fixtures(&path)?;
                    println!("exported {n} records to {}", path.display());
                }
                FixtureAction::Import { path } => {
                    let counts = store.import_fixtures(&path)?;
                    println!("imported {} records from {}", counts.total(), path.display());
                }
            }
        }
        Command::Sentiment {
            action: SentimentAction::Score { lexicon: lex_path, text, stdin },
        } => {
            let lex = lexicon(lex_path.as_ref(), &cfg)?;
            let mut out = std::io::stdout().lock();
            let mut emit = |line: &str| -> Result<()> {
                let s = score_text(&lex, line);
                writeln!(out, "{:.4}\t{}", s.compound, s.label.as_str())?;
                Ok(())
            };
            match (text, stdin) {
                (Some(t), _) => emit(&t)?,
                (None, true) => {
                    for line in std::io::stdin().lock().lines() {
                        emit(&line?)?;
                    }
                }
                (None, false) => bail!("pass --text or --stdin"),
            }
        }
    }
    Ok(())
}
