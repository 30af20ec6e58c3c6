use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use manner_core::world::WorldConfig;
use manner_itl::commands::{self, resolve_config};
use manner_itl::service::router;
use manner_itl::session::{Mode, SessionStore};

#[derive(Parser)]
#[command(
    name = "manner-itl",
    version,
    about = "Learn manner adverbs from coherent teacher corrections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Batch experiment: every strategy on seeds 0..n, CSV output.
    Run {
        /// TOML world file or preset name (fully-expressed, partial).
        #[arg(long, env = "MANNER_ITL_CONFIG")]
        config: Option<String>,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "full,no-assent,no-negative,just-no,random"
        )]
        strategies: Vec<String>,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the acceptance criteria and report pass/fail per criterion.
    Check {
        #[arg(long, env = "MANNER_ITL_CONFIG")]
        config: Option<String>,
        /// World used for the partial-correction criterion.
        #[arg(long, default_value = "partial")]
        partial_config: String,
    },
    /// Serve live teaching sessions over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// New sessions wait for a human's utterances by default.
        #[arg(long)]
        human_teacher: bool,
        /// Directory for one snapshot file per session.
        #[arg(long)]
        persist: Option<PathBuf>,
        #[arg(long, env = "MANNER_ITL_CONFIG")]
        config: Option<String>,
    },
    /// Print one simulated session step by step.
    Demo {
        #[arg(long, default_value_t = 30)]
        steps: usize,
        #[arg(long, default_value = "full")]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "MANNER_ITL_CONFIG")]
        config: Option<String>,
    },
}

fn load(source: Option<&str>) -> anyhow::Result<WorldConfig> {
    let cfg =
        resolve_config(source).with_context(|| format!("loading config {}", source.unwrap_or("fully-expressed")))?;
    cfg.ground_truth()?;
    Ok(cfg)
}

async fn serve(port: u16, human: bool, persist: Option<PathBuf>, config: WorldConfig) -> anyhow::Result<()> {
    let mode = if human { Mode::Human } else { Mode::Simulated };
    let mut store = SessionStore::new(config, mode);
    if let Some(dir) = persist {
        store = store.with_persistence(&dir)?;
        eprintln!(
            "persisting sessions to {} ({} loaded)",
            dir.display(),
            store.ids().len()
        );
    }
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port))
        .await
        .with_context(|| format!("binding port {port}"))?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(store)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Run {
            config,
            strategies,
            seeds,
            out: dir,
        } => {
            let cfg = load(config.as_deref())?;
            let names: Vec<&str> = strategies.iter().map(String::as_str).collect();
            commands::run(&cfg, &names, seeds, &dir, &mut out)?;
        }
        Command::Check { config, partial_config } => {
            let fully = load(config.as_deref())?;
            let partial = load(Some(&partial_config))?;
            let reports = commands::check(&fully, &partial, &mut out)?;
            if reports.iter().any(|r| !r.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Serve {
            port,
            human_teacher,
            persist,
            config,
        } => {
            let cfg = load(config.as_deref())?;
            drop(out);
            tokio::runtime::Runtime::new()?.block_on(serve(port, human_teacher, persist, cfg))?;
        }
        Command::Demo {
            steps,
            strategy,
            seed,
            config,
        } => {
            let cfg = load(config.as_deref())?;
            commands::demo(&cfg, &strategy, steps, seed, &mut out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
