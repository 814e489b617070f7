use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use chartscribe_core::facts::TrendConfig;
use chartscribe_core::ingestion::{fetch_chart, RemoteConfig, UreqTransport, API_TOKEN_ENV};
use chartscribe_core::par::ExecMode;
use chartscribe_core::{describe_batch, DescribeOutput, EngineConfig};
use chartscribe_service::{
    serve, AppState, ChartStore, ServiceConfig, DEFAULT_REMOTE_BASE, DEFAULT_STORE_DIR, REMOTE_BASE_ENV,
    STORE_DIR_ENV,
};
use clap::{Parser, Subcommand, ValueEnum};
use tracing_subscriber::EnvFilter;

#[derive(Debug, Parser)]
#[command(name = "chartscribe", version, about = "Textual descriptions for charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Describe bundle directories with every feature selected.
    Describe {
        paths: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write one file per chart here instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Interval count above which only the steepest trend phases are described.
        #[arg(long = "threshold-M", alias = "threshold-m", default_value_t = TrendConfig::default().threshold)]
        threshold_m: usize,
        /// Number of steepest trend phases kept.
        #[arg(long, default_value_t = TrendConfig::default().top_k)]
        top_k: usize,
        /// Process bundles one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long, env = STORE_DIR_ENV, default_value = DEFAULT_STORE_DIR)]
        store_dir: PathBuf,
    },
    /// Fetch a chart from the remote API into the local store.
    Import {
        remote_id: String,
        #[arg(long, env = STORE_DIR_ENV, default_value = DEFAULT_STORE_DIR)]
        store_dir: PathBuf,
        #[arg(long, env = REMOTE_BASE_ENV, default_value = DEFAULT_REMOTE_BASE)]
        remote_base: String,
    },
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Describe {
            paths,
            format,
            out_dir,
            threshold_m,
            top_k,
            sequential,
        } => {
            let config = EngineConfig {
                trend: TrendConfig {
                    threshold: threshold_m,
                    top_k,
                },
                mode: if sequential {
                    ExecMode::Sequential
                } else {
                    ExecMode::default()
                },
                ..Default::default()
            };
            describe(&paths, format, out_dir.as_deref(), &config)
        }
        Command::Serve { addr, store_dir } => run_serve(addr, store_dir).map(|_| true),
        Command::Import {
            remote_id,
            store_dir,
            remote_base,
        } => import(&remote_id, store_dir, remote_base).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn render(output: &DescribeOutput, format: Format, pretty: bool) -> anyhow::Result<String> {
    Ok(match format {
        Format::Text => output.description.rendered.clone(),
        Format::Json if pretty => serde_json::to_string_pretty(output)?,
        Format::Json => serde_json::to_string(output)?,
    })
}

/// Returns whether every bundle succeeded.
fn describe(paths: &[PathBuf], format: Format, out_dir: Option<&Path>, config: &EngineConfig) -> anyhow::Result<bool> {
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let results = describe_batch(paths, config);
    let mut stdout = std::io::stdout().lock();
    let mut ok = true;
    for (path, result) in paths.iter().zip(results) {
        match result {
            Ok(output) => match out_dir {
                Some(dir) => {
                    let ext = if format == Format::Json { "json" } else { "txt" };
                    let file = dir.join(format!("{}.{ext}", output.description.chart_id));
                    fs::write(&file, render(&output, format, true)? + "\n")
                        .with_context(|| format!("writing {}", file.display()))?;
                }
                None => writeln!(stdout, "{}", render(&output, format, false)?)?,
            },
            Err(e) => {
                ok = false;
                eprintln!("error: {}: {e} [{e:?}]", path.display());
            }
        }
    }
    Ok(ok)
}

fn run_serve(addr: SocketAddr, store_dir: PathBuf) -> anyhow::Result<()> {
    let config = ServiceConfig {
        store_dir,
        ..ServiceConfig::from_env()
    };
    let (state, report) = AppState::open(config).context("opening chart store")?;
    for s in &report.skipped {
        eprintln!("warning: skipped {}: {}", s.path, s.error);
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        eprintln!("serving {} charts on http://{}", report.charts, listener.local_addr()?);
        serve(listener, state).await?;
        Ok(())
    })
}

fn import(remote_id: &str, store_dir: PathBuf, remote_base: String) -> anyhow::Result<()> {
    let remote = RemoteConfig::with_env_token(remote_base, None);
    if remote.token.is_none() {
        anyhow::bail!("{API_TOKEN_ENV} is not set");
    }
    let bundle = fetch_chart(remote_id, &remote, &UreqTransport)
        .with_context(|| format!("fetching chart {remote_id}"))?;
    fs::create_dir_all(&store_dir).with_context(|| format!("creating {}", store_dir.display()))?;
    let stored = ChartStore::new(&store_dir).insert(bundle)?;
    println!("{}", stored.id());
    Ok(())
}
