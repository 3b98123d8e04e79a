use std::fs;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use flowboat::analysis::Engine;
use flowboat::api::router;
use flowboat::catalog_file::{load_catalog, CatalogHandle};
use flowboat::datagen::{generate, GenConfig};
use flowboat::records::RecordKind;
use flowboat::store::Store;
use flowboat::tasks::TaskRegistry;
use tracing::info;

#[derive(Parser)]
#[command(name = "flowboat", version, about = "Touchscreen interaction flow analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Append a log file to the store and publish a new snapshot.
    Ingest {
        #[arg(long)]
        kind: RecordKind,
        #[arg(long)]
        file: PathBuf,
        #[arg(long, env = "FLOWBOAT_DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
        /// Leave the ingested records pending instead of publishing.
        #[arg(long)]
        no_publish: bool,
    },
    /// Publish pending records as a new snapshot.
    Publish {
        #[arg(long, env = "FLOWBOAT_DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
    },
    /// Write a synthetic dataset with its catalog and manifest.
    Datagen {
        /// JSON config; omitted fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "FLOWBOAT_DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Ingest {
            kind,
            file,
            data_dir,
            no_publish,
        } => {
            let store = Store::open(&data_dir)?;
            let report = store.ingest_file(&file, kind)?;
            println!("{}", serde_json::to_string(&report)?);
            if !no_publish {
                let id = store.publish_snapshot()?;
                info!(snapshot_id = id, "published");
            }
        }
        Command::Publish { data_dir } => {
            let id = Store::open(&data_dir)?.publish_snapshot()?;
            println!("{}", serde_json::json!({ "snapshot_id": id }));
        }
        Command::Datagen { config, out } => {
            let config: GenConfig = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => GenConfig::default(),
            };
            let data = generate(&config)?;
            data.write_to(&out)?;
            info!(
                interactions = data.interactions.len(),
                glances = data.glances.len(),
                signals = data.signals.len(),
                planted = data.manifest.planted.len(),
                out = %out.display(),
                "dataset written"
            );
        }
        Command::Serve {
            data_dir,
            catalog,
            port,
            host,
        } => {
            let store = Store::open(&data_dir)?;
            let catalog = load_catalog(&catalog)?;
            let tasks = TaskRegistry::open(&data_dir)?;
            let engine = Arc::new(Engine::new(store, CatalogHandle::new(catalog), tasks));
            let addr = SocketAddr::new(host, port);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr).await?;
                info!(%addr, "listening");
                axum::serve(listener, router(engine))
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await
            })?;
        }
    }
    Ok(())
}
