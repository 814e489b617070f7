//! HTTP authoring service over the description engine and a local chart
//! store.

mod api;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use axum::Router;
use chartscribe_core::ingestion::{Transport, UreqTransport, API_TOKEN_ENV};
use chartscribe_core::EngineConfig;
use tokio::net::TcpListener;

pub use api::ApiError;
pub use store::{ChartPage, ChartStore, ChartSummary, ScanReport, StoreError};

pub const STORE_DIR_ENV: &str = "CHARTSCRIBE_STORE_DIR";
pub const REMOTE_BASE_ENV: &str = "CHARTSCRIBE_REMOTE_BASE";
pub const DEFAULT_STORE_DIR: &str = "charts";
pub const DEFAULT_REMOTE_BASE: &str = "https://api.datawrapper.de/v3";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub store_dir: PathBuf,
    pub api_token: Option<String>,
    pub remote_base: String,
    pub engine: EngineConfig,
}

impl ServiceConfig {
    /// Reads `CHARTSCRIBE_STORE_DIR`, `CHARTSCRIBE_API_TOKEN` and
    /// `CHARTSCRIBE_REMOTE_BASE`, with defaults for the unset ones.
    pub fn from_env() -> Self {
        let var = |name: &str| std::env::var(name).ok().filter(|v| !v.is_empty());
        ServiceConfig {
            store_dir: var(STORE_DIR_ENV).unwrap_or_else(|| DEFAULT_STORE_DIR.into()).into(),
            api_token: var(API_TOKEN_ENV),
            remote_base: var(REMOTE_BASE_ENV).unwrap_or_else(|| DEFAULT_REMOTE_BASE.into()),
            engine: EngineConfig::default(),
        }
    }
}

struct Shared {
    store: RwLock<ChartStore>,
    config: ServiceConfig,
    transport: Arc<dyn Transport>,
}

/// Handle shared by all request handlers.
#[derive(Clone)]
pub struct AppState {
    shared: Arc<Shared>,
}

impl AppState {
    pub fn new(store: ChartStore, config: ServiceConfig, transport: Arc<dyn Transport>) -> Self {
        AppState {
            shared: Arc::new(Shared {
                store: RwLock::new(store),
                config,
                transport,
            }),
        }
    }

    /// Scans `config.store_dir` and uses the network transport for imports.
    pub fn open(config: ServiceConfig) -> Result<(Self, ScanReport), StoreError> {
        std::fs::create_dir_all(&config.store_dir)
            .map_err(|e| StoreError::Unreadable(format!("{}: {e}", config.store_dir.display())))?;
        let (store, report) = ChartStore::open(&config.store_dir)?;
        Ok((Self::new(store, config, Arc::new(UreqTransport)), report))
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.shared.config
    }

    pub fn transport(&self) -> &dyn Transport {
        self.shared.transport.as_ref()
    }

    pub fn store(&self) -> RwLockReadGuard<'_, ChartStore> {
        self.shared.store.read().unwrap_or_else(|e| e.into_inner())
    }

    pub fn store_mut(&self) -> RwLockWriteGuard<'_, ChartStore> {
        self.shared.store.write().unwrap_or_else(|e| e.into_inner())
    }
}

pub fn router(state: AppState) -> Router {
    api::routes(state)
}

/// Serves until Ctrl-C.
pub async fn serve(listener: TcpListener, state: AppState) -> std::io::Result<()> {
    let addr: Option<SocketAddr> = listener.local_addr().ok();
    tracing::info!(?addr, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
