//! HTTP front end for the social service broker.
//!
//! The registry, the collaboration graph and the broker share one process.
//! State is persisted as a line-delimited snapshot, rewritten atomically
//! after every mutation unless `snapshot_on_mutation` is off, and always on
//! graceful shutdown.

mod api;
mod config;
mod error;

use std::future::Future;

use thiserror::Error;
use tokio::net::TcpListener;

use socialbroker_core::snapshot::load_or_empty;
use socialbroker_core::SnapshotError;

pub use api::{parse_category, parse_search_query, router, AppState, BrokerQuery, SharedState, SocialField};
pub use config::{ConfigError, ServerConfig};
pub use error::{codes, ApiError};

#[derive(Debug, Error)]
pub enum ServerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot bind {address}: {source}")]
    Bind {
        address: String,
        #[source]
        source: std::io::Error,
    },
    #[error("refusing to start: {0}")]
    SnapshotCorrupt(#[source] SnapshotError),
    #[error("server I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("final snapshot failed: {0}")]
    Flush(#[source] SnapshotError),
}

/// Loads the snapshot named by `config` (a missing file means empty stores).
pub fn load_state(config: &ServerConfig) -> Result<SharedState, ServerError> {
    let stores = load_or_empty(&config.snapshot_path).map_err(ServerError::SnapshotCorrupt)?;
    Ok(AppState::new(stores, config.clone()))
}

/// Validates `config`, loads state and binds the listener.
pub async fn bind(config: &ServerConfig) -> Result<(TcpListener, SharedState), ServerError> {
    let addr = config.validate()?;
    let state = load_state(config)?;
    let listener = TcpListener::bind(addr).await.map_err(|source| ServerError::Bind {
        address: config.listen_address.clone(),
        source,
    })?;
    Ok((listener, state))
}

/// Serves until `shutdown` resolves, then writes a final snapshot.
pub async fn serve_with_shutdown(
    listener: TcpListener,
    state: SharedState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServerError> {
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(shutdown)
        .await?;
    state.flush().map_err(ServerError::Flush)?;
    Ok(())
}

/// Runs until Ctrl-C or SIGTERM.
pub async fn serve(config: ServerConfig) -> Result<(), ServerError> {
    let (listener, state) = bind(&config).await?;
    tracing::info!(address = %listener.local_addr()?, "broker listening");
    serve_with_shutdown(listener, state, shutdown_signal()).await
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
