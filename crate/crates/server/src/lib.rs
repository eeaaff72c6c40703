//! REST API over a database produced by `rdfforge generate`: one
//! endpoint pair per entity table, JSON bodies, RQL filtering on lists.

mod http;
mod store;

pub use http::{router, AppState};
pub use store::{Store, StoreError};

use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use rdfforge_core::rdf::DEFAULT_BASE;
use rdfforge_core::Exec;

#[derive(Debug, Clone)]
pub struct ServerOptions {
    pub limit_default: usize,
    /// Namespace for IRIs minted on POST.
    pub base: String,
    pub exec: Exec,
}

impl Default for ServerOptions {
    fn default() -> Self {
        ServerOptions { limit_default: 1000, base: DEFAULT_BASE.to_string(), exec: Exec::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn app(db: &Path, options: &ServerOptions) -> Result<axum::Router, StoreError> {
    let store = Store::open(db, &options.base)?;
    Ok(router(Arc::new(AppState { store, limit_default: options.limit_default, exec: options.exec })))
}

/// Serves until the process is stopped. `on_ready` receives the bound
/// address (useful with port 0).
pub async fn serve(db: &Path, host: &str, port: u16, options: &ServerOptions, on_ready: impl FnOnce(SocketAddr)) -> Result<(), ServerError> {
    let app = app(db, options)?;
    let addr = format!("{host}:{port}");
    let listener = tokio::net::TcpListener::bind(&addr).await.map_err(|source| ServerError::Bind { addr, source })?;
    on_ready(listener.local_addr()?);
    axum::serve(listener, app).await?;
    Ok(())
}
