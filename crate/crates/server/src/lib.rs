//! HTTP/JSON service for the stageseat ticketing backend.
//!
//! Authentication is a bearer token in the `Authorization` header. Every
//! error body has the shape `{"error": code, "message": text}`.

pub mod auth;
pub mod clock;
pub mod config;
pub mod error;
pub mod extract;
pub mod routes;
pub mod state;
pub mod views;

use std::future::Future;

use tokio::net::TcpListener;

pub use config::Config;
pub use routes::{router, ADMIN_ROUTES, USER_ROUTES};
pub use state::{AppState, StartupError};

/// Serve `state` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}
