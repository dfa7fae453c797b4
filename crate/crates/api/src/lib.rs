//! HTTP/JSON service for Flying Unicorn: game sessions, turns, jewel
//! guesses and stateless RNG / Grover demos.

mod error;
mod routes;
mod session;

use std::future::Future;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::http::HeaderValue;
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{Any, CorsLayer};

pub use error::ApiError;
pub use routes::{ActionRequest, CreateGame, CreatedGame, GuessRequest};
pub use session::{ApiConfig, BusyPolicy, Session, SessionStore, DEFAULT_IDLE_TIMEOUT};

pub struct AppState {
    pub config: ApiConfig,
    pub sessions: SessionStore,
    created: AtomicU64,
}

impl AppState {
    pub fn new(config: ApiConfig) -> Arc<Self> {
        Arc::new(Self {
            sessions: SessionStore::new(config.idle_timeout),
            config,
            created: AtomicU64::new(0),
        })
    }

    /// Seed for a game whose request did not carry one.
    pub fn next_seed(&self) -> u64 {
        let n = self.created.fetch_add(1, Ordering::Relaxed);
        match self.config.seed {
            Some(root) => unicorn_core::seed::derive_seed(root, n),
            None => unicorn_core::seed::entropy_seed(),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = match state.config.cors_origin.as_deref().map(HeaderValue::from_str) {
        Some(Ok(origin)) => CorsLayer::new().allow_origin(origin),
        _ => CorsLayer::new().allow_origin(Any),
    }
    .allow_methods(Any)
    .allow_headers(Any);

    Router::new()
        .route("/health", get(routes::health))
        .route("/games", post(routes::create_game))
        .route("/games/{id}", get(routes::get_game))
        .route("/games/{id}/action", post(routes::post_action))
        .route("/games/{id}/guess", post(routes::post_guess))
        .route("/rng", get(routes::get_rng))
        .route("/grover", get(routes::get_grover))
        .layer(cors)
        .with_state(state)
}

/// Serves on `listener` until `shutdown` resolves, evicting idle sessions
/// in the background.
pub async fn serve<F>(listener: TcpListener, state: Arc<AppState>, shutdown: F) -> std::io::Result<()>
where
    F: Future<Output = ()> + Send + 'static,
{
    let period = (state.config.idle_timeout / 2).clamp(Duration::from_secs(1), Duration::from_secs(60));
    let sweeper = {
        let state = state.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            loop {
                tick.tick().await;
                let n = state.sessions.evict_idle(Instant::now());
                if n > 0 {
                    tracing::info!(evicted = n, "idle sessions evicted");
                }
            }
        })
    };
    let result = axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await;
    sweeper.abort();
    result
}
