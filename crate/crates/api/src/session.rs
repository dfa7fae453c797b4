use std::collections::HashMap;
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{Duration, Instant, SystemTime};

use tokio::sync::{Mutex, MutexGuard};
use unicorn_core::game::{DeviceMode, Game};

use crate::error::ApiError;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

/// What happens to a request that arrives while another request for the
/// same session is still being processed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BusyPolicy {
    /// Wait for the in-flight request to finish.
    #[default]
    Queue,
    /// Answer 409 immediately.
    Reject,
}

#[derive(Debug, Clone)]
pub struct ApiConfig {
    /// Mode for games whose create request names none.
    pub default_mode: DeviceMode,
    pub idle_timeout: Duration,
    pub busy_policy: BusyPolicy,
    /// Allowed CORS origin; any origin when unset.
    pub cors_origin: Option<String>,
    /// Root seed for games created without one. Game `n` gets
    /// `derive_seed(seed, n)`; entropy when unset.
    pub seed: Option<u64>,
}

impl Default for ApiConfig {
    fn default() -> Self {
        Self {
            default_mode: DeviceMode::Simulator,
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
            busy_policy: BusyPolicy::Queue,
            cors_origin: None,
            seed: None,
        }
    }
}

pub struct Session {
    pub id: String,
    pub created_at: SystemTime,
    last_active: StdMutex<Instant>,
    game: Mutex<Game>,
}

impl Session {
    fn new(id: String, game: Game) -> Self {
        Self {
            id,
            created_at: SystemTime::now(),
            last_active: StdMutex::new(Instant::now()),
            game: Mutex::new(game),
        }
    }

    pub fn touch(&self) {
        *self.last_active.lock().expect("last_active lock") = Instant::now();
    }

    pub fn last_active(&self) -> Instant {
        *self.last_active.lock().expect("last_active lock")
    }

    /// One in-flight request per session.
    pub async fn lock(&self, policy: BusyPolicy) -> Result<MutexGuard<'_, Game>, ApiError> {
        match policy {
            BusyPolicy::Queue => Ok(self.game.lock().await),
            BusyPolicy::Reject => self
                .game
                .try_lock()
                .map_err(|_| ApiError::conflict("busy", "another request for this session is in progress")),
        }
    }
}

/// In-memory session table with idle eviction.
pub struct SessionStore {
    sessions: StdMutex<HashMap<String, Arc<Session>>>,
    idle_timeout: Duration,
}

impl SessionStore {
    pub fn new(idle_timeout: Duration) -> Self {
        Self {
            sessions: StdMutex::new(HashMap::new()),
            idle_timeout,
        }
    }

    pub fn insert(&self, game: Game) -> Arc<Session> {
        let mut map = self.sessions.lock().expect("session table lock");
        let id = loop {
            let id = uuid::Uuid::new_v4().simple().to_string();
            if !map.contains_key(&id) {
                break id;
            }
        };
        let session = Arc::new(Session::new(id.clone(), game));
        map.insert(id, session.clone());
        session
    }

    /// Looks a session up and marks it active.
    pub fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        let map = self.sessions.lock().expect("session table lock");
        let session = map.get(id).cloned().ok_or_else(|| ApiError::NotFound(id.to_string()))?;
        session.touch();
        Ok(session)
    }

    /// Drops sessions idle for longer than the timeout as of `now`.
    /// Returns the number removed.
    pub fn evict_idle(&self, now: Instant) -> usize {
        let mut map = self.sessions.lock().expect("session table lock");
        let before = map.len();
        map.retain(|_, s| now.saturating_duration_since(s.last_active()) <= self.idle_timeout);
        before - map.len()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().expect("session table lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idle_timeout(&self) -> Duration {
        self.idle_timeout
    }
}
