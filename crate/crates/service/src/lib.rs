//! HTTP service backing the trace explorer. Sessions live in memory; each
//! one serialises its requests so they take effect in arrival order.

mod error;
mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use axum::extract::{Path, Query, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use echocheck::checker::ReportJson;
use echocheck::netconfig::ENUMERATION_LIMIT;
use echocheck::{enumerate_canonical, sweep, CheckError, CheckOptions, Config, Event, Property, Trace, Variant};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

pub use error::ServiceError;
pub use session::{seeded_run, Fork, InitReply, Notice, Session, Snapshot, StepView, MAX_RESEEDS};

/// Sessions untouched for this long are dropped.
pub const IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

type SessionHandle = Arc<tokio::sync::Mutex<Session>>;

pub struct AppState {
    sessions: Mutex<HashMap<String, SessionHandle>>,
    configs: Vec<OnceLock<Arc<Vec<Config>>>>,
    idle_timeout: Duration,
}

impl Default for AppState {
    fn default() -> Self {
        AppState::with_idle_timeout(IDLE_TIMEOUT)
    }
}

impl AppState {
    pub fn with_idle_timeout(idle_timeout: Duration) -> Self {
        AppState {
            sessions: Mutex::new(HashMap::new()),
            configs: (0..=ENUMERATION_LIMIT).map(|_| OnceLock::new()).collect(),
            idle_timeout,
        }
    }

    fn configs(&self, max_nodes: usize) -> Result<Arc<Vec<Config>>, ServiceError> {
        if max_nodes == 0 || max_nodes > ENUMERATION_LIMIT {
            return Err(ServiceError::bad_request(format!(
                "max_nodes must be in 1..={ENUMERATION_LIMIT}, got {max_nodes}"
            )));
        }
        let slot = &self.configs[max_nodes];
        if let Some(c) = slot.get() {
            return Ok(c.clone());
        }
        let list = enumerate_canonical(max_nodes).map_err(|e| ServiceError::bad_request(e.to_string()))?;
        Ok(slot.get_or_init(|| Arc::new(list)).clone())
    }

    fn session(&self, id: &str) -> Result<SessionHandle, ServiceError> {
        self.sessions
            .lock()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::unknown_session(id))
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session table poisoned").len()
    }

    /// Drops sessions idle for longer than the timeout as of `now`. Sessions
    /// busy with a request are kept.
    pub fn expire_idle(&self, now: Instant) -> usize {
        let mut table = self.sessions.lock().expect("session table poisoned");
        let before = table.len();
        table.retain(|_, handle| match handle.try_lock() {
            Ok(s) => now.saturating_duration_since(s.last_access) <= self.idle_timeout,
            Err(_) => true,
        });
        before - table.len()
    }
}

/// Locks the session, refreshes its idle clock and runs `f` on it.
async fn with_session<T>(
    state: &AppState,
    id: &str,
    f: impl FnOnce(&mut Session) -> Result<T, ServiceError>,
) -> Result<T, ServiceError> {
    let handle = state.session(id)?;
    let mut session = handle.lock().await;
    session.last_access = Instant::now();
    f(&mut session)
}

#[derive(Deserialize)]
struct CreateRequest {
    max_nodes: usize,
    variant: Variant,
}

#[derive(Serialize)]
struct CreateReply {
    session_id: String,
    trace: Trace,
}

#[derive(Serialize)]
struct TraceReply {
    trace: Trace,
}

#[derive(Deserialize)]
struct ForkRequest {
    state_index: usize,
    #[serde(default)]
    event: Option<Event>,
}

#[derive(Deserialize)]
struct ConfigsQuery {
    max_nodes: usize,
}

#[derive(Deserialize)]
struct CheckQuery {
    property: Property,
    variant: Variant,
    max_nodes: usize,
    #[serde(default)]
    symmetry: bool,
    #[serde(default)]
    state_budget: Option<usize>,
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    Json(req): Json<CreateRequest>,
) -> Result<Json<CreateReply>, ServiceError> {
    let configs = state.configs(req.max_nodes)?;
    let id = uuid::Uuid::new_v4().to_string();
    let session = Session::create(id.clone(), req.max_nodes, req.variant, configs)?;
    let trace = session.trace().clone();
    state
        .sessions
        .lock()
        .expect("session table poisoned")
        .insert(id.clone(), Arc::new(tokio::sync::Mutex::new(session)));
    tracing::debug!(session = %id, "created session");
    Ok(Json(CreateReply { session_id: id, trace }))
}

async fn get_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<Snapshot>, ServiceError> {
    with_session(&state, &id, |s| Ok(Json(s.snapshot()))).await
}

async fn new_config(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<TraceReply>, ServiceError> {
    with_session(&state, &id, |s| {
        let trace = s.new_config()?.clone();
        Ok(Json(TraceReply { trace }))
    })
    .await
}

async fn new_trace(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<TraceReply>, ServiceError> {
    with_session(&state, &id, |s| {
        let trace = s.new_trace()?.clone();
        Ok(Json(TraceReply { trace }))
    })
    .await
}

async fn new_init(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<InitReply>, ServiceError> {
    with_session(&state, &id, |s| Ok(Json(s.new_init()))).await
}

async fn new_fork(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<ForkRequest>,
) -> Result<Json<Fork>, ServiceError> {
    with_session(&state, &id, |s| s.new_fork(req.state_index, req.event).map(Json)).await
}

async fn get_step(
    State(state): State<Arc<AppState>>,
    Path((id, index)): Path<(String, String)>,
) -> Result<Json<StepView>, ServiceError> {
    let index: i64 = index
        .parse()
        .map_err(|_| ServiceError::bad_request(format!("step index `{index}` is not an integer")))?;
    with_session(&state, &id, |s| s.step(index).map(Json)).await
}

async fn list_configs(
    State(state): State<Arc<AppState>>,
    Query(q): Query<ConfigsQuery>,
) -> Result<Json<Vec<Config>>, ServiceError> {
    let configs = state.configs(q.max_nodes)?;
    Ok(Json(configs.as_ref().clone()))
}

async fn run_check(Query(q): Query<CheckQuery>) -> Result<Json<ReportJson>, ServiceError> {
    let opts = CheckOptions {
        state_budget: q.state_budget,
        symmetry: q.symmetry,
        ..Default::default()
    };
    let report = tokio::task::spawn_blocking(move || sweep(q.max_nodes, q.variant, q.property, &opts))
        .await
        .map_err(|e| ServiceError::internal(e.to_string()))?;
    match report {
        Ok(r) => Ok(Json(r.to_json(true))),
        Err(CheckError::Config(e)) => Err(ServiceError::bad_request(e.to_string())),
        Err(e) => Err(ServiceError::internal(e.to_string())),
    }
}

/// The API routes, without static file serving.
pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/:id", get(get_session))
        .route("/sessions/:id/new-config", post(new_config))
        .route("/sessions/:id/new-trace", post(new_trace))
        .route("/sessions/:id/new-init", post(new_init))
        .route("/sessions/:id/fork", post(new_fork))
        .route("/sessions/:id/steps/:index", get(get_step))
        .route("/configs", get(list_configs))
        .route("/check", get(run_check))
        .with_state(state)
}

/// API routes plus, when given, a directory of static files served for
/// every other path.
pub fn app(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = router(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the process is stopped, sweeping idle sessions once a
/// minute.
pub async fn serve(addr: SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let state = Arc::new(AppState::default());
    let reaper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            let dropped = reaper.expire_idle(Instant::now());
            if dropped > 0 {
                tracing::info!(dropped, "expired idle sessions");
            }
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app(state, static_dir)).await
}
