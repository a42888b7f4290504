//! Rating service: serves a run's scenarios and blinded attempts to human
//! raters and appends their judgments to the run's ratings log.
//!
//! ```text
//! GET  /api/runs                          run ids
//! GET  /api/runs/{run}/scenarios          summaries with progress (?rater_id=)
//! GET  /api/runs/{run}/scenarios/{id}     scenario and blinded attempts (?rater_id=)
//! POST /api/runs/{run}/ratings            {rater_id, attempt_id, q_stu, q_task} -> 201
//! GET  /api/runs/{run}/report             unblinded aggregate report
//! GET  /                                  rater UI bundle, when configured
//! ```

mod bundle;

use std::collections::BTreeMap;
use std::future::Future;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

pub use bundle::{
    AttemptView, Blinding, BundleError, Progress, RatingView, RunBundle, ScenarioDetail, ScenarioSummary, SubmitError, TaskView,
};

pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Run directories to serve; each is addressed by its directory name.
    pub runs: Vec<PathBuf>,
    pub blind: bool,
    pub ui_dir: Option<PathBuf>,
}

/// Id under which a run directory is served.
pub fn run_id(dir: &Path) -> String {
    dir.canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| dir.display().to_string())
}

#[derive(Debug, Clone)]
pub struct AppState {
    runs: Arc<BTreeMap<String, Arc<RunBundle>>>,
}

impl AppState {
    pub fn load(config: &ServerConfig) -> Result<Self, BundleError> {
        let mut runs = BTreeMap::new();
        for dir in &config.runs {
            let id = run_id(dir);
            runs.insert(id.clone(), Arc::new(RunBundle::load(id, dir, config.blind)?));
        }
        Ok(AppState { runs: Arc::new(runs) })
    }

    pub fn run(&self, id: &str) -> Option<&Arc<RunBundle>> {
        self.runs.get(id)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

impl From<llmss::evalharness::EvalError> for ApiError {
    fn from(e: llmss::evalharness::EvalError) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn bundle(state: &AppState, run: &str) -> ApiResult<Arc<RunBundle>> {
    state.run(run).cloned().ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown run {run}")))
}

/// Runs file-backed work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

#[derive(Debug, Deserialize)]
struct RaterQuery {
    rater_id: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatingSubmission {
    pub rater_id: String,
    pub attempt_id: String,
    pub q_stu: u8,
    pub q_task: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredRating {
    pub rater_id: String,
    pub attempt_id: String,
    pub q_stu: u8,
    pub q_task: u8,
    pub q_overall: u8,
    pub submitted_at: DateTime<Utc>,
}

async fn list_runs(State(state): State<AppState>) -> Json<Vec<String>> {
    Json(state.runs.keys().cloned().collect())
}

async fn list_scenarios(
    State(state): State<AppState>,
    UrlPath(run): UrlPath<String>,
    Query(q): Query<RaterQuery>,
) -> ApiResult<Json<Vec<ScenarioSummary>>> {
    let b = bundle(&state, &run)?;
    blocking(move || Ok(Json(b.summaries(q.rater_id.as_deref())?))).await
}

async fn scenario_detail(
    State(state): State<AppState>,
    UrlPath((run, id)): UrlPath<(String, String)>,
    Query(q): Query<RaterQuery>,
) -> ApiResult<Json<ScenarioDetail>> {
    let b = bundle(&state, &run)?;
    blocking(move || {
        b.detail(&id, q.rater_id.as_deref())?
            .map(Json)
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown scenario {id}")))
    })
    .await
}

async fn submit_rating(
    State(state): State<AppState>,
    UrlPath(run): UrlPath<String>,
    body: Result<Json<RatingSubmission>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<StoredRating>)> {
    let b = bundle(&state, &run)?;
    let Json(sub) = body.map_err(|e| ApiError::new(e.status(), e.body_text()))?;
    let rating = blocking(move || {
        b.submit(&sub.rater_id, &sub.attempt_id, sub.q_stu, sub.q_task).map_err(|e| {
            let status = match e {
                SubmitError::AttemptNotFound(_) => StatusCode::NOT_FOUND,
                SubmitError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
                SubmitError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            };
            ApiError::new(status, e.to_string())
        })
    })
    .await?;
    Ok((
        StatusCode::CREATED,
        Json(StoredRating {
            q_stu: rating.q_stu(),
            q_task: rating.q_task(),
            q_overall: rating.q_overall(),
            rater_id: rating.rater_id,
            attempt_id: rating.attempt_id,
            submitted_at: rating.submitted_at,
        }),
    ))
}

async fn report(State(state): State<AppState>, UrlPath(run): UrlPath<String>) -> ApiResult<Json<llmss::evalharness::Report>> {
    let b = bundle(&state, &run)?;
    blocking(move || Ok(Json(b.report()?))).await
}

async fn no_ui() -> &'static str {
    "raterd: no UI bundle configured; the API is under /api\n"
}

pub fn router(state: AppState, ui_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/runs", get(list_runs))
        .route("/api/runs/{run}/scenarios", get(list_scenarios))
        .route("/api/runs/{run}/scenarios/{id}", get(scenario_detail))
        .route("/api/runs/{run}/ratings", post(submit_rating))
        .route("/api/runs/{run}/report", get(report))
        .with_state(state);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(no_ui)),
    }
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    config: &ServerConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    let state = AppState::load(config)?;
    let app = router(state, config.ui_dir.as_deref());
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await.map_err(ServeError::Io)
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Io(std::io::Error),
}
