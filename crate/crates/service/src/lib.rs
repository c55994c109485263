//! HTTP/JSON API for the curator's decisions: labeling seed accounts, choosing
//! the topic hashtags and accepting LDA topics, with the projected class balance
//! returned after every decision.
//!
//! Mutations are serialized behind one write lock and are durable (event log
//! fsync) before the response is sent; readers never mutate.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use stance_corpus::corpus::StanceLabel;
use tower_http::services::ServeDir;

pub mod state;

pub use state::{CurationState, StateConfig, StateError};

/// Error body: `{code, message, details}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub details: Vec<String>,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>, details: Vec<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
                details,
            },
        }
    }

    fn unprocessable(message: impl Into<String>, details: Vec<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", message, details)
    }
}

impl From<StateError> for ApiError {
    fn from(e: StateError) -> Self {
        match e {
            StateError::UnknownAuthor(a) => Self::new(StatusCode::NOT_FOUND, "unknown_author", format!("unknown author {a}"), vec![a]),
            StateError::Invalid { message, details } => Self::unprocessable(message, details),
            StateError::NoTopicModel => Self::new(StatusCode::CONFLICT, "no_topic_model", e.to_string(), vec![]),
            other => {
                log::error!("{other}");
                Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", other.to_string(), vec![])
            }
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::unprocessable("invalid JSON body", vec![e.body_text()])
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::unprocessable("invalid query string", vec![e.body_text()])
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Shared handle. The state stays uninitialized (409 on every endpoint) until the
/// workspace has ingested tweets; each request retries the load.
#[derive(Clone)]
pub struct AppState {
    cfg: StateConfig,
    inner: Arc<RwLock<Option<CurationState>>>,
}

impl AppState {
    pub fn open(cfg: StateConfig) -> Result<Self, StateError> {
        let state = if cfg.tweets_path().exists() {
            Some(CurationState::open(cfg.clone())?)
        } else {
            log::warn!("{} not found; waiting for ingest", cfg.tweets_path().display());
            None
        };
        Ok(AppState {
            cfg,
            inner: Arc::new(RwLock::new(state)),
        })
    }

    fn ensure_loaded(&self) -> Result<(), ApiError> {
        if self.inner.read().unwrap().is_some() {
            return Ok(());
        }
        let mut guard = self.inner.write().unwrap();
        if guard.is_none() {
            if !self.cfg.tweets_path().exists() {
                return Err(ApiError::new(
                    StatusCode::CONFLICT,
                    "not_initialized",
                    "the workspace has no ingested tweets",
                    vec![self.cfg.tweets_path().display().to_string()],
                ));
            }
            *guard = Some(CurationState::open(self.cfg.clone())?);
        }
        Ok(())
    }

    fn read<T>(&self, f: impl FnOnce(&CurationState) -> Result<T, StateError>) -> Result<T, ApiError> {
        self.ensure_loaded()?;
        let guard = self.inner.read().unwrap();
        Ok(f(guard.as_ref().expect("loaded"))?)
    }

    fn write<T>(&self, f: impl FnOnce(&mut CurationState) -> Result<T, StateError>) -> Result<T, ApiError> {
        self.ensure_loaded()?;
        let mut guard = self.inner.write().unwrap();
        Ok(f(guard.as_mut().expect("loaded"))?)
    }
}

#[derive(Debug, Deserialize)]
pub struct UsersQuery {
    #[serde(default = "default_limit")]
    pub limit: usize,
    #[serde(default)]
    pub offset: usize,
    /// Only accounts without a label.
    #[serde(default)]
    pub pending: bool,
}

fn default_limit() -> usize {
    20
}

#[derive(Debug, Deserialize)]
pub struct LabelRequest {
    pub label: String,
}

#[derive(Debug, Deserialize)]
pub struct HashtagQuery {
    #[serde(default = "default_min_freq")]
    pub min_freq: usize,
}

fn default_min_freq() -> usize {
    1
}

#[derive(Debug, Deserialize)]
pub struct HashtagSelection {
    pub accepted: Vec<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct TopicSelection {
    pub accepted: Vec<usize>,
    #[serde(default)]
    pub min_share: Option<f64>,
}

#[derive(Debug, Deserialize)]
pub struct AssembleRequest {
    pub target_total: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HashtagList {
    pub version: u64,
    pub hashtags: Vec<state::HashtagRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TopicList {
    pub version: u64,
    pub min_share: f64,
    pub topics: Vec<state::TopicCard>,
}

async fn get_state(State(app): State<AppState>) -> ApiResult<state::StateSummary> {
    app.read(|s| Ok(s.summary())).map(Json)
}

async fn get_users(
    State(app): State<AppState>,
    query: Result<Query<UsersQuery>, QueryRejection>,
) -> ApiResult<Vec<state::UserCard>> {
    let Query(q) = query?;
    app.read(|s| Ok(s.user_queue(q.limit, q.offset, q.pending))).map(Json)
}

async fn post_user_label(
    State(app): State<AppState>,
    Path(author_id): Path<String>,
    body: Result<Json<LabelRequest>, JsonRejection>,
) -> ApiResult<state::LabelOutcome> {
    let Json(req) = body?;
    let label: StanceLabel = req
        .label
        .parse()
        .map_err(|_| ApiError::unprocessable("label must be FAVOR, AGAINST or NONE", vec![req.label.clone()]))?;
    app.write(|s| s.label_user(&author_id, label)).map(Json)
}

async fn get_hashtags(
    State(app): State<AppState>,
    query: Result<Query<HashtagQuery>, QueryRejection>,
) -> ApiResult<HashtagList> {
    let Query(q) = query?;
    app.read(|s| {
        Ok(HashtagList {
            version: s.version(),
            hashtags: s.hashtags(q.min_freq),
        })
    })
    .map(Json)
}

async fn post_hashtag_selection(
    State(app): State<AppState>,
    body: Result<Json<HashtagSelection>, JsonRejection>,
) -> ApiResult<state::HashtagOutcome> {
    let Json(req) = body?;
    app.write(|s| s.select_hashtags(&req.accepted, &req.keywords)).map(Json)
}

async fn get_topics(State(app): State<AppState>) -> ApiResult<TopicList> {
    app.read(|s| {
        Ok(TopicList {
            version: s.version(),
            min_share: s.decisions().min_share,
            topics: s.topics()?,
        })
    })
    .map(Json)
}

async fn post_topic_selection(
    State(app): State<AppState>,
    body: Result<Json<TopicSelection>, JsonRejection>,
) -> ApiResult<state::TopicOutcome> {
    let Json(req) = body?;
    app.write(|s| s.select_topics(&req.accepted, req.min_share)).map(Json)
}

async fn get_distribution(State(app): State<AppState>) -> ApiResult<state::Projection> {
    app.read(|s| Ok(s.projection())).map(Json)
}

async fn post_assemble_preview(
    State(app): State<AppState>,
    body: Result<Json<AssembleRequest>, JsonRejection>,
) -> ApiResult<state::AssemblePreview> {
    let Json(req) = body?;
    app.read(|s| s.assemble_preview(req.target_total)).map(Json)
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint", vec![])
}

/// The API under `/api`, plus static files from `ui_dir` under `/ui` when given.
pub fn router(app: AppState, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/state", get(get_state))
        .route("/users", get(get_users))
        .route("/users/{id}/label", post(post_user_label))
        .route("/hashtags", get(get_hashtags))
        .route("/hashtags/selection", post(post_hashtag_selection))
        .route("/topics", get(get_topics))
        .route("/topics/selection", post(post_topic_selection))
        .route("/distribution", get(get_distribution))
        .route("/assemble/preview", post(post_assemble_preview))
        .fallback(not_found)
        .with_state(app);
    let mut router = Router::new().nest("/api", api);
    if let Some(dir) = ui_dir {
        router = router.nest_service("/ui", ServeDir::new(dir).append_index_html_on_directories(true));
    }
    router
}

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub state: StateConfig,
    /// Loopback by default.
    pub addr: SocketAddr,
    pub ui_dir: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(workspace: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            state: StateConfig::new(workspace),
            addr: SocketAddr::from(([127, 0, 0, 1], 8080)),
            ui_dir: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Binds and serves until the process is stopped.
pub async fn serve(cfg: ServiceConfig) -> Result<(), ServeError> {
    let app = AppState::open(cfg.state)?;
    let listener = tokio::net::TcpListener::bind(cfg.addr).await?;
    log::info!("curation service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(app, cfg.ui_dir)).await?;
    Ok(())
}
