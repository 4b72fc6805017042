//! HTTP interface over the [`Orchestrator`].

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::orchestrator::{
    InputKind, Orchestrator, OrchestratorError, Overrides, Parameters, ResultKind, SeriesSpec,
};

mod openapi;

pub use openapi::openapi_document;

/// Largest accepted request body; EPW files are a few MB.
pub const MAX_BODY_BYTES: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    NotFound,
    CurrentlyRunning,
    AlreadyRunning,
    NotConfigured,
    NotFinished,
    RecordFinished,
    SourceNotFinished,
    InvalidInput,
    ValidationFailed,
    EmptyAxis,
    InvalidRequest,
    StoreUnavailable,
    Internal,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 13] = [
        ErrorCode::NotFound,
        ErrorCode::CurrentlyRunning,
        ErrorCode::AlreadyRunning,
        ErrorCode::NotConfigured,
        ErrorCode::NotFinished,
        ErrorCode::RecordFinished,
        ErrorCode::SourceNotFinished,
        ErrorCode::InvalidInput,
        ErrorCode::ValidationFailed,
        ErrorCode::EmptyAxis,
        ErrorCode::InvalidRequest,
        ErrorCode::StoreUnavailable,
        ErrorCode::Internal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::NotFound => "not_found",
            ErrorCode::CurrentlyRunning => "currently_running",
            ErrorCode::AlreadyRunning => "already_running",
            ErrorCode::NotConfigured => "not_configured",
            ErrorCode::NotFinished => "not_finished",
            ErrorCode::RecordFinished => "record_finished",
            ErrorCode::SourceNotFinished => "source_not_finished",
            ErrorCode::InvalidInput => "invalid_input",
            ErrorCode::ValidationFailed => "validation_failed",
            ErrorCode::EmptyAxis => "empty_axis",
            ErrorCode::InvalidRequest => "invalid_request",
            ErrorCode::StoreUnavailable => "store_unavailable",
            ErrorCode::Internal => "internal",
        }
    }

    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::CurrentlyRunning
            | ErrorCode::AlreadyRunning
            | ErrorCode::NotFinished
            | ErrorCode::RecordFinished
            | ErrorCode::SourceNotFinished => StatusCode::CONFLICT,
            ErrorCode::NotConfigured
            | ErrorCode::InvalidInput
            | ErrorCode::ValidationFailed
            | ErrorCode::EmptyAxis
            | ErrorCode::InvalidRequest => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::StoreUnavailable => StatusCode::SERVICE_UNAVAILABLE,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<&OrchestratorError> for ErrorCode {
    fn from(e: &OrchestratorError) -> Self {
        match e {
            OrchestratorError::NotFound(_) | OrchestratorError::SeriesNotFound(_) => ErrorCode::NotFound,
            OrchestratorError::CurrentlyRunning(_) => ErrorCode::CurrentlyRunning,
            OrchestratorError::AlreadyRunning(_) => ErrorCode::AlreadyRunning,
            OrchestratorError::NotConfigured(_) => ErrorCode::NotConfigured,
            OrchestratorError::NotFinished(_) => ErrorCode::NotFinished,
            OrchestratorError::Finished(_) => ErrorCode::RecordFinished,
            OrchestratorError::SourceNotFinished(_) => ErrorCode::SourceNotFinished,
            OrchestratorError::InvalidInput { .. } => ErrorCode::InvalidInput,
            OrchestratorError::ValidationFailed(_) => ErrorCode::ValidationFailed,
            OrchestratorError::EmptyAxis(_) => ErrorCode::EmptyAxis,
            OrchestratorError::Store(_) => ErrorCode::StoreUnavailable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub http_status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            http_status: code.status(),
            code: code.as_str(),
            message: message.into(),
        }
    }
}

impl From<OrchestratorError> for ApiError {
    fn from(e: OrchestratorError) -> Self {
        ApiError::new(ErrorCode::from(&e), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.http_status, Json(&self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Clone, Default)]
pub struct ApiConfig {
    /// Allowed CORS origins; empty means any origin.
    pub cors_origins: Vec<String>,
}

#[derive(Clone)]
struct AppState {
    orchestrator: Arc<Orchestrator>,
}

async fn blocking<T, F>(state: &AppState, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Orchestrator) -> Result<T, OrchestratorError> + Send + 'static,
{
    let orchestrator = Arc::clone(&state.orchestrator);
    tokio::task::spawn_blocking(move || f(&orchestrator))
        .await
        .map_err(|e| ApiError::new(ErrorCode::Internal, format!("worker task failed: {e}")))?
        .map_err(ApiError::from)
}

fn parse_body<T: DeserializeOwned + Default>(body: &[u8], allow_empty: bool) -> ApiResult<T> {
    if allow_empty && body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::new(ErrorCode::InvalidRequest, format!("invalid JSON body: {e}")))
}

fn parse_kind<T: std::str::FromStr<Err = String>>(raw: &str) -> ApiResult<T> {
    raw.parse().map_err(|e: String| ApiError::new(ErrorCode::NotFound, e))
}

fn cors_layer(config: &ApiConfig) -> CorsLayer {
    let layer = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST, Method::PUT, Method::OPTIONS])
        .allow_headers(Any);
    if config.cors_origins.is_empty() {
        layer.allow_origin(Any)
    } else {
        let origins: Vec<HeaderValue> = config
            .cors_origins
            .iter()
            .filter_map(|o| HeaderValue::from_str(o).ok())
            .collect();
        layer.allow_origin(AllowOrigin::list(origins))
    }
}

pub fn router(orchestrator: Arc<Orchestrator>, config: &ApiConfig) -> Router {
    Router::new()
        .route("/openapi", get(openapi))
        .route("/simulations", post(create_simulation).get(list_simulations))
        .route("/simulations/{id}", get(get_simulation))
        .route("/simulations/{id}/input/{kind}", put(upload_input))
        .route("/simulations/{id}/parameters", post(configure))
        .route("/simulations/{id}/run", post(start))
        .route("/simulations/{id}/cancel", post(cancel))
        .route("/simulations/{id}/status", get(status))
        .route("/simulations/{id}/results/{kind}", get(result))
        .route("/simulations/{id}/geometry", get(geometry))
        .route("/simulations/{id}/rerun", post(rerun))
        .route("/series", post(run_series).get(list_series))
        .route("/series/{id}", get(get_series))
        .fallback(not_found)
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .layer(cors_layer(config))
        .with_state(AppState { orchestrator })
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    orchestrator: Arc<Orchestrator>,
    config: &ApiConfig,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(orchestrator, config))
        .with_graceful_shutdown(shutdown)
        .await
}

async fn not_found() -> ApiError {
    ApiError::new(ErrorCode::NotFound, "no such endpoint")
}

async fn openapi() -> Json<serde_json::Value> {
    Json(openapi_document())
}

async fn create_simulation(State(state): State<AppState>) -> ApiResult<impl IntoResponse> {
    let record = blocking(&state, |o| o.create_simulation()).await?;
    Ok((StatusCode::CREATED, Json(record)))
}

async fn list_simulations(State(state): State<AppState>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&state, |o| o.history()).await?))
}

async fn get_simulation(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&state, move |o| o.get(&id)).await?))
}

async fn upload_input(
    State(state): State<AppState>,
    Path((id, kind)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<StatusCode> {
    let kind: InputKind = parse_kind(&kind)?;
    blocking(&state, move |o| o.upload_input(&id, kind, &body)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn configure(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let params: Parameters = serde_json::from_slice(&body)
        .map_err(|e| ApiError::new(ErrorCode::InvalidRequest, format!("invalid JSON body: {e}")))?;
    Ok(Json(blocking(&state, move |o| o.configure(&id, &params)).await?))
}

async fn start(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let record = blocking(&state, move |o| o.start(&id)).await?;
    Ok((StatusCode::ACCEPTED, Json(record)))
}

async fn cancel(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let signalled = blocking(&state, move |o| o.cancel(&id)).await?;
    Ok(Json(serde_json::json!({ "cancelled": signalled })))
}

async fn status(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&state, move |o| o.status(&id)).await?))
}

async fn result(
    State(state): State<AppState>,
    Path((id, kind)): Path<(String, String)>,
) -> ApiResult<Response> {
    let kind: ResultKind = parse_kind(&kind)?;
    let bytes = blocking(&state, move |o| o.result_artifact(&id, kind)).await?;
    let content_type = match kind {
        ResultKind::Csv => "text/csv; charset=utf-8",
        ResultKind::Eso => "text/plain; charset=utf-8",
    };
    let disposition = format!("attachment; filename=\"{}\"", kind.artifact_name());
    Ok((
        [
            (header::CONTENT_TYPE, content_type.to_string()),
            (header::CONTENT_DISPOSITION, disposition),
        ],
        bytes,
    )
        .into_response())
}

async fn geometry(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&state, move |o| o.geometry(&id)).await?))
}

async fn rerun(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let overrides: Overrides = parse_body(&body, true)?;
    let record = blocking(&state, move |o| o.rerun_with(&id, &overrides)).await?;
    Ok((StatusCode::CREATED, Json(record)))
}

async fn run_series(State(state): State<AppState>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let spec: SeriesSpec = parse_body(&body, false)?;
    let view = blocking(&state, move |o| o.run_series(&spec)).await?;
    Ok((StatusCode::ACCEPTED, Json(view)))
}

async fn list_series(State(state): State<AppState>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&state, |o| o.series_ids()).await?))
}

async fn get_series(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&state, move |o| o.series(&id)).await?))
}
