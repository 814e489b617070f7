use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chartscribe_core::describe::catalog_for;
use chartscribe_core::features::FeatureCatalog;
use chartscribe_core::ingestion::{annotate_svg, fetch_chart, IngestError, RemoteConfig};
use chartscribe_core::model::{ChartBundle, ChartType, SelectionState};
use chartscribe_core::textgen::{render_selection, Description, Renderer, SelectionError, TemplateCatalog};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::store::{ChartPage, ChartSummary, ScanReport, StoreError};
use crate::AppState;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("chart {0:?} not found")]
    ChartNotFound(String),
    #[error("chart {0:?} has no SVG")]
    SvgNotFound(String),
    #[error("{0}")]
    InvalidPage(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Validation(String),
    #[error("remote rejected the API token (status {0})")]
    AuthFailed(u16),
    #[error("remote chart {0:?} not found")]
    RemoteNotFound(String),
    #[error("{0}")]
    Upstream(String),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    fn status(&self) -> StatusCode {
        match self {
            ApiError::ChartNotFound(_) | ApiError::SvgNotFound(_) | ApiError::RemoteNotFound(_) => {
                StatusCode::NOT_FOUND
            }
            ApiError::InvalidPage(_) | ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Validation(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::AuthFailed(_) => StatusCode::UNAUTHORIZED,
            ApiError::Upstream(_) => StatusCode::BAD_GATEWAY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::ChartNotFound(_) | ApiError::SvgNotFound(_) | ApiError::RemoteNotFound(_) => {
                "not_found"
            }
            ApiError::InvalidPage(_) => "invalid_page",
            ApiError::BadRequest(_) => "bad_request",
            ApiError::Validation(_) => "validation_error",
            ApiError::AuthFailed(_) => "auth_failed",
            ApiError::Upstream(_) => "upstream_error",
            ApiError::Internal(_) => "internal_error",
        }
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    detail: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code(),
            detail: self.to_string(),
        };
        (self.status(), Json(body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::InvalidPage => ApiError::InvalidPage(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl From<SelectionError> for ApiError {
    fn from(e: SelectionError) -> Self {
        ApiError::Validation(e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn routes(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/api/charts", get(list_charts))
        .route("/api/charts/import", post(import_chart))
        .route("/api/charts/{id}", get(get_chart))
        .route("/api/charts/{id}/features", get(get_features))
        .route("/api/charts/{id}/description", post(post_description))
        .route("/api/charts/{id}/svg", get(get_svg))
        .route("/api/rescan", post(rescan))
        .with_state(state)
}

#[derive(Debug, Serialize)]
struct Health {
    status: &'static str,
    charts: usize,
}

async fn healthz(State(state): State<AppState>) -> Json<Health> {
    Json(Health {
        status: "ok",
        charts: state.store().len(),
    })
}

#[derive(Debug, Deserialize)]
struct ListQuery {
    page: Option<usize>,
    page_size: Option<usize>,
    #[serde(rename = "type")]
    chart_type: Option<String>,
}

const DEFAULT_PAGE_SIZE: usize = 20;

async fn list_charts(
    State(state): State<AppState>,
    query: Result<Query<ListQuery>, QueryRejection>,
) -> ApiResult<Json<ChartPage>> {
    let Query(q) = query.map_err(|e| ApiError::InvalidPage(e.body_text()))?;
    let filter = match q.chart_type.as_deref().filter(|t| !t.is_empty()) {
        Some(t) => Some(
            t.parse::<ChartType>()
                .map_err(|_| ApiError::BadRequest(format!("unknown chart type {t:?}")))?,
        ),
        None => None,
    };
    let page = state
        .store()
        .list(q.page.unwrap_or(1), q.page_size.unwrap_or(DEFAULT_PAGE_SIZE), filter)?;
    Ok(Json(page))
}

fn bundle(state: &AppState, id: &str) -> ApiResult<Arc<ChartBundle>> {
    state
        .store()
        .get(id)
        .ok_or_else(|| ApiError::ChartNotFound(id.to_string()))
}

#[derive(Debug, Serialize)]
struct ChartView {
    #[serde(flatten)]
    bundle: Arc<ChartBundle>,
    has_svg: bool,
}

async fn get_chart(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<ChartView>> {
    let bundle = bundle(&state, &id)?;
    Ok(Json(ChartView {
        has_svg: bundle.has_svg(),
        bundle,
    }))
}

async fn get_features(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<FeatureCatalog>> {
    let bundle = bundle(&state, &id)?;
    Ok(Json(catalog_for(&bundle, &state.config().engine)))
}

async fn post_description(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<SelectionState>, JsonRejection>,
) -> ApiResult<Json<Description>> {
    let bundle = bundle(&state, &id)?;
    let Json(selection) = body.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    let engine = &state.config().engine;
    let catalog = catalog_for(&bundle, engine);
    let renderer = Renderer::new(TemplateCatalog::english(), engine.format);
    Ok(Json(render_selection(&catalog, &selection, &renderer)?))
}

async fn get_svg(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let bundle = bundle(&state, &id)?;
    let svg = bundle
        .svg_text
        .as_deref()
        .ok_or_else(|| ApiError::SvgNotFound(id.clone()))?;
    let body = annotate_svg(svg, &bundle).unwrap_or_else(|e| {
        warn!(%id, error = %e, "serving SVG without annotations");
        svg.to_string()
    });
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], body).into_response())
}

#[derive(Debug, Deserialize)]
struct ImportRequest {
    remote_id: String,
}

#[derive(Debug, Serialize)]
struct ImportResult {
    id: String,
    chart: ChartSummary,
}

fn import_error(remote_id: &str, e: IngestError) -> ApiError {
    match e {
        IngestError::AuthFailed(status) => ApiError::AuthFailed(status),
        IngestError::NotFound => ApiError::RemoteNotFound(remote_id.to_string()),
        IngestError::Io(msg) => ApiError::Internal(msg),
        other => ApiError::Upstream(other.to_string()),
    }
}

async fn import_chart(
    State(state): State<AppState>,
    body: Result<Json<ImportRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<ImportResult>)> {
    let Json(req) = body.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    let remote_id = req.remote_id.trim().to_string();
    if remote_id.is_empty() || remote_id.contains('/') {
        return Err(ApiError::BadRequest("remote_id must be a non-empty chart id".into()));
    }
    let task_state = state.clone();
    let summary = tokio::task::spawn_blocking(move || -> ApiResult<ChartSummary> {
        let config = task_state.config();
        let remote = RemoteConfig::new(config.remote_base.clone(), config.api_token.clone());
        let bundle = fetch_chart(&remote_id, &remote, task_state.transport())
            .map_err(|e| import_error(&remote_id, e))?;
        let stored = task_state.store_mut().insert(bundle)?;
        Ok(ChartSummary::of(&stored))
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok((
        StatusCode::CREATED,
        Json(ImportResult {
            id: summary.id.clone(),
            chart: summary,
        }),
    ))
}

async fn rescan(State(state): State<AppState>) -> ApiResult<Json<ScanReport>> {
    let report = tokio::task::spawn_blocking(move || state.store_mut().scan())
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok(Json(report))
}
