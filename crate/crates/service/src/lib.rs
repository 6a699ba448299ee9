//! HTTP API over mesoscope corpora: ingestion, cached analyses and view
//! models.
//!
//! | route | result |
//! |---|---|
//! | `POST /corpora` | JSONL body in, `{corpus_id, record_count, dimensions}` out |
//! | `GET /corpora` | ids of stored corpora |
//! | `GET /corpora/{id}` | summary plus records |
//! | `GET /corpora/{id}/analysis?feature=F` | `{feature, params, result}` |
//! | `GET /corpora/{id}/view?kind=K&…` | grid, interleaved or linear view model |
//!
//! Analysis responses carry `x-cache: hit|miss` and `x-computed-ms`.

mod state;
mod view;

use std::future::Future;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mesoscope_core::analysis::Feature;
use mesoscope_core::corpus::{Corpus, Dimension};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;

pub use state::{
    corpus_id, digest_hex, AnalysisKey, AppState, Computed, ServiceConfig, DEFAULT_BODY_LIMIT,
    DEFAULT_PORT,
};
pub use view::{parse_view_query, ViewQuery, ViewQueryError};

pub const CACHE_HEADER: &str = "x-cache";
pub const COMPUTED_MS_HEADER: &str = "x-computed-ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub corpus_id: String,
    pub record_count: usize,
    pub dimensions: Vec<Dimension>,
}

impl CorpusSummary {
    fn new(id: &str, corpus: &Corpus) -> Self {
        CorpusSummary {
            corpus_id: id.to_string(),
            record_count: corpus.len(),
            dimensions: corpus.dimensions().to_vec(),
        }
    }
}

/// An error response: status plus `{"error": message}`.
#[derive(Debug)]
pub struct ApiError(pub StatusCode, pub String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn not_found(id: &str) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, format!("no corpus with id `{id}`"))
}

pub fn router(state: Arc<AppState>) -> Router {
    let limit = state.config().body_limit;
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/corpora", post(create_corpus).get(list_corpora))
        .route("/corpora/{id}", get(get_corpus))
        .route("/corpora/{id}/analysis", get(get_analysis))
        .route("/corpora/{id}/view", get(get_view))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

/// Serves until `shutdown` resolves, then writes the snapshot if one is
/// configured.
pub async fn serve(
    listener: TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(shutdown)
        .await?;
    state.save_snapshot()?;
    Ok(())
}

async fn create_corpus(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body)
        .map_err(|e| ApiError(StatusCode::BAD_REQUEST, format!("body is not UTF-8: {e}")))?;
    let (id, corpus, created) = state
        .ingest(text)
        .await
        .map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?;
    let status = if created {
        StatusCode::CREATED
    } else {
        StatusCode::OK
    };
    Ok((status, Json(CorpusSummary::new(&id, &corpus))).into_response())
}

async fn list_corpora(State(state): State<Arc<AppState>>) -> Json<Vec<String>> {
    Json(state.corpus_ids())
}

async fn get_corpus(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let corpus = state.corpus(&id).ok_or_else(|| not_found(&id))?;
    let summary = CorpusSummary::new(&id, &corpus);
    Ok(Json(json!({
        "corpus_id": summary.corpus_id,
        "record_count": summary.record_count,
        "dimensions": summary.dimensions,
        "records": corpus.records(),
    }))
    .into_response())
}

#[derive(Debug, Deserialize)]
struct AnalysisQuery {
    feature: String,
}

async fn get_analysis(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<AnalysisQuery>,
) -> Result<Response, ApiError> {
    let corpus = state.corpus(&id).ok_or_else(|| not_found(&id))?;
    let feature: Feature = q
        .feature
        .parse()
        .map_err(|e: mesoscope_core::analysis::UnknownFeature| {
            ApiError(StatusCode::BAD_REQUEST, e.to_string())
        })?;
    if feature == Feature::None {
        return Err(ApiError(
            StatusCode::BAD_REQUEST,
            "feature `none` has no analysis".to_string(),
        ));
    }
    let fetched = state.analysis(&id, corpus, feature).await;
    let computed = fetched
        .outcome
        .map_err(|e| ApiError(StatusCode::UNPROCESSABLE_ENTITY, e))?;
    let mut headers = cache_headers(fetched.cache_hit, &computed);
    headers.insert(
        header::CONTENT_TYPE,
        HeaderValue::from_static("application/json"),
    );
    Ok((headers, computed.body.clone()).into_response())
}

fn cache_headers(hit: bool, computed: &Computed) -> HeaderMap {
    let mut headers = HeaderMap::new();
    headers.insert(
        CACHE_HEADER,
        HeaderValue::from_static(if hit { "hit" } else { "miss" }),
    );
    headers.insert(COMPUTED_MS_HEADER, HeaderValue::from(computed.computed_ms as u64));
    headers
}

async fn get_view(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(pairs): Query<Vec<(String, String)>>,
) -> Result<Response, ApiError> {
    let corpus = state.corpus(&id).ok_or_else(|| not_found(&id))?;
    let query =
        parse_view_query(&pairs).map_err(|e| ApiError(StatusCode::BAD_REQUEST, e.to_string()))?;
    view::render(&state, corpus, query).await
}
