use std::collections::BTreeMap;
use std::sync::Arc;

use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use mesoscope_core::analysis::{AnalysisResult, Feature, UnknownFeature};
use mesoscope_core::corpus::{Corpus, MODEL};
use mesoscope_core::render::{build_grid, build_interleaved, build_linear, GridSpec, RenderError};
use thiserror::Error;

use crate::state::{corpus_id, AppState};
use crate::{cache_headers, ApiError};

#[derive(Debug, Clone, PartialEq)]
pub enum ViewQuery {
    Grid(GridSpec),
    Interleaved {
        badge: String,
        fixed: BTreeMap<String, String>,
    },
    Linear {
        group: String,
        fixed: BTreeMap<String, String>,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum ViewQueryError {
    #[error("missing query parameter `{0}`")]
    Missing(&'static str),
    #[error("unknown view kind `{0}` (expected grid, interleaved or linear)")]
    UnknownKind(String),
    #[error(transparent)]
    Feature(#[from] UnknownFeature),
    #[error("fixed selection `{0}` is not of the form DIM=VALUE")]
    BadFixed(String),
    #[error("dimension `{0}` is fixed twice")]
    FixedTwice(String),
}

/// Reads `kind`, `rows`, `cols`, `feature`, `badge`, `group` and fixed
/// selections given either as `fix.DIM=VALUE` or `fix=DIM=VALUE`.
pub fn parse_view_query(pairs: &[(String, String)]) -> Result<ViewQuery, ViewQueryError> {
    let mut fixed = BTreeMap::new();
    let mut plain: BTreeMap<&str, &str> = BTreeMap::new();
    for (k, v) in pairs {
        let (dim, value) = if let Some(dim) = k.strip_prefix("fix.") {
            (dim.to_string(), v.clone())
        } else if k == "fix" {
            let (d, val) = v
                .split_once('=')
                .ok_or_else(|| ViewQueryError::BadFixed(v.clone()))?;
            (d.to_string(), val.to_string())
        } else {
            plain.insert(k, v);
            continue;
        };
        if dim.is_empty() {
            return Err(ViewQueryError::BadFixed(format!("{k}={v}")));
        }
        if fixed.insert(dim.clone(), value).is_some() {
            return Err(ViewQueryError::FixedTwice(dim));
        }
    }
    let get = |name: &'static str| plain.get(name).map(|s| s.to_string());
    let kind = get("kind").ok_or(ViewQueryError::Missing("kind"))?;
    Ok(match kind.as_str() {
        "grid" => ViewQuery::Grid(GridSpec {
            row_dim: get("rows").ok_or(ViewQueryError::Missing("rows"))?,
            col_dim: get("cols").ok_or(ViewQueryError::Missing("cols"))?,
            fixed,
            feature: match plain.get("feature") {
                Some(f) => f.parse()?,
                None => Feature::None,
            },
        }),
        "interleaved" => ViewQuery::Interleaved {
            badge: get("badge").unwrap_or_else(|| MODEL.to_string()),
            fixed,
        },
        "linear" => ViewQuery::Linear {
            group: get("group").unwrap_or_else(|| MODEL.to_string()),
            fixed,
        },
        other => return Err(ViewQueryError::UnknownKind(other.to_string())),
    })
}

fn unprocessable(e: impl ToString) -> ApiError {
    ApiError(StatusCode::UNPROCESSABLE_ENTITY, e.to_string())
}

fn slice(corpus: &Corpus, fixed: &BTreeMap<String, String>) -> Result<Corpus, ApiError> {
    corpus
        .slice(fixed)
        .map_err(|e| unprocessable(RenderError::from(e)))
}

/// Builds the requested view. Analyses behind a view run on the fixed
/// slice and go through the same cache as the analysis endpoint.
pub(crate) async fn render(
    state: &Arc<AppState>,
    corpus: Arc<Corpus>,
    query: ViewQuery,
) -> Result<Response, ApiError> {
    let palette = &state.config().palette;
    let mut headers = axum::http::HeaderMap::new();
    let body = match query {
        ViewQuery::Grid(spec) => {
            spec.validate(&corpus).map_err(unprocessable)?;
            let computed = match spec.feature {
                Feature::None => None,
                feature => {
                    let sliced = slice(&corpus, &spec.fixed)?;
                    let fetched = state
                        .analysis(&corpus_id(&sliced), Arc::new(sliced), feature)
                        .await;
                    let computed = fetched.outcome.map_err(unprocessable)?;
                    headers = cache_headers(fetched.cache_hit, &computed);
                    Some(computed)
                }
            };
            let model = build_grid(&corpus, &spec, computed.as_ref().map(|c| &c.result), palette)
                .map_err(unprocessable)?;
            serde_json::to_string(&model)
        }
        ViewQuery::Interleaved { badge, fixed } => {
            let sliced = Arc::new(slice(&corpus, &fixed)?);
            let fetched = state
                .analysis(&corpus_id(&sliced), sliced.clone(), Feature::Pdc)
                .await;
            let computed = fetched.outcome.map_err(unprocessable)?;
            headers = cache_headers(fetched.cache_hit, &computed);
            let AnalysisResult::Pdc(pdc) = &computed.result else {
                unreachable!("pdc analysis yields a pdc result")
            };
            let model = build_interleaved(&sliced, pdc, &badge, palette).map_err(unprocessable)?;
            serde_json::to_string(&model)
        }
        ViewQuery::Linear { group, fixed } => {
            let sliced = slice(&corpus, &fixed)?;
            serde_json::to_string(&build_linear(&sliced, &group).map_err(unprocessable)?)
        }
    }
    .expect("view models serialize");
    headers.insert(
        header::CONTENT_TYPE,
        HeaderValue::from_static("application/json"),
    );
    Ok((headers, body).into_response())
}
