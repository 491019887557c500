//! Local HTTP authoring service: CSV sessions, recommendations, plan edits
//! and live chart previews.

mod error;
mod session;

use std::collections::HashMap;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use emoji_encoder::{
    ingest_csv, render, ChartSpec, Dataset, EncodingPlan, FieldKind, LegendEntry, Model, PlanEdit, RenderedChart,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use tower_http::services::ServeDir;

pub use error::{ApiError, ApiResult};
pub use session::{Session, SessionStore};

pub const DEFAULT_PAGE_SIZE: usize = 8;
pub const DEFAULT_SEARCH_LIMIT: usize = 20;
const BODY_LIMIT: usize = 64 * 1024 * 1024;

#[derive(Debug)]
pub struct AppState {
    pub model: Arc<Model>,
    pub sessions: SessionStore,
}

impl AppState {
    pub fn new(model: Arc<Model>) -> Arc<Self> {
        Arc::new(Self {
            model,
            sessions: SessionStore::default(),
        })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/recommendations", get(recommendations))
        .route("/sessions/{id}/plan", put(put_plan))
        .route("/sessions/{id}/spec", put(put_spec))
        .route("/sessions/{id}/preview", get(preview))
        .route("/emoji/search", get(search))
        .route("/palettes", get(palettes))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
        .with_state(state)
}

#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    pub port: u16,
    /// Sessions are restored from this file at startup (if it exists) and
    /// written back on shutdown.
    pub snapshot: Option<PathBuf>,
    /// Static authoring UI served under `/ui`.
    pub ui_dir: Option<PathBuf>,
}

/// Runs the service on localhost until Ctrl-C.
pub async fn serve(model: Model, opts: ServeOptions) -> std::io::Result<()> {
    let state = AppState::new(Arc::new(model));
    if let Some(path) = opts.snapshot.as_deref().filter(|p| p.exists()) {
        let n = state.sessions.restore(path).await?;
        tracing::info!("restored {n} sessions from {}", path.display());
    }
    let mut app = router(state.clone());
    if let Some(dir) = &opts.ui_dir {
        app = app.nest_service("/ui", ServeDir::new(dir).append_index_html_on_directories(true));
    }
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, opts.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(path) = &opts.snapshot {
        state.sessions.write_snapshot(path).await?;
        tracing::info!("wrote {} sessions to {}", state.sessions.len().await, path.display());
    }
    Ok(())
}

fn describe_fields(ds: &Dataset) -> Vec<Value> {
    ds.fields
        .iter()
        .map(|f| {
            let mut v = json!({ "name": f.name, "kind": f.kind });
            if f.kind == FieldKind::Categorical {
                v["values"] = json!(f.distinct_values());
            }
            v
        })
        .collect()
}

fn session_json(s: &Session) -> Value {
    json!({
        "id": s.id,
        "row_count": s.dataset.row_count,
        "fields": describe_fields(&s.dataset),
        "plan": s.plan,
        "spec": s.spec,
        "created": s.created,
        "updated": s.updated,
    })
}

async fn session_handle(state: &AppState, id: &str) -> ApiResult<Arc<tokio::sync::RwLock<Session>>> {
    state
        .sessions
        .get(id)
        .await
        .ok_or_else(|| ApiError::not_found(format!("unknown session {id:?}")))
}

/// Malformed JSON is a 400; well-formed JSON of the wrong shape is a 422.
fn parse_body<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => ApiError::unprocessable(e.to_string()),
        _ => ApiError::bad_request(e.to_string()),
    })
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::bad_request(format!("body is not UTF-8: {e}")))?;
    let dataset = ingest_csv(text).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let plan = state.model.auto_plan(&dataset);
    let session = Session::new(dataset, plan);
    let body = json!({
        "id": session.id,
        "row_count": session.dataset.row_count,
        "fields": describe_fields(&session.dataset),
        "plan": session.plan,
    });
    state.sessions.insert(session).await;
    Ok((StatusCode::CREATED, Json(body)))
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let handle = session_handle(&state, &id).await?;
    let s = handle.read().await;
    Ok(Json(session_json(&s)))
}

#[derive(Debug, Serialize)]
struct RecItem {
    rank: usize,
    emoji_id: String,
    glyph: String,
    score: f64,
}

#[derive(Debug, Serialize)]
struct Placeholder {
    emoji_id: String,
    glyph: String,
}

#[derive(Debug, Serialize)]
struct RecPage {
    target: String,
    page: usize,
    page_size: usize,
    total: usize,
    items: Vec<RecItem>,
    /// Set when the model has nothing to say about the target.
    placeholder: Option<Placeholder>,
}

fn positive_param(params: &HashMap<String, String>, key: &str, default: usize) -> ApiResult<usize> {
    match params.get(key) {
        None => Ok(default),
        Some(raw) => match raw.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ApiError::bad_request(format!(
                "{key} must be a positive integer, got {raw:?}"
            ))),
        },
    }
}

/// Resolves a recommendation target to the text that is embedded.
/// `value:` targets may contain `:` in both the field name and the value, so
/// every split point is tried against the dataset.
fn resolve_target(ds: &Dataset, target: &str) -> ApiResult<String> {
    if let Some(name) = target.strip_prefix("field:") {
        ds.field(name).map_err(|e| ApiError::not_found(e.to_string()))?;
        return Ok(name.to_string());
    }
    if let Some(rest) = target.strip_prefix("value:") {
        for (i, _) in rest.match_indices(':') {
            let (field, value) = (&rest[..i], &rest[i + 1..]);
            if let Ok(f) = ds.field_of_kind(field, FieldKind::Categorical) {
                if f.distinct_values().contains(&value) {
                    return Ok(value.to_string());
                }
            }
        }
        return Err(ApiError::not_found(format!("unknown target {target:?}")));
    }
    Err(ApiError::bad_request(format!(
        "target must be field:<name> or value:<field>:<value>, got {target:?}"
    )))
}

async fn recommendations(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<RecPage>> {
    let target = params
        .get("target")
        .ok_or_else(|| ApiError::bad_request("missing target"))?;
    let page = positive_param(&params, "page", 1)?;
    let page_size = positive_param(&params, "page_size", DEFAULT_PAGE_SIZE)?;
    let handle = session_handle(&state, &id).await?;
    let text = resolve_target(&handle.read().await.dataset, target)?;

    let model = &state.model;
    let ranking = model.ranking(&text);
    let total = ranking.len();
    let items = ranking
        .into_iter()
        .skip((page - 1).saturating_mul(page_size))
        .take(page_size)
        .map(|r| RecItem {
            glyph: model.lexicon.glyph(&r.emoji_id).unwrap_or_default(),
            rank: r.rank,
            emoji_id: r.emoji_id,
            score: r.score,
        })
        .collect();
    let placeholder = (total == 0).then(|| {
        let id = &model.placeholder.placeholder_emoji_id;
        Placeholder {
            emoji_id: id.clone(),
            glyph: model.lexicon.glyph(id).unwrap_or_default(),
        }
    });
    Ok(Json(RecPage {
        target: target.clone(),
        page,
        page_size,
        total,
        items,
        placeholder,
    }))
}

fn dry_render(model: &Model, ds: &Dataset, plan: &EncodingPlan, spec: &ChartSpec) -> ApiResult<RenderedChart> {
    render(ds, plan, spec, &model.context()).map_err(|e| ApiError::unprocessable(e.to_string()))
}

async fn put_plan(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<EncodingPlan>> {
    let edit: PlanEdit = parse_body(&body)?;
    let handle = session_handle(&state, &id).await?;
    let mut s = handle.write().await;
    let model = &state.model;
    let next = s
        .plan
        .apply(&edit, &s.dataset, &model.lexicon, &model.palettes)
        .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    if let Some(spec) = &s.spec {
        dry_render(model, &s.dataset, &next, spec)?;
    }
    s.plan = next;
    s.touch();
    Ok(Json(s.plan.clone()))
}

#[derive(Debug, Serialize)]
struct PreviewBody<'a> {
    text: String,
    legend: Vec<LegendEntry>,
    spec: &'a ChartSpec,
}

async fn put_spec(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let spec: ChartSpec = parse_body(&body)?;
    let handle = session_handle(&state, &id).await?;
    let mut s = handle.write().await;
    let model = &state.model;
    spec.validate(&s.dataset, &model.palettes)
        .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    let chart = dry_render(model, &s.dataset, &s.plan, &spec)?;
    let body = json!(PreviewBody {
        text: chart.text,
        legend: chart.legend,
        spec: &spec
    });
    s.spec = Some(spec);
    s.touch();
    Ok(Json(body))
}

async fn preview(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let handle = session_handle(&state, &id).await?;
    let s = handle.read().await;
    let spec = s
        .spec
        .as_ref()
        .ok_or_else(|| ApiError::conflict("no chart spec set for this session"))?;
    let chart = dry_render(&state.model, &s.dataset, &s.plan, spec)?;
    Ok(Json(json!(PreviewBody {
        text: chart.text,
        legend: chart.legend,
        spec
    })))
}

async fn search(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<Value>> {
    let q = params.get("q").map(String::as_str).unwrap_or("");
    let limit = positive_param(&params, "limit", DEFAULT_SEARCH_LIMIT)?;
    let hits = state
        .model
        .lexicon
        .search(q, limit)
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let items: Vec<Value> = hits
        .into_iter()
        .map(|e| json!({ "id": e.id, "glyph": e.glyph(), "name": e.name, "keywords": e.keywords }))
        .collect();
    Ok(Json(json!({ "query": q, "items": items })))
}

async fn palettes(State(state): State<Arc<AppState>>) -> Json<Value> {
    let lexicon = &state.model.lexicon;
    let list: Vec<Value> = state
        .model
        .palettes
        .iter()
        .map(|p| {
            let levels: Vec<Value> = p
                .levels
                .iter()
                .map(|id| json!({ "emoji_id": id, "glyph": lexicon.glyph(id).unwrap_or_default() }))
                .collect();
            json!({ "name": p.name, "kind": p.kind, "levels": levels })
        })
        .collect();
    Json(json!({ "palettes": list }))
}
