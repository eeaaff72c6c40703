use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use rdfforge_core::rql::parse_rql;
use rdfforge_core::Exec;
use serde::Deserialize;
use serde_json::{json, Value as Json};

use crate::store::{Store, StoreError};

pub struct AppState {
    pub store: Store,
    pub limit_default: usize,
    pub exec: Exec,
}

const JSON_UTF8: &str = "application/json; charset=utf-8";

fn json_response(status: StatusCode, body: &Json) -> Response {
    (status, [(header::CONTENT_TYPE, JSON_UTF8)], body.to_string()).into_response()
}

impl IntoResponse for StoreError {
    fn into_response(self) -> Response {
        let status = match &self {
            StoreError::NotFound(_) => StatusCode::NOT_FOUND,
            StoreError::BadRequest(_) => StatusCode::BAD_REQUEST,
            StoreError::Conflict(_) => StatusCode::CONFLICT,
            StoreError::MissingResId | StoreError::Db(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            log::error!("{self}");
        }
        json_response(status, &json!({ "error": self.to_string() }))
    }
}

type Reply = Result<Response, StoreError>;

/// Runs blocking database work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, StoreError> + Send + 'static) -> Result<T, StoreError> {
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(StoreError::BadRequest(format!("request aborted: {e}"))))
}

fn parse_id(raw: &str) -> Result<i64, StoreError> {
    raw.parse().map_err(|_| StoreError::BadRequest(format!("`{raw}` is not an integer id")))
}

fn parse_body(bytes: &Bytes) -> Result<Json, StoreError> {
    if bytes.is_empty() {
        return Ok(json!({}));
    }
    serde_json::from_slice(bytes).map_err(|e| StoreError::BadRequest(format!("invalid JSON: {e}")))
}

#[derive(Deserialize)]
struct ListParams {
    rql: Option<String>,
    limit: Option<String>,
    offset: Option<String>,
}

fn parse_count(raw: Option<&str>, name: &str, default: usize) -> Result<usize, StoreError> {
    raw.map_or(Ok(default), |v| v.parse().map_err(|_| StoreError::BadRequest(format!("`{name}` must be a non-negative integer"))))
}

async fn list(State(s): State<Arc<AppState>>, Path(table): Path<String>, Query(q): Query<ListParams>) -> Reply {
    let limit = parse_count(q.limit.as_deref(), "limit", s.limit_default)?;
    let offset = parse_count(q.offset.as_deref(), "offset", 0)?;
    let expr = q.rql.as_deref().filter(|r| !r.trim().is_empty()).map(parse_rql).transpose().map_err(|e| StoreError::BadRequest(e.to_string()))?;
    let rows = blocking(move || s.store.list(&table, expr.as_ref(), offset, limit, s.exec)).await?;
    Ok(json_response(StatusCode::OK, &Json::Array(rows)))
}

async fn create(State(s): State<Arc<AppState>>, Path(table): Path<String>, body: Bytes) -> Reply {
    let body = parse_body(&body)?;
    let entity = blocking(move || s.store.create(&table, &body)).await?;
    Ok(json_response(StatusCode::CREATED, &entity))
}

async fn get_one(State(s): State<Arc<AppState>>, Path((table, id)): Path<(String, String)>) -> Reply {
    let id = parse_id(&id)?;
    let entity = blocking(move || s.store.get(&table, id)).await?;
    Ok(json_response(StatusCode::OK, &entity))
}

async fn update(s: Arc<AppState>, table: String, id: String, body: Bytes, total: bool) -> Reply {
    let id = parse_id(&id)?;
    let body = parse_body(&body)?;
    let entity = blocking(move || s.store.update(&table, id, &body, total)).await?;
    Ok(json_response(StatusCode::OK, &entity))
}

async fn replace(State(s): State<Arc<AppState>>, Path((table, id)): Path<(String, String)>, body: Bytes) -> Reply {
    update(s, table, id, body, true).await
}

async fn patch(State(s): State<Arc<AppState>>, Path((table, id)): Path<(String, String)>, body: Bytes) -> Reply {
    update(s, table, id, body, false).await
}

async fn delete(State(s): State<Arc<AppState>>, Path((table, id)): Path<(String, String)>) -> Reply {
    let id = parse_id(&id)?;
    blocking(move || s.store.delete(&table, id)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

#[derive(Deserialize)]
struct ResolveParams {
    uri: Option<String>,
}

async fn resolve(State(s): State<Arc<AppState>>, Query(q): Query<ResolveParams>) -> Reply {
    let uri = q.uri.ok_or_else(|| StoreError::BadRequest("missing `uri` parameter".into()))?;
    let lookup = uri.clone();
    let id = blocking(move || s.store.resolve(&lookup)).await?;
    Ok(json_response(StatusCode::OK, &json!({ "uri": uri, "id": id })))
}

/// `/{table}` (GET list, POST), `/{table}/{id}` (GET, PUT, PATCH, DELETE)
/// and `/_res_id?uri=`.
pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/_res_id", get(resolve))
        .route("/{table}", get(list).post(create))
        .route("/{table}/{id}", get(get_one).put(replace).patch(patch).delete(delete))
        .with_state(state)
}
