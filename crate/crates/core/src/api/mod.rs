//! HTTP JSON service.
//!
//! | method | path                         | body / query                                   |
//! |--------|------------------------------|------------------------------------------------|
//! | POST   | `/datasets?name=`            | CSV                                            |
//! | GET    | `/datasets/{id}`             |                                                |
//! | GET    | `/datasets/{id}/schema`      |                                                |
//! | POST   | `/analyses`                  | `{"dataset_id", "plan"}` (plan optional)       |
//! | GET    | `/analyses/{id}`             |                                                |
//! | GET    | `/analyses/{id}/condensed`   |                                                |
//! | POST   | `/cube`                      | `{"dataset_id", "dimensions", "measures"}`     |
//! | GET    | `/cube/{id}`                 |                                                |
//! | GET    | `/cube/{id}/aggregate`       | `measure=&group_by=&filters=dim:level,...`     |
//!
//! Query values are form-urlencoded. `filters` is then split on `,` and on
//! the first `:` of each pair, and each side is percent-decoded again, so a
//! literal comma or colon inside a name is sent double-encoded (`%252C`).
//!
//! Errors are `{"error": "..."}` with 400 for unreadable input, 404 for
//! unknown ids and 422 for well-formed but invalid requests.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bundled::default_plan;
use crate::dataset::ColumnSchema;
use crate::kpi::Plan;
use crate::workspace::{parse_filters, Workspace, WorkspaceError};

pub const ADDR_ENV: &str = "KPIFORGE_ADDR";
pub const DATA_DIR_ENV: &str = "KPIFORGE_DATA_DIR";
pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";

#[derive(Debug)]
pub struct ApiError(WorkspaceError);

impl From<WorkspaceError> for ApiError {
    fn from(e: WorkspaceError) -> Self {
        Self(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0 {
            WorkspaceError::NotFound(_) => StatusCode::NOT_FOUND,
            WorkspaceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            WorkspaceError::Unprocessable(_) => StatusCode::UNPROCESSABLE_ENTITY,
            WorkspaceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(serde_json::json!({ "error": self.0.to_string() }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Store access is synchronous file I/O; keep it off the async workers.
async fn blocking<T, F>(ws: &Arc<Workspace>, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Workspace) -> Result<T, WorkspaceError> + Send + 'static,
{
    let ws = Arc::clone(ws);
    tokio::task::spawn_blocking(move || f(&ws))
        .await
        .map_err(|e| ApiError(WorkspaceError::Internal(format!("worker failed: {e}"))))?
        .map_err(ApiError)
}

fn parse_json<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| {
        ApiError(match e.classify() {
            serde_json::error::Category::Data => WorkspaceError::Unprocessable(e.to_string()),
            _ => WorkspaceError::BadRequest(format!("malformed JSON: {e}")),
        })
    })
}

/// Query pairs, form-urlencoded decoded (`+` is a space). The `filters`
/// value is split and decoded once more by [`parse_filters`].
fn query_pairs(query: Result<Query<Vec<(String, String)>>, QueryRejection>) -> ApiResult<Vec<(String, String)>> {
    query
        .map(|Query(pairs)| pairs)
        .map_err(|e| ApiError(WorkspaceError::BadRequest(format!("invalid query string: {e}"))))
}

#[derive(Serialize)]
struct CreatedDataset {
    id: String,
    name: String,
    row_count: usize,
    schema: Vec<ColumnSchema>,
}

async fn post_dataset(
    State(ws): State<Arc<Workspace>>,
    query: Result<Query<Vec<(String, String)>>, QueryRejection>,
    body: Bytes,
) -> ApiResult<Response> {
    let name = query_pairs(query)?
        .into_iter()
        .find(|(k, _)| k == "name")
        .map_or_else(|| "dataset".to_owned(), |(_, v)| v);
    let ds = blocking(&ws, move |ws| ws.ingest(&body, &name)).await?;
    let created = CreatedDataset {
        id: ds.id().to_string(),
        name: ds.name().to_owned(),
        row_count: ds.row_count(),
        schema: ds.schema(),
    };
    Ok((StatusCode::CREATED, Json(created)).into_response())
}

async fn get_dataset(State(ws): State<Arc<Workspace>>, Path(id): Path<String>) -> ApiResult<Response> {
    let doc = blocking(&ws, move |ws| ws.dataset_document(&id)).await?;
    Ok(Json(doc).into_response())
}

async fn get_schema(State(ws): State<Arc<Workspace>>, Path(id): Path<String>) -> ApiResult<Response> {
    let schema = blocking(&ws, move |ws| ws.schema(&id)).await?;
    Ok(Json(schema).into_response())
}

#[derive(Deserialize)]
struct AnalysisRequest {
    dataset_id: String,
    #[serde(default)]
    plan: Option<Plan>,
}

async fn post_analysis(State(ws): State<Arc<Workspace>>, body: Bytes) -> ApiResult<Response> {
    let req: AnalysisRequest = parse_json(&body)?;
    let plan = match req.plan {
        // re-run construction so hypotheses get filled in and checked
        Some(p) => Plan::new(p.registry, p.tests).map_err(|e| ApiError(e.into()))?,
        None => default_plan(),
    };
    let run = blocking(&ws, move |ws| ws.analyze(&req.dataset_id, plan)).await?;
    Ok((StatusCode::CREATED, Json(run)).into_response())
}

async fn get_analysis(State(ws): State<Arc<Workspace>>, Path(id): Path<String>) -> ApiResult<Response> {
    let bytes = blocking(&ws, move |ws| ws.analysis_raw(&id)).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

async fn get_condensed(State(ws): State<Arc<Workspace>>, Path(id): Path<String>) -> ApiResult<Response> {
    let run = blocking(&ws, move |ws| ws.analysis(&id)).await?;
    Ok(Json(run.condensed).into_response())
}

#[derive(Deserialize)]
struct CubeRequest {
    dataset_id: String,
    dimensions: Vec<String>,
    #[serde(default)]
    measures: Vec<String>,
}

async fn post_cube(State(ws): State<Arc<Workspace>>, body: Bytes) -> ApiResult<Response> {
    let req: CubeRequest = parse_json(&body)?;
    let info = blocking(&ws, move |ws| ws.create_cube(&req.dataset_id, &req.dimensions, &req.measures)).await?;
    Ok((StatusCode::CREATED, Json(info)).into_response())
}

async fn get_cube(State(ws): State<Arc<Workspace>>, Path(id): Path<String>) -> ApiResult<Response> {
    let info = blocking(&ws, move |ws| ws.cube_info(&id)).await?;
    Ok(Json(info).into_response())
}

async fn get_aggregate(
    State(ws): State<Arc<Workspace>>,
    Path(id): Path<String>,
    query: Result<Query<Vec<(String, String)>>, QueryRejection>,
) -> ApiResult<Response> {
    let mut measure = None;
    let mut group_by = None;
    let mut filters = Vec::new();
    for (k, v) in query_pairs(query)? {
        match k.as_str() {
            "measure" => measure = Some(v),
            "group_by" if !v.is_empty() => group_by = Some(v),
            "filters" => filters.extend(parse_filters(&v)?),
            _ => {}
        }
    }
    let measure = measure
        .filter(|m| !m.is_empty())
        .ok_or_else(|| ApiError(WorkspaceError::Unprocessable("query parameter 'measure' is required".into())))?;
    let result = blocking(&ws, move |ws| ws.aggregate(&id, &measure, group_by.as_deref(), filters)).await?;
    Ok(Json(result).into_response())
}

pub fn router(ws: Arc<Workspace>) -> Router {
    Router::new()
        .route("/datasets", post(post_dataset))
        .route("/datasets/{id}", get(get_dataset))
        .route("/datasets/{id}/schema", get(get_schema))
        .route("/analyses", post(post_analysis))
        .route("/analyses/{id}", get(get_analysis))
        .route("/analyses/{id}/condensed", get(get_condensed))
        .route("/cube", post(post_cube))
        .route("/cube/{id}", get(get_cube))
        .route("/cube/{id}/aggregate", get(get_aggregate))
        .with_state(ws)
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, data_dir: PathBuf) -> std::io::Result<()> {
    let ws = Workspace::open(&data_dir).map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {} (data in {})", listener.local_addr()?, data_dir.display());
    axum::serve(listener, router(Arc::new(ws)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
