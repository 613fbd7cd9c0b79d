//! HTTP/JSON service over one descriptor and table. Rows are 0-based data
//! rows. Reads share the session lock; edits and expansion take it
//! exclusively.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::RwLock;

use ontopop_core::expansion::{run_expansion, ManchesterOptions, MintRegistry, PrepareError};
use ontopop_core::pattern::ColumnBinding;
use ontopop_core::validation::{autocomplete, validate_table, ValidatedTable};

use crate::project::{load_registry, InputError, Project};

struct Session {
    vtable: ValidatedTable,
    registry: MintRegistry,
}

struct AppState {
    project: Project,
    session: RwLock<Session>,
    table_path: Option<PathBuf>,
    registry_path: PathBuf,
}

type Shared = Arc<AppState>;

struct ApiError(StatusCode, Value);

impl ApiError {
    fn new(status: StatusCode, message: impl ToString) -> Self {
        ApiError(status, json!({ "error": message.to_string() }))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, r.body_text())
    }
}

fn internal(e: impl ToString) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e)
}

pub fn run(descriptor: PathBuf, table: Option<PathBuf>, registry: PathBuf, port: u16) -> Result<ExitCode, InputError> {
    let project = Project::load(&descriptor)?;
    let doc = match &table {
        Some(path) => project.load_table(path)?,
        None => project.empty_table(),
    };
    let vtable = project.validate(&doc)?;
    let state = Arc::new(AppState {
        session: RwLock::new(Session {
            vtable,
            registry: load_registry(&registry)?,
        }),
        project,
        table_path: table,
        registry_path: registry,
    });
    let runtime = tokio::runtime::Runtime::new().map_err(|e| InputError(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
            .await
            .map_err(|e| InputError(format!("port {port}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| InputError(e.to_string()))?;
        println!("listening on http://{addr}");
        let _ = std::io::stdout().flush();
        axum::serve(listener, router(state))
            .await
            .map_err(|e| InputError(e.to_string()))?;
        Ok(ExitCode::SUCCESS)
    })
}

fn router(state: Shared) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/template", get(template))
        .route("/complete", get(complete))
        .route("/cells", post(cells))
        .route("/validate", post(validate))
        .route("/expand", post(expand))
        .route("/export/csv", get(export_csv))
        .with_state(state)
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn template(State(state): State<Shared>) -> Result<Json<Value>, ApiError> {
    let session = state.session.read().await;
    let descriptor: Value = serde_json::from_str(&state.project.descriptor.to_json()).map_err(internal)?;
    let v = &session.vtable;
    Ok(Json(json!({
        "descriptor": descriptor,
        "table": v.table,
        "statuses": v.statuses,
        "summary": v.summary,
        "errors": v.errors,
    })))
}

#[derive(Deserialize)]
struct CompleteParams {
    column: String,
    q: String,
    limit: Option<usize>,
}

async fn complete(
    State(state): State<Shared>,
    params: Result<Query<CompleteParams>, QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    let Query(params) = params?;
    let spec = state
        .project
        .descriptor
        .column(&params.column)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no column named {:?}", params.column)))?;
    let vset = state
        .project
        .cache
        .get_or_materialize(&state.project.graphs, &spec.range)
        .map_err(internal)?;
    let candidates = autocomplete(&params.q, &vset, params.limit.unwrap_or(10));
    Ok(Json(serde_json::to_value(candidates).map_err(internal)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CellEdit {
    row: usize,
    column: String,
    text: String,
}

async fn cells(
    State(state): State<Shared>,
    body: Result<Json<CellEdit>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(edit) = body?;
    let mut session = state.session.write().await;
    let col = session
        .vtable
        .table
        .column_index(&edit.column)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no column named {:?}", edit.column)))?;
    let rows = session.vtable.table.row_count();
    if edit.row > rows {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("row {} is past the end of the table ({rows} rows)", edit.row),
        ));
    }
    let p = &state.project;
    let statuses = session
        .vtable
        .edit_cell(edit.row, col, &edit.text, &p.descriptor, &p.graphs, &p.cache)
        .map_err(internal)?;
    let error = session
        .vtable
        .errors
        .iter()
        .find(|e| e.row == edit.row && e.column == edit.column)
        .map(|e| e.message.clone());
    Ok(Json(json!({
        "row": edit.row,
        "column": edit.column,
        "statuses": statuses,
        "error": error,
    })))
}

async fn validate(State(state): State<Shared>) -> Result<Json<Value>, ApiError> {
    let mut session = state.session.write().await;
    let p = &state.project;
    let fresh = validate_table(&session.vtable.table, &p.descriptor, &p.graphs, &p.cache).map_err(internal)?;
    session.vtable = fresh;
    let v = &session.vtable;
    Ok(Json(json!({
        "summary": v.summary,
        "statuses": v.statuses,
        "issues": v.issues(&p.descriptor),
        "errors": v.errors,
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpandRequest {
    patterns: Vec<String>,
    binding: ColumnBinding,
    #[serde(default)]
    rows: Option<Vec<usize>>,
    #[serde(default)]
    labels: bool,
}

async fn expand(
    State(state): State<Shared>,
    body: Result<Json<ExpandRequest>, JsonRejection>,
) -> Result<Json<Value>, ApiError> {
    let Json(request) = body?;
    let binding = ColumnBinding(
        request
            .binding
            .0
            .into_iter()
            .map(|(k, v)| (k.trim_start_matches('?').to_string(), v))
            .collect(),
    );
    let mut session = state.session.write().await;
    let p = &state.project;
    let mut registry = session.registry.clone();
    let result = run_expansion(
        &request.patterns,
        &binding,
        &p.descriptor,
        &p.graphs,
        &session.vtable,
        &mut registry,
        request.rows.as_deref(),
        ManchesterOptions { labels: request.labels },
    );
    let (expansion, rendered) = match result {
        Ok(done) => done,
        Err(PrepareError::Violations(violations)) => {
            return Err(ApiError(StatusCode::CONFLICT, json!({ "violations": violations })))
        }
        Err(e) => return Err(ApiError::new(StatusCode::BAD_REQUEST, e)),
    };
    std::fs::write(&state.registry_path, registry.to_json()).map_err(internal)?;
    if let Some(path) = &state.table_path {
        std::fs::write(path, session.vtable.table.to_csv()).map_err(internal)?;
    }
    session.registry = registry;
    Ok(Json(json!({
        "manchester": rendered.manchester,
        "functional": rendered.functional,
        "reportCsv": rendered.report_csv,
        "report": expansion.report,
        "minted": expansion.report.minted,
    })))
}

async fn export_csv(State(state): State<Shared>) -> Result<Response, ApiError> {
    let session = state.session.read().await;
    let csv = session.vtable.table.to_csv();
    if let Some(path) = &state.table_path {
        std::fs::write(path, &csv).map_err(internal)?;
    }
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv).into_response())
}
