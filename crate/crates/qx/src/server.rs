//! JSON-over-HTTP binding of [`Workbench`].
//!
//! | method | path                | body                                   | response |
//! |--------|---------------------|----------------------------------------|----------|
//! | POST   | `/api/session`      |                                        | `{session_id}` |
//! | POST   | `/api/generate`     | `{session_id, example_document}`       | `{candidates:[{text,source}]}` |
//! | POST   | `/api/reformulate`  | `{session_id, query}`                  | `{query}` |
//! | POST   | `/api/retrieve`     | `{session_id, query}`                  | `{results:[{docno,rank,score,text,translated_text}]}` |
//! | POST   | `/api/feedback`     | `{session_id, query, docnos}`          | `{query}` |
//! | POST   | `/api/annotate`     | `{session_id, query, docno, grade}`    | `{}` |
//! | GET    | `/api/settings`     |                                        | settings |
//! | PUT    | `/api/settings`     | partial settings                       | settings |
//! | GET    | `/api/pipelines`    |                                        | `{pipelines:[str]}` |
//! | GET    | `/api/logs/{name}`  |                                        | records |
//!
//! Errors are `{error, detail}` with a matching status code.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::settings::SettingsPatch;
use crate::workbench::{ServiceError, Workbench};

type Shared = State<Arc<Workbench>>;

#[derive(Debug, Deserialize)]
pub struct GenerateBody {
    pub session_id: String,
    pub example_document: String,
}

#[derive(Debug, Deserialize)]
pub struct QueryBody {
    pub session_id: String,
    pub query: String,
}

#[derive(Debug, Deserialize)]
pub struct FeedbackBody {
    pub session_id: String,
    pub query: String,
    pub docnos: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct AnnotateBody {
    pub session_id: String,
    pub query: String,
    pub docno: String,
    pub grade: i64,
}

fn error_response(status: u16, error: &str, detail: String) -> Response {
    let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, Json(json!({ "error": error, "detail": detail }))).into_response()
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        error_response(self.status(), self.kind(), self.to_string())
    }
}

fn rejected(e: JsonRejection) -> Response {
    error_response(400, "bad_request", e.body_text())
}

/// Runs blocking work (file syncs, generator calls) off the async workers.
async fn blocking<T, F>(f: F) -> Response
where
    T: Serialize + Send + 'static,
    F: FnOnce() -> Result<T, ServiceError> + Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(Ok(body)) => Json(body).into_response(),
        Ok(Err(e)) => e.into_response(),
        Err(e) => ServiceError::Internal(e.to_string()).into_response(),
    }
}

macro_rules! body_or_400 {
    ($body:expr) => {
        match $body {
            Ok(Json(b)) => b,
            Err(e) => return rejected(e),
        }
    };
}

async fn new_session(State(wb): Shared) -> Response {
    blocking(move || wb.new_session().map(|s| json!({ "session_id": s.session_id }))).await
}

async fn generate(State(wb): Shared, body: Result<Json<GenerateBody>, JsonRejection>) -> Response {
    let b = body_or_400!(body);
    blocking(move || wb.generate(&b.session_id, &b.example_document).map(|c| json!({ "candidates": c }))).await
}

async fn reformulate(State(wb): Shared, body: Result<Json<QueryBody>, JsonRejection>) -> Response {
    let b = body_or_400!(body);
    blocking(move || wb.reformulate(&b.session_id, &b.query).map(|q| json!({ "query": q }))).await
}

async fn retrieve(State(wb): Shared, body: Result<Json<QueryBody>, JsonRejection>) -> Response {
    let b = body_or_400!(body);
    blocking(move || wb.retrieve(&b.session_id, &b.query).map(|r| json!({ "results": r }))).await
}

async fn feedback(State(wb): Shared, body: Result<Json<FeedbackBody>, JsonRejection>) -> Response {
    let b = body_or_400!(body);
    blocking(move || wb.feedback(&b.session_id, &b.query, b.docnos).map(|q| json!({ "query": q }))).await
}

async fn annotate(State(wb): Shared, body: Result<Json<AnnotateBody>, JsonRejection>) -> Response {
    let b = body_or_400!(body);
    blocking(move || wb.annotate(&b.session_id, &b.query, &b.docno, b.grade).map(|()| json!({}))).await
}

async fn get_settings(State(wb): Shared) -> Response {
    Json(wb.settings().as_ref().clone()).into_response()
}

async fn put_settings(State(wb): Shared, body: Result<Json<SettingsPatch>, JsonRejection>) -> Response {
    let patch = body_or_400!(body);
    blocking(move || wb.update_settings(patch).map(|s| s.as_ref().clone())).await
}

async fn pipelines(State(wb): Shared) -> Response {
    Json(json!({ "pipelines": wb.pipelines() })).into_response()
}

async fn logs(State(wb): Shared, Path(name): Path<String>) -> Response {
    blocking(move || wb.logs(&name)).await
}

pub fn router(workbench: Arc<Workbench>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/session", post(new_session))
        .route("/api/generate", post(generate))
        .route("/api/reformulate", post(reformulate))
        .route("/api/retrieve", post(retrieve))
        .route("/api/feedback", post(feedback))
        .route("/api/annotate", post(annotate))
        .route("/api/settings", get(get_settings).put(put_settings))
        .route("/api/pipelines", get(pipelines))
        .route("/api/logs/{name}", get(logs))
        .with_state(workbench);
    match static_dir {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(addr: SocketAddr, workbench: Arc<Workbench>, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(workbench, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
