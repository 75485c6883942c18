//! HTTP front end for live inquiry sessions.
//!
//! ```text
//! GET  /scenarios
//! POST /sessions                      {v, scenario_id, policy?}
//! POST /sessions/{id}/utterances      {v, speaker, text, gold_events?}
//! GET  /sessions/{id}/state
//! GET  /sessions/{id}/emr
//! GET  /sessions/{id}/trace
//! ```
//!
//! Failures come back as `{v, error: {code, message}}` with a matching status.

pub mod wire;

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use tokio::net::TcpListener;

use inquiry_core::extraction::DialogueTurn;
use inquiry_core::model::Role;
use inquiry_core::planner::PolicyKind;
use inquiry_core::session::SessionManager;
use inquiry_core::Error;

use wire::*;

/// A failed request: status plus the machine-readable code.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code: code.to_owned(),
            message: message.into(),
        }
    }
}

fn status_for(e: &Error) -> StatusCode {
    match e {
        Error::UnknownSession(_) | Error::UnknownScenario(_) => StatusCode::NOT_FOUND,
        Error::SessionEnded(_) | Error::SessionBusy(_) => StatusCode::CONFLICT,
        Error::UnknownPolicy(_) | Error::UnknownStateLabel(_) | Error::MissingGold { .. } => StatusCode::BAD_REQUEST,
        // a failed turn answers with the status of its cause
        Error::Turn { source, .. } => status_for(source),
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        Self {
            status: status_for(&e),
            code: e.code().to_owned(),
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorEnvelope {
            v: VERSION,
            error: ErrorBody {
                code: self.code,
                message: self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn parse<T: DeserializeOwned>(body: &Bytes, version: impl Fn(&T) -> u32) -> Result<T, ApiError> {
    let req: T = serde_json::from_slice(body).map_err(|e| ApiError::bad_request("invalid_body", e.to_string()))?;
    let v = version(&req);
    if v != VERSION {
        return Err(ApiError::bad_request(
            "unsupported_version",
            format!("body version {v} is not supported (expected {VERSION})"),
        ));
    }
    Ok(req)
}

pub fn router(manager: Arc<SessionManager>) -> Router {
    Router::new()
        .route("/scenarios", get(scenarios))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/utterances", post(post_utterance))
        .route("/sessions/{id}/state", get(state))
        .route("/sessions/{id}/emr", get(emr))
        .route("/sessions/{id}/trace", get(trace))
        .with_state(manager)
}

/// Bind and serve until the process is stopped.
pub async fn serve(manager: Arc<SessionManager>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    serve_on(manager, listener).await
}

pub async fn serve_on(manager: Arc<SessionManager>, listener: TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(manager)).await
}

async fn scenarios(State(m): State<Arc<SessionManager>>) -> Json<Scenarios> {
    Json(Scenarios {
        v: VERSION,
        scenarios: m.scenarios(),
    })
}

async fn create_session(State(m): State<Arc<SessionManager>>, body: Bytes) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let req: CreateSession = parse(&body, |r: &CreateSession| r.v)?;
    let policy: PolicyKind = req.policy.parse()?;
    let session_id = m.create(&req.scenario_id, policy)?;
    Ok((
        StatusCode::CREATED,
        Json(SessionCreated {
            v: VERSION,
            session_id,
            scenario_id: req.scenario_id,
            policy,
        }),
    ))
}

async fn post_utterance(State(m): State<Arc<SessionManager>>, Path(id): Path<String>, body: Bytes) -> ApiResult<TurnSummary> {
    let req: PostUtterance = parse(&body, |r: &PostUtterance| r.v)?;
    if req.text.trim().is_empty() {
        return Err(ApiError::bad_request("empty_text", "utterance text is empty"));
    }
    if req.speaker == Role::System {
        return Err(ApiError::bad_request("invalid_speaker", "the system role cannot contribute evidence"));
    }
    let mut turn = DialogueTurn::new(0, req.speaker, req.text);
    turn.gold_events = req.gold_events;

    let worker = Arc::clone(&m);
    let sid = id.clone();
    let (trace, status) = tokio::task::spawn_blocking(move || worker.post(&sid, turn))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "turn_panicked".to_owned(),
            message: e.to_string(),
        })??;
    Ok(Json(TurnSummary::new(&id, status, trace)))
}

async fn state(State(m): State<Arc<SessionManager>>, Path(id): Path<String>) -> ApiResult<StateBody> {
    Ok(Json(StateBody {
        v: VERSION,
        view: m.state(&id)?,
    }))
}

async fn emr(State(m): State<Arc<SessionManager>>, Path(id): Path<String>) -> ApiResult<EmrBody> {
    Ok(Json(EmrBody {
        v: VERSION,
        record: m.emr(&id)?,
        session_id: id,
    }))
}

async fn trace(State(m): State<Arc<SessionManager>>, Path(id): Path<String>) -> ApiResult<TraceBody> {
    Ok(Json(TraceBody {
        v: VERSION,
        traces: m.trace(&id)?,
        session_id: id,
    }))
}
