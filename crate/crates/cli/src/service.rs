//! HTTP+JSON front end over a [`SessionStore`].

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use manner_core::agents::BeliefSnapshot;
use manner_core::world::WorldConfig;
use serde::{Deserialize, Serialize};

use crate::session::{FeedbackResult, History, Mode, SessionError, SessionStore, StepView};

/// A preset name or an inline world definition.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ConfigSource {
    Preset(String),
    Inline(Box<WorldConfig>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreateRequest {
    #[serde(default = "default_strategy")]
    pub strategy: String,
    pub mode: Option<Mode>,
    pub config: Option<ConfigSource>,
    pub seed: Option<u64>,
}

fn default_strategy() -> String {
    "full".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Created {
    pub id: String,
    pub strategy: String,
    pub mode: Mode,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FeedbackRequest {
    pub utterance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

pub struct ApiError(SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            SessionError::UnknownSession(_) => StatusCode::NOT_FOUND,
            SessionError::AwaitingFeedback(_) | SessionError::NoPendingStep | SessionError::FeedbackAlreadyGiven(_) => {
                StatusCode::CONFLICT
            }
            SessionError::Config(_)
            | SessionError::Grammar(_)
            | SessionError::Agent(manner_core::agents::AgentError::UnknownStrategy(_)) => StatusCode::BAD_REQUEST,
            SessionError::Agent(_) | SessionError::Persist { .. } | SessionError::Corrupt { .. } => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        let body = ErrorBody {
            error: self.0.code().to_string(),
            message: self.0.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

type Store = Arc<SessionStore>;

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/feedback", post(feedback))
        .route("/sessions/{id}/beliefs", get(beliefs))
        .route("/sessions/{id}/history", get(history))
        .with_state(store)
}

async fn create(
    State(store): State<Store>,
    Json(req): Json<CreateRequest>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let config = match req.config {
        None => None,
        Some(ConfigSource::Preset(name)) => Some(WorldConfig::preset(&name).map_err(SessionError::from)?),
        Some(ConfigSource::Inline(cfg)) => Some(*cfg),
    };
    let handle = store.create(&req.strategy, req.mode, config, req.seed)?;
    let s = handle.lock().expect("session lock");
    Ok((
        StatusCode::CREATED,
        Json(Created {
            id: s.id().to_string(),
            strategy: s.strategy().to_string(),
            mode: s.mode(),
            seed: s.seed(),
        }),
    ))
}

async fn list(State(store): State<Store>) -> Json<Vec<String>> {
    Json(store.ids())
}

async fn step(State(store): State<Store>, Path(id): Path<String>) -> Result<Json<StepView>, ApiError> {
    let handle = store.get(&id)?;
    let mut s = handle.lock().expect("session lock");
    let view = s.step()?;
    store.save(&s)?;
    Ok(Json(view))
}

async fn feedback(
    State(store): State<Store>,
    Path(id): Path<String>,
    Json(req): Json<FeedbackRequest>,
) -> Result<Json<FeedbackResult>, ApiError> {
    let handle = store.get(&id)?;
    let mut s = handle.lock().expect("session lock");
    let result = s.feedback(&req.utterance)?;
    store.save(&s)?;
    Ok(Json(result))
}

async fn beliefs(State(store): State<Store>, Path(id): Path<String>) -> Result<Json<BeliefSnapshot>, ApiError> {
    let handle = store.get(&id)?;
    let s = handle.lock().expect("session lock");
    Ok(Json(s.beliefs()))
}

async fn history(State(store): State<Store>, Path(id): Path<String>) -> Result<Json<History>, ApiError> {
    let handle = store.get(&id)?;
    let s = handle.lock().expect("session lock");
    Ok(Json(s.history()))
}
