use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use manner_core::world::WorldConfig;
use manner_itl::service::router;
use manner_itl::session::{Mode, SessionStore};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    router(Arc::new(SessionStore::new(
        WorldConfig::fully_expressed(),
        Mode::Simulated,
    )))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn create(app: &Router, body: Value) -> String {
    let (status, v) = call(app, Method::POST, "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn human_protocol_walk_through() {
    let app = app();
    let id = create(&app, json!({"strategy": "full", "mode": "human", "seed": 4})).await;

    let (status, step) = call(&app, Method::POST, &format!("/sessions/{id}/step"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(step.get("simulatedFeedback").is_none());
    assert!(step["situation"]["shape"].is_string());
    assert!(step["situation"]["rgb"].is_object());
    let curve = &step["curve"];
    assert_eq!(
        curve["dots"].as_array().unwrap().len() as u64,
        curve["dotCount"].as_u64().unwrap()
    );
    assert_eq!(curve["controlPoint"][0].as_f64(), Some(0.5));

    let (status, fb) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/feedback"),
        Some(json!({"utterance": "yes"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{fb}");
    assert_eq!(fb["evidenceApplied"]["assent"], json!(true));

    let (status, again) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/feedback"),
        Some(json!({"utterance": "yes"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(again["error"], "FeedbackAlreadyGiven");

    call(&app, Method::POST, &format!("/sessions/{id}/step"), None).await;
    let (status, fb) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/feedback"),
        Some(json!({"utterance": "no, when you see red squares do it gently"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{fb}");
    assert_eq!(
        fb["evidenceApplied"]["confirmedRules"],
        json!(["red & square -> gently"])
    );

    let (status, beliefs) = call(&app, Method::GET, &format!("/sessions/{id}/beliefs"), None).await;
    assert_eq!(status, StatusCode::OK);
    let rules = beliefs["rules"].as_array().unwrap();
    assert!(rules.iter().any(|r| r["confirmed"] == json!(true)));
    assert!(beliefs["colours"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "red"));
    assert!(beliefs["adverbs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|a| a["name"] == "gently"));
    assert!(!beliefs["net"]["nodes"].as_array().unwrap().is_empty());
    assert!(!beliefs["net"]["edges"].as_array().unwrap().is_empty());

    let (status, history) = call(&app, Method::GET, &format!("/sessions/{id}/history"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(history["steps"].as_array().unwrap().len(), 2);
    assert_eq!(history["cumulativeRegret"], json!(1));
}

#[tokio::test]
async fn dimension_conflict_is_a_bad_request() {
    let app = app();
    let id = create(&app, json!({"mode": "human"})).await;
    call(&app, Method::POST, &format!("/sessions/{id}/step"), None).await;
    let (status, err) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/feedback"),
        Some(json!({"utterance": "no, do it slowly and quickly"})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"], "DimensionConflict");
    let (_, err) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/feedback"),
        Some(json!({"utterance": "perhaps"})),
    )
    .await;
    assert_eq!(err["error"], "MalformedUtterance");
    assert!(err["message"].as_str().unwrap().contains("perhaps"));
}

#[tokio::test]
async fn unknown_session_is_not_found() {
    let app = app();
    for (method, path) in [
        (Method::POST, "/sessions/nope/step"),
        (Method::GET, "/sessions/nope/beliefs"),
        (Method::GET, "/sessions/nope/history"),
    ] {
        let (status, err) = call(&app, method, path, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(err["error"], "UnknownSession");
    }
}

#[tokio::test]
async fn simulated_step_reports_and_applies_feedback() {
    let app = app();
    let id = create(&app, json!({"strategy": "full", "config": "partial", "seed": 1})).await;
    for i in 0..5 {
        let (status, step) = call(&app, Method::POST, &format!("/sessions/{id}/step"), None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(step["step"], json!(i));
        assert!(step["simulatedFeedback"].is_string());
    }
    let (status, err) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/feedback"),
        Some(json!({"utterance": "yes"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"], "FeedbackAlreadyGiven");
    let (_, history) = call(&app, Method::GET, &format!("/sessions/{id}/history"), None).await;
    assert_eq!(history["steps"].as_array().unwrap().len(), 5);
}

#[tokio::test]
async fn stepping_twice_without_feedback_conflicts() {
    let app = app();
    let id = create(&app, json!({"mode": "human"})).await;
    let (status, err) = call(
        &app,
        Method::POST,
        &format!("/sessions/{id}/feedback"),
        Some(json!({"utterance": "yes"})),
    )
    .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"], "NoPendingStep");
    call(&app, Method::POST, &format!("/sessions/{id}/step"), None).await;
    let (status, err) = call(&app, Method::POST, &format!("/sessions/{id}/step"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"], "AwaitingFeedback");
}

#[tokio::test]
async fn bad_create_requests() {
    let app = app();
    let (status, err) = call(&app, Method::POST, "/sessions", Some(json!({"strategy": "oracle"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"], "UnknownStrategy");
    let (status, err) = call(&app, Method::POST, "/sessions", Some(json!({"config": "tilted"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"], "UnknownPreset");
    let mut cfg = serde_json::to_value(WorldConfig::fully_expressed()).unwrap();
    cfg["constrainedFraction"] = json!(1.5);
    let (status, err) = call(&app, Method::POST, "/sessions", Some(json!({"config": cfg}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"], "InvalidConfig");
}

#[tokio::test]
async fn inline_config_and_listing() {
    let app = app();
    let cfg = serde_json::to_value(WorldConfig::partial()).unwrap();
    let id = create(&app, json!({"strategy": "just-no", "config": cfg})).await;
    let (_, ids) = call(&app, Method::GET, "/sessions", None).await;
    assert_eq!(ids, json!([id]));
    let (_, beliefs) = call(&app, Method::GET, &format!("/sessions/{id}/beliefs"), None).await;
    assert_eq!(beliefs["strategy"], "just-no");
}

#[tokio::test]
async fn persisted_sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let store = || {
        SessionStore::new(WorldConfig::fully_expressed(), Mode::Human)
            .with_persistence(dir.path())
            .unwrap()
    };
    let first = router(Arc::new(store()));
    let id = create(&first, json!({"seed": 8})).await;
    call(&first, Method::POST, &format!("/sessions/{id}/step"), None).await;
    call(
        &first,
        Method::POST,
        &format!("/sessions/{id}/feedback"),
        Some(json!({"utterance": "no, do it firmly"})),
    )
    .await;
    let (_, before) = call(&first, Method::GET, &format!("/sessions/{id}/beliefs"), None).await;
    assert!(dir.path().join(format!("{id}.json")).is_file());

    let second = router(Arc::new(store()));
    let (_, after) = call(&second, Method::GET, &format!("/sessions/{id}/beliefs"), None).await;
    assert_eq!(before, after);
    let (status, _) = call(&second, Method::POST, &format!("/sessions/{id}/step"), None).await;
    assert_eq!(status, StatusCode::OK);
}
