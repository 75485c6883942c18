use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use inquiry_core::pack::ScenarioPack;
use inquiry_core::planner::{run_policy, PolicyKind};
use inquiry_core::retrieval::KnowledgeBase;
use inquiry_core::session::{BusyPolicy, SessionManager};
use inquiry_service::router;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn assets() -> (Arc<ScenarioPack>, Arc<KnowledgeBase>) {
    let pack = ScenarioPack::load(&root().join("packs/pilot")).expect("bundled pack");
    let kb = KnowledgeBase::load(&root().join("kb/pilot")).expect("bundled kb");
    (Arc::new(pack), Arc::new(kb))
}

fn manager() -> Arc<SessionManager> {
    let (pack, kb) = assets();
    Arc::new(SessionManager::new(pack, kb).unwrap())
}

async fn call(app: &axum::Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, v)
}

async fn create(app: &axum::Router, scenario: &str, policy: &str) -> String {
    let (s, v) = call(app, Method::POST, "/sessions", Some(json!({"v": 1, "scenario_id": scenario, "policy": policy}))).await;
    assert_eq!(s, StatusCode::CREATED, "{v}");
    v["session_id"].as_str().unwrap().to_owned()
}

fn utterance(turn: &inquiry_core::extraction::DialogueTurn) -> Value {
    json!({"v": 1, "speaker": turn.speaker, "text": turn.text, "gold_events": turn.gold_events})
}

#[tokio::test]
async fn scenarios_lists_the_pack() {
    let app = router(manager());
    let (s, v) = call(&app, Method::GET, "/scenarios", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["v"], 1);
    assert_eq!(v["scenarios"].as_array().unwrap().len(), 10);
}

#[tokio::test]
async fn creation_yields_distinct_ids() {
    let app = router(manager());
    let a = create(&app, "chest_01", "full_framework").await;
    let b = create(&app, "chest_01", "full_framework").await;
    assert_ne!(a, b);
}

#[tokio::test]
async fn policy_defaults_to_full_framework() {
    let app = router(manager());
    let (s, v) = call(&app, Method::POST, "/sessions", Some(json!({"v": 1, "scenario_id": "abd_01"}))).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["policy"], "full_framework");
}

#[tokio::test]
async fn errors_use_the_envelope() {
    let app = router(manager());

    let (s, v) = call(&app, Method::POST, "/sessions", Some(json!({"v": 1, "scenario_id": "nope"}))).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "unknown_scenario");
    assert_eq!(v["v"], 1);

    let (s, v) = call(&app, Method::POST, "/sessions", Some(json!({"v": 1, "scenario_id": "chest_01", "policy": "oracle"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "unknown_policy");

    let (s, v) = call(&app, Method::POST, "/sessions", Some(json!({"v": 2, "scenario_id": "chest_01"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "unsupported_version");

    let (s, v) = call(&app, Method::POST, "/sessions", Some(json!({"scenario_id": "chest_01"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "invalid_body");

    for path in ["state", "emr", "trace"] {
        let (s, v) = call(&app, Method::GET, &format!("/sessions/s9999/{path}"), None).await;
        assert_eq!(s, StatusCode::NOT_FOUND);
        assert_eq!(v["error"]["code"], "unknown_session");
    }
    let (s, v) = call(&app, Method::POST, "/sessions/s9999/utterances", Some(json!({"v": 1, "speaker": "patient", "text": "hi"}))).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"]["code"], "unknown_session");
}

#[tokio::test]
async fn utterance_validation() {
    let app = router(manager());
    let id = create(&app, "chest_01", "full_framework").await;
    let uri = format!("/sessions/{id}/utterances");

    let (s, v) = call(&app, Method::POST, &uri, Some(json!({"v": 1, "speaker": "patient", "text": "   "}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "empty_text");

    let (s, v) = call(&app, Method::POST, &uri, Some(json!({"v": 1, "speaker": "system", "text": "hello"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"]["code"], "invalid_speaker");

    // rejected posts do not consume a turn
    let (_, v) = call(&app, Method::GET, &format!("/sessions/{id}/trace"), None).await;
    assert!(v["traces"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn fresh_session_snapshots() {
    let app = router(manager());
    let id = create(&app, "acute_01", "full_framework").await;

    let (s, v) = call(&app, Method::GET, &format!("/sessions/{id}/emr"), None).await;
    assert_eq!(s, StatusCode::OK);
    let sections = v["record"]["sections"].as_array().unwrap();
    assert!(sections.iter().all(|sec| sec["slots"].as_array().unwrap().is_empty()));

    let (_, v) = call(&app, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(v["status"], "active");
    assert_eq!(v["turns"], 0);
}

#[tokio::test]
async fn first_turn_and_snapshot_consistency() {
    let (pack, kb) = assets();
    let app = router(Arc::new(SessionManager::new(Arc::clone(&pack), kb).unwrap()));
    let id = create(&app, "chest_01", "full_framework").await;
    let script = pack.script("chest_01").unwrap();

    let (s, turn) = call(&app, Method::POST, &format!("/sessions/{id}/utterances"), Some(utterance(&script[0]))).await;
    assert_eq!(s, StatusCode::OK, "{turn}");
    assert_eq!(turn["turn_index"], 0);
    assert!(!turn["events"].as_array().unwrap().is_empty());
    assert!(turn["proposed_action"]["utility_components"].is_object());
    assert!(!turn["emr_diff"]["added"].as_array().unwrap().is_empty());

    let (_, t) = call(&app, Method::GET, &format!("/sessions/{id}/trace"), None).await;
    assert_eq!(t["traces"].as_array().unwrap().len(), 1);

    let (_, st) = call(&app, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(st["state_hash"], turn["state_hash"]);
    assert_eq!(st["turns"], 1);
}

#[tokio::test]
async fn api_replay_matches_batch_replay() {
    let (pack, kb) = assets();
    let app = router(Arc::new(SessionManager::new(Arc::clone(&pack), Arc::clone(&kb)).unwrap()));

    for scenario in ["chest_01", "abd_02", "acute_03"] {
        let case = Arc::new(pack.case(scenario).unwrap());
        let batch = run_policy(case, Arc::clone(&kb), pack.script(scenario).unwrap(), PolicyKind::FullFramework).unwrap();

        let id = create(&app, scenario, "full_framework").await;
        for (i, t) in batch.traces.iter().enumerate() {
            let (s, v) = call(&app, Method::POST, &format!("/sessions/{id}/utterances"), Some(utterance(&t.input))).await;
            assert_eq!(s, StatusCode::OK, "{scenario} turn {i}: {v}");
            assert_eq!(v["trace_hash"], t.trace_hash.as_str(), "{scenario} turn {i}");
            assert_eq!(
                v["proposed_action"]["action_id"].as_str(),
                t.chosen.as_ref().map(|a| a.as_str()),
                "{scenario} turn {i}"
            );
        }
    }
}

#[tokio::test]
async fn posting_after_the_goal_is_a_conflict() {
    let (pack, kb) = assets();
    let app = router(Arc::new(SessionManager::new(Arc::clone(&pack), Arc::clone(&kb)).unwrap()));
    let case = Arc::new(pack.case("acute_02").unwrap());
    let batch = run_policy(case, Arc::clone(&kb), pack.script("acute_02").unwrap(), PolicyKind::FullFramework).unwrap();
    assert!(batch.t_goal.is_some());

    let id = create(&app, "acute_02", "full_framework").await;
    for t in &batch.traces {
        call(&app, Method::POST, &format!("/sessions/{id}/utterances"), Some(utterance(&t.input))).await;
    }
    let (_, st) = call(&app, Method::GET, &format!("/sessions/{id}/state"), None).await;
    assert_eq!(st["status"], "goal_reached");

    let (s, v) = call(&app, Method::POST, &format!("/sessions/{id}/utterances"), Some(json!({"v": 1, "speaker": "patient", "text": "One more thing."}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["error"]["code"], "session_ended");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_posts_serialize() {
    let app = router(manager());
    let id = create(&app, "chest_02", "full_framework").await;
    let uri = format!("/sessions/{id}/utterances");

    let mut handles = Vec::new();
    for i in 0..8 {
        let app = app.clone();
        let uri = uri.clone();
        handles.push(tokio::spawn(async move {
            let body = json!({"v": 1, "speaker": "patient", "text": format!("Message number {i}.")});
            call(&app, Method::POST, &uri, Some(body)).await
        }));
    }
    let mut indices = Vec::new();
    for h in handles {
        let (s, v) = h.await.unwrap();
        assert_eq!(s, StatusCode::OK, "{v}");
        indices.push(v["turn_index"].as_u64().unwrap());
    }
    indices.sort_unstable();
    assert_eq!(indices, (0..8).collect::<Vec<_>>());

    let (_, t) = call(&app, Method::GET, &format!("/sessions/{id}/trace"), None).await;
    let turns: Vec<u64> = t["traces"].as_array().unwrap().iter().map(|x| x["turn_index"].as_u64().unwrap()).collect();
    assert_eq!(turns, (0..8).collect::<Vec<_>>());
}

#[tokio::test]
async fn reject_policy_still_serves_sequential_posts() {
    let (pack, kb) = assets();
    let m = SessionManager::new(pack, kb).unwrap().with_busy_policy(BusyPolicy::Reject);
    let app = router(Arc::new(m));
    let id = create(&app, "abd_03", "chunk_rag").await;
    for _ in 0..3 {
        let (s, _) = call(&app, Method::POST, &format!("/sessions/{id}/utterances"), Some(json!({"v": 1, "speaker": "patient", "text": "It hurts."}))).await;
        assert_eq!(s, StatusCode::OK);
    }
}

#[tokio::test]
async fn traces_persist_one_line_per_turn() {
    let dir = tempfile::tempdir().unwrap();
    let (pack, kb) = assets();
    let m = SessionManager::new(Arc::clone(&pack), kb).unwrap().with_persistence(dir.path().to_path_buf());
    let app = router(Arc::new(m));
    let id = create(&app, "chest_01", "full_framework").await;
    for t in &pack.script("chest_01").unwrap()[..3] {
        call(&app, Method::POST, &format!("/sessions/{id}/utterances"), Some(utterance(t))).await;
    }
    let log = std::fs::read_to_string(dir.path().join(format!("{id}.jsonl"))).unwrap();
    let lines: Vec<Value> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2]["turn_index"], 2);
}
