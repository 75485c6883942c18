//! Serves the bundled pack on an ephemeral port and walks one scripted
//! consultation through the HTTP API with a plain TCP client.
//!
//! ```text
//! cargo run -p inquiry-service --example http_session
//! ```

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};

use inquiry_core::pack::ScenarioPack;
use inquiry_core::retrieval::KnowledgeBase;
use inquiry_core::session::SessionManager;

fn request(addr: SocketAddr, method: &str, path: &str, body: Option<&Value>) -> (u16, Value) {
    let mut s = TcpStream::connect(addr).expect("server is up");
    let body = body.map(Value::to_string).unwrap_or_default();
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: localhost\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = String::new();
    s.read_to_string(&mut raw).unwrap();
    let status = raw[9..12].parse().unwrap();
    let payload = &raw[raw.find("\r\n\r\n").unwrap() + 4..];
    (status, serde_json::from_str(payload).unwrap_or(Value::Null))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let pack = ScenarioPack::load(&root.join("packs/pilot"))?;
    let script = pack.script("chest_01")?.to_vec();
    let kb = KnowledgeBase::load(&root.join("kb/pilot"))?;
    let manager = Arc::new(SessionManager::new(Arc::new(pack), Arc::new(kb))?);

    let rt = tokio::runtime::Runtime::new()?;
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let addr = listener.local_addr()?;
    rt.spawn(inquiry_service::serve_on(manager, listener));
    println!("serving on http://{addr}");

    let (status, created) = request(addr, "POST", "/sessions", Some(&json!({"v": 1, "scenario_id": "chest_01"})));
    println!("POST /sessions -> {status} {created}");
    let id = created["session_id"].as_str().unwrap().to_owned();

    for turn in script.iter().take(3) {
        let body = json!({"v": 1, "speaker": turn.speaker, "text": turn.text, "gold_events": turn.gold_events});
        let (status, t) = request(addr, "POST", &format!("/sessions/{id}/utterances"), Some(&body));
        let action = &t["proposed_action"];
        println!(
            "POST utterance -> {status}: turn {} {} {} (U = {:.3}), record +{}",
            t["turn_index"], action["verb"], action["target_slot"], action["utility"].as_f64().unwrap_or(0.0), t["emr_diff"]["added"]
        );
    }

    let (_, state) = request(addr, "GET", &format!("/sessions/{id}/state"), None);
    println!("GET state -> {} entries, hash {}", state["state"]["entries"].as_object().map_or(0, |m| m.len()), state["state_hash"]);
    let (_, trace) = request(addr, "GET", &format!("/sessions/{id}/trace"), None);
    println!("GET trace -> {} turns", trace["traces"].as_array().map_or(0, Vec::len));
    let (status, err) = request(addr, "GET", "/sessions/nope/emr", None);
    println!("GET unknown session -> {status} {}", err["error"]);
    Ok(())
}
