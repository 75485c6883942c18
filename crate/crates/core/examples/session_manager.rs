//! Drives a live session through the manager the HTTP service wraps: posts
//! patient replies one at a time and reads back state, record and trace.
//!
//! ```text
//! cargo run -p inquiry-core --example session_manager
//! ```

use std::path::Path;
use std::sync::Arc;

use inquiry_core::extraction::DialogueTurn;
use inquiry_core::model::Role;
use inquiry_core::pack::ScenarioPack;
use inquiry_core::planner::PolicyKind;
use inquiry_core::retrieval::KnowledgeBase;
use inquiry_core::session::SessionManager;

fn main() -> inquiry_core::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let pack = Arc::new(ScenarioPack::load(&root.join("packs/pilot"))?);
    let kb = Arc::new(KnowledgeBase::load(&root.join("kb/pilot"))?);
    let manager = SessionManager::new(pack, kb)?;

    let id = manager.create("acute_01", PolicyKind::FullFramework)?;
    println!("session {id}");
    // free text goes through the rule lexicon; no annotations are attached
    for text in ["I've had a bad cough and a fever for three days.", "I also get short of breath walking."] {
        let (trace, status) = manager.post(&id, DialogueTurn::new(0, Role::Patient, text))?;
        let next = trace.chosen_candidate().map_or("-".to_owned(), |c| c.prompt_text.clone());
        println!("t{} {:?}: {} events -> {next}", trace.turn_index, status, trace.events.len());
    }

    let view = manager.state(&id)?;
    println!("\nstate hash {}", view.state_hash);
    for e in view.state.entries.values() {
        println!("  {} = {} ({})", e.field_id, e.value, e.state);
    }
    println!("record slots: {}", manager.emr(&id)?.slots().count());
    println!("traces: {}", manager.trace(&id)?.len());
    Ok(())
}
