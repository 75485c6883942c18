//! Steps a full-framework session through the chest-discomfort script one
//! turn at a time and prints the scored candidates behind each choice.
//!
//! ```text
//! cargo run -p inquiry-core --example plan_turns
//! ```

use std::path::Path;
use std::sync::Arc;

use inquiry_core::pack::ScenarioPack;
use inquiry_core::planner::{PolicyKind, Session};
use inquiry_core::retrieval::KnowledgeBase;

fn main() -> inquiry_core::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let pack = ScenarioPack::load(&root.join("packs/pilot"))?;
    let kb = Arc::new(KnowledgeBase::load(&root.join("kb/pilot"))?);
    let mut session = Session::new(Arc::new(pack.case("chest_01")?), kb, PolicyKind::FullFramework)?;

    for turn in pack.script("chest_01")?.iter().take(3) {
        let trace = session.run_turn(turn.clone())?;
        println!("t{} \"{}\"", trace.turn_index, trace.input.text);
        println!("   entropy {:.3}, {} gaps", trace.entropy, trace.gaps.len());
        let mut cands = trace.candidates.clone();
        cands.sort_by(|a, b| b.utility.total_cmp(&a.utility).then_with(|| a.action_id.cmp(&b.action_id)));
        for c in cands.iter().take(4) {
            let u = &c.utility_components;
            let chosen = if Some(&c.action_id) == trace.chosen.as_ref() { ">" } else { " " };
            println!(
                " {chosen} {} {:<15} {:<22} U={:.3} (IG {:.2} RR {:.2} PS {:.2} EG {:.2} RP {:.2} CL {:.2} CB {:.2})",
                c.action_id,
                c.verb.as_str(),
                c.target_slot.as_ref().map_or("-", |s| s.as_str()),
                c.utility,
                u.ig, u.rr, u.ps, u.eg, u.rp, u.cl, u.cb
            );
        }
        if let Some(c) = trace.chosen_candidate() {
            println!("   prompt: {}", c.prompt_text);
        }
        println!();
    }
    Ok(())
}
