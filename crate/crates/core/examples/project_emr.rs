//! Replays a script under the full framework and prints the projected record
//! with the evidence span behind every slot.
//!
//! ```text
//! cargo run -p inquiry-core --example project_emr [scenario_id]
//! ```

use std::path::Path;
use std::sync::Arc;

use inquiry_core::pack::ScenarioPack;
use inquiry_core::planner::{run_policy, PolicyKind};
use inquiry_core::retrieval::KnowledgeBase;

fn main() -> inquiry_core::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let pack = ScenarioPack::load(&root.join("packs/pilot"))?;
    let kb = Arc::new(KnowledgeBase::load(&root.join("kb/pilot"))?);
    let id = std::env::args().nth(1).unwrap_or_else(|| "abd_01".to_owned());
    let result = run_policy(Arc::new(pack.case(&id)?), kb, pack.script(&id)?, PolicyKind::FullFramework)?;

    let texts: Vec<&str> = result.traces.iter().map(|t| t.input.text.as_str()).collect();
    for section in &result.record.sections {
        if section.slots.is_empty() {
            continue;
        }
        println!("{}", section.section);
        for s in &section.slots {
            let flag = if s.risk_flag { " !" } else { "" };
            println!("  {:<24} {:<20} {:?}/{}{flag}", s.slot_id, s.normalized_value, s.assertion, s.status);
            if let Some(span) = s.evidence.last() {
                let quote: String = texts[span.turn_index as usize]
                    .chars()
                    .skip(span.char_start)
                    .take(span.char_end - span.char_start)
                    .collect();
                println!("      t{} \"{quote}\"", span.turn_index);
            }
        }
    }
    for r in &result.record.risk_summary {
        println!("open risk {}: {:?}", r.rule_id, r.open_slots);
    }
    println!("goal met after {:?} turns", result.t_goal);
    Ok(())
}
