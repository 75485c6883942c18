//! Extracts stateful events from one scripted turn, first from its gold
//! annotations and then from the pack's rule lexicon alone.
//!
//! ```text
//! cargo run -p inquiry-core --example extract_turn
//! ```

use std::path::Path;

use inquiry_core::extraction::{extract_events, validate_events, ExtractionConfig, ExtractionMode};
use inquiry_core::pack::ScenarioPack;

fn main() -> inquiry_core::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let pack = ScenarioPack::load(&root.join("packs/pilot"))?;
    let turn = &pack.script("chest_01")?[1];
    let cfg = ExtractionConfig::default();
    println!("turn {}: {}\n", turn.turn_index, turn.text);

    for mode in [ExtractionMode::Gold, ExtractionMode::Rule] {
        let mut bare = turn.clone();
        if mode == ExtractionMode::Rule {
            bare.gold_events = None;
        }
        let v = validate_events(extract_events(&bare, mode, &pack.rules, &cfg)?, &bare);
        println!("{mode:?} mode:");
        for e in &v.events {
            let span: String = turn.text.chars().skip(e.evidence.char_start).take(e.evidence.char_end - e.evidence.char_start).collect();
            println!("  {} {}={} [{}] conf {:.1}  \"{span}\"", e.trace_id, e.field_id, e.value, e.state, e.confidence);
        }
        for d in &v.diagnostics {
            println!("  dropped {}: {}", d.trace_id, d.reason);
        }
    }
    Ok(())
}
