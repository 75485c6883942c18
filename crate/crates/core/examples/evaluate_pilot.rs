//! Runs the four policies over the bundled pilot pack and prints the
//! dialogue and retrieval tables.
//!
//! ```text
//! cargo run -p inquiry-core --example evaluate_pilot
//! ```

use std::path::Path;
use std::sync::Arc;

use inquiry_core::eval::{pilot_table, run_pilot};
use inquiry_core::pack::ScenarioPack;
use inquiry_core::planner::PolicyKind;
use inquiry_core::retrieval::KnowledgeBase;

fn main() -> inquiry_core::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let pack = ScenarioPack::load(&root.join("packs/pilot"))?;
    let kb = Arc::new(KnowledgeBase::load(&root.join("kb/pilot"))?);
    let report = run_pilot(&pack, &kb, &PolicyKind::ALL, 5, 5)?;
    println!("{}", pilot_table(&report));
    for v in report.threshold_violations(&pack.manifest.thresholds) {
        println!("threshold: {v}");
    }
    Ok(())
}
