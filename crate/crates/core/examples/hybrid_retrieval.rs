//! Retrieves for one bundled query point in both modes and shows how the
//! fused score decomposes, plus the reasoning paths found.
//!
//! ```text
//! cargo run -p inquiry-core --example hybrid_retrieval [query_id]
//! ```

use std::path::Path;

use inquiry_core::eval::query_state;
use inquiry_core::pack::ScenarioPack;
use inquiry_core::retrieval::{query_bag, retrieve, KnowledgeBase, QueryContext, RetrievalConfig};

fn main() -> inquiry_core::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let pack = ScenarioPack::load(&root.join("packs/pilot"))?;
    let kb = KnowledgeBase::load(&root.join("kb/pilot"))?;
    let wanted = std::env::args().nth(1);
    let q = match &wanted {
        Some(id) => pack.queries.iter().find(|q| &q.query_id == id).expect("unknown query id"),
        None => pack.queries.iter().find(|q| q.risk_critical && !q.gold_paths.is_empty()).expect("a risk-critical query"),
    };
    let goal = pack.goal_for(&q.scenario_id)?;
    let belief = pack.scenario(&q.scenario_id)?.prior()?;
    let cur = query_state(q);
    let ctx = QueryContext { cur: &cur, goal: &goal, belief: &belief, focus: &q.focus };

    println!("{} ({}), gold {:?}", q.query_id, q.kind, q.gold_objects);
    println!("query bag: {}", query_bag(&ctx).join(" "));

    let hybrid = RetrievalConfig::from_manifest(&kb.manifest);
    for cfg in [hybrid.clone().chunk_only(), hybrid] {
        let r = retrieve(ctx, &kb, &cfg);
        println!("\n{:?}", cfg.mode);
        println!("  {:<28} {:>7} {:>7} {:>7} {:>7}", "object", "vector", "object", "path", "fused");
        for o in r.ranked.iter().take(5) {
            let mark = if q.gold_objects.contains(&o.object_id) { "*" } else { " " };
            println!(
                "{mark} {:<28} {:>7.3} {:>7.3} {:>7.3} {:>7.3}",
                o.object_id, o.vector_score, o.object_score, o.path_score, o.fused_score
            );
        }
        for p in r.all_paths().iter().take(3) {
            println!("  path {} cost {:.2} score {:.2}", p.nodes_joined(), p.cost, p.score);
        }
    }
    Ok(())
}
