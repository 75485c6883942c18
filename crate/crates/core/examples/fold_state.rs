//! Folds a short exchange into the running state and lists the gaps left
//! against the chest-discomfort goal after every turn.
//!
//! ```text
//! cargo run -p inquiry-core --example fold_state
//! ```

use inquiry_core::belief::Belief;
use inquiry_core::model::{CurrentState, EvidenceSpan, Role, StateLabel, StateWeights, StatefulEvent, Temporality, TraceId};
use inquiry_core::pack::ScenarioPack;
use inquiry_core::state::{apply_events, derive_gaps, goal_met, GapConfig};

fn event(turn: u32, ordinal: usize, slot: &str, value: &str, state: StateLabel) -> StatefulEvent {
    StatefulEvent {
        field_id: slot.into(),
        value: value.into(),
        state,
        temporality: Temporality::Present,
        role: Role::Patient,
        evidence: EvidenceSpan {
            turn_index: turn,
            char_start: 0,
            char_end: 10,
            speaker: Role::Patient,
        },
        confidence: 1.0,
        trace_id: TraceId::for_event(turn, ordinal),
    }
}

fn main() -> inquiry_core::Result<()> {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let pack = ScenarioPack::load(&root.join("packs/pilot"))?;
    let goal = pack.goal_for("chest_01")?;
    let cfg = GapConfig::default();
    let belief = Belief::uniform(&["acs", "other"]);

    let turns = [
        vec![event(0, 0, "chest_pain", "present", StateLabel::ObservedResult)],
        vec![
            event(1, 0, "exertional_worsening", "present", StateLabel::ObservedResult),
            event(1, 1, "prior_mi", "present", StateLabel::Unconfirmed),
        ],
        // an exclusion resolves a slot without affirming it
        vec![event(2, 0, "diaphoresis", "present", StateLabel::Negated)],
        vec![event(3, 0, "prior_mi", "present", StateLabel::Confirmed)],
    ];

    let mut cur = CurrentState::new();
    for (t, events) in turns.iter().enumerate() {
        cur = apply_events(&cur, events, t as u32, &StateWeights::default());
        let gaps = derive_gaps(&cur, &goal, &belief, &[], &cfg);
        println!("after turn {t}: {} entries, {} gaps, goal met: {}", cur.entries.len(), gaps.len(), goal_met(&cur, &goal, cfg.w_min));
        for g in gaps.iter().filter(|g| g.kind != inquiry_core::model::GapKind::Information) {
            println!("  {:?} {}", g.kind, g.rationale_trace);
        }
    }
    let mi = cur.entry("prior_mi").expect("folded");
    println!("\nprior_mi settled as {} (weight {}) from {:?}", mi.state, mi.weight, mi.supporting_trace_ids);
    Ok(())
}
