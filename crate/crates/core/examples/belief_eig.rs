//! Tracks a two-hypothesis belief through evidence and ranks two questions by
//! expected information gain.
//!
//! ```text
//! cargo run -p inquiry-core --example belief_eig
//! ```

use std::collections::BTreeMap;

use inquiry_core::belief::{entropy, expected_information_gain, update_belief, Belief, LikelihoodEntry, LikelihoodModel, Outcome, OutcomeModel};
use inquiry_core::model::{EvidenceSpan, Role, StateLabel, StateWeights, StatefulEvent, Temporality, TraceId};

fn outcome(id: &str, acs: f64, other: f64) -> Outcome {
    Outcome {
        outcome_id: id.into(),
        likelihoods: BTreeMap::from([("acs".into(), acs), ("other".into(), other)]),
    }
}

fn main() -> inquiry_core::Result<()> {
    let mut b = Belief::from_pairs(&[("acs", 0.5), ("other", 0.5)])?;
    let lm = LikelihoodModel {
        table: vec![
            LikelihoodEntry { hypothesis: "acs".into(), slot: "exertional_worsening".into(), value: "present".into(), state: None, likelihood: 0.8 },
            LikelihoodEntry { hypothesis: "other".into(), slot: "exertional_worsening".into(), value: "present".into(), state: None, likelihood: 0.3 },
        ],
        default_likelihood: 0.5,
    };
    let om = OutcomeModel {
        actions: BTreeMap::from([
            ("ask:pain_radiation".to_owned(), vec![outcome("yes", 0.7, 0.2), outcome("no", 0.3, 0.8)]),
            ("ask:nausea".to_owned(), vec![outcome("yes", 0.4, 0.3), outcome("no", 0.6, 0.7)]),
        ]),
    };

    println!("prior        H = {:.4}", entropy(&b));
    for key in om.actions.keys() {
        println!("  EIG {key:<20} {:.4}", expected_information_gain(&b, key, &om)?);
    }

    for state in [StateLabel::Unconfirmed, StateLabel::ObservedResult] {
        let ev = StatefulEvent {
            field_id: "exertional_worsening".into(),
            value: "present".into(),
            state,
            temporality: Temporality::Present,
            role: Role::Patient,
            evidence: EvidenceSpan { turn_index: 0, char_start: 0, char_end: 5, speaker: Role::Patient },
            confidence: 1.0,
            trace_id: TraceId::for_event(0, 0),
        };
        // the likelihood is tempered by the state weight, so hedged reports move the belief less
        let post = update_belief(&b, &[ev], &lm, &StateWeights::default())?;
        println!("{:<15} p(acs) = {:.4}  H = {:.4}", state.as_str(), post.prob("acs"), entropy(&post));
        if state == StateLabel::ObservedResult {
            b = post;
        }
    }
    for key in om.actions.keys() {
        println!("  EIG {key:<20} {:.4}", expected_information_gain(&b, key, &om)?);
    }
    Ok(())
}
