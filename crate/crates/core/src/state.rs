//! State folding and typed gap derivation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::model::{
    Contradiction, CurrentState, GapKind, GapSignal, GoalState, SlotId, StateEntry,
    StateWeights, StatefulEvent,
};
use crate::retrieval::ReasoningPath;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GapConfig {
    /// Weight at which a slot counts as satisfied.
    pub w_min: f64,
    /// Top-two probability margin under which a differential gap opens.
    pub delta: f64,
    pub information_severity: f64,
    pub evidence_severity: f64,
    /// Added to information/evidence severity for risk-flagged slots.
    pub risk_flag_bonus: f64,
    pub path_blocking_severity: f64,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self {
            w_min: 0.7,
            delta: 0.15,
            information_severity: 1.0,
            evidence_severity: 1.0,
            risk_flag_bonus: 0.5,
            path_blocking_severity: 0.5,
        }
    }
}

/// A slot is resolved once it carries enough weight, or once it has been
/// explicitly excluded (negated / not done).
pub fn slot_resolved(cur: &CurrentState, slot: &str, w_min: f64) -> bool {
    cur.entry(slot)
        .is_some_and(|e| e.weight >= w_min || e.state.is_exclusion())
}

/// Fold a turn's events into the previous state.
///
/// Same-slot precedence: the higher state weight wins; at equal weight the
/// later turn wins. An exclusion meeting a weight-1.0 affirmative entry (or
/// the reverse) is logged as a contradiction, and the exclusion never
/// overwrites the affirmative entry. Events whose trace id is already known
/// are skipped, which makes the fold idempotent.
pub fn apply_events(
    prev: &CurrentState,
    events: &[StatefulEvent],
    turn_index: u32,
    weights: &StateWeights,
) -> CurrentState {
    let mut cur = prev.clone();
    cur.turn_index = Some(turn_index);
    cur.last_touched.clear();

    for ev in events {
        if cur.provenance.contains_key(&ev.trace_id) {
            continue;
        }
        cur.provenance.insert(ev.trace_id.clone(), ev.evidence);
        cur.last_touched.insert(ev.field_id.clone());
        let weight = weights.weight(ev.state);
        let turn = ev.evidence.turn_index;

        let Some(entry) = cur.entries.get_mut(&ev.field_id) else {
            cur.entries.insert(
                ev.field_id.clone(),
                StateEntry {
                    field_id: ev.field_id.clone(),
                    value: ev.value.clone(),
                    state: ev.state,
                    weight,
                    temporality: ev.temporality,
                    supporting_trace_ids: vec![ev.trace_id.clone()],
                    last_update_turn: turn,
                },
            );
            continue;
        };

        let conflict = (ev.state.is_exclusion() && !entry.state.is_exclusion() && entry.weight >= 1.0)
            || (entry.state.is_exclusion() && !ev.state.is_exclusion() && weight >= 1.0);
        if conflict {
            let mut ids = entry.supporting_trace_ids.clone();
            ids.push(ev.trace_id.clone());
            cur.contradictions.push(Contradiction {
                slot: ev.field_id.clone(),
                trace_ids: ids,
            });
            if ev.state.is_exclusion() {
                continue;
            }
        }

        let wins = weight > entry.weight || (weight == entry.weight && turn >= entry.last_update_turn);
        entry.supporting_trace_ids.push(ev.trace_id.clone());
        if wins {
            entry.value = ev.value.clone();
            entry.state = ev.state;
            entry.weight = weight;
            entry.temporality = ev.temporality;
            entry.last_update_turn = turn;
        }
    }
    cur
}

/// Fired rules that still have discharge slots below threshold.
pub fn outstanding_risks<'a>(
    cur: &'a CurrentState,
    goal: &'a GoalState,
) -> impl Iterator<Item = &'a crate::model::RiskRule> {
    goal.risk_rules
        .iter()
        .filter(move |r| r.fires(cur) && !r.is_discharged(cur))
}

/// True once every mandatory slot is resolved and every fired risk rule is
/// discharged.
pub fn goal_met(cur: &CurrentState, goal: &GoalState, w_min: f64) -> bool {
    goal.mandatory_slots()
        .all(|g| slot_resolved(cur, g.slot.as_str(), w_min))
        && outstanding_risks(cur, goal).next().is_none()
}

/// Derive the typed gaps between the current state and the goal.
///
/// Output is ordered by `(kind, slot_id, source)`.
pub fn derive_gaps(
    cur: &CurrentState,
    goal: &GoalState,
    belief: &Belief,
    paths: &[ReasoningPath],
    cfg: &GapConfig,
) -> Vec<GapSignal> {
    let mut gaps = Vec::new();
    let bonus = |slot: &str| {
        if goal.is_risk_flagged(slot) {
            cfg.risk_flag_bonus
        } else {
            0.0
        }
    };

    for g in goal.mandatory_slots() {
        if !slot_resolved(cur, g.slot.as_str(), cfg.w_min) {
            let why = match cur.entry(g.slot.as_str()) {
                None => "no entry".to_owned(),
                Some(e) => format!("{} at weight {}", e.state, e.weight),
            };
            gaps.push(GapSignal {
                kind: GapKind::Information,
                slot_id: Some(g.slot.clone()),
                severity: cfg.information_severity + bonus(g.slot.as_str()),
                rationale_trace: format!("mandatory slot {} unmet: {why}", g.slot),
                source: "goal".to_owned(),
            });
        }
    }

    for e in cur.entries.values() {
        if e.state.needs_verification() {
            gaps.push(GapSignal {
                kind: GapKind::Evidence,
                slot_id: Some(e.field_id.clone()),
                severity: cfg.evidence_severity + bonus(e.field_id.as_str()),
                rationale_trace: format!(
                    "{} is {} (trace {})",
                    e.field_id,
                    e.state,
                    e.supporting_trace_ids.last().map_or("", |t| t.as_str())
                ),
                source: "state".to_owned(),
            });
        }
    }

    for rule in outstanding_risks(cur, goal) {
        let open: Vec<&str> = rule.unresolved_slots(cur).map(SlotId::as_str).collect();
        gaps.push(GapSignal {
            kind: GapKind::Risk,
            slot_id: rule.unresolved_slots(cur).next().cloned(),
            severity: rule.severity,
            rationale_trace: format!("rule {} fired; unresolved: {}", rule.rule_id, open.join(",")),
            source: rule.rule_id.to_string(),
        });
    }

    if let Some((first, second)) = belief.top_two() {
        let margin = first.1 - second.1;
        if margin < cfg.delta {
            gaps.push(GapSignal {
                kind: GapKind::Differential,
                slot_id: None,
                severity: 1.0 - margin / cfg.delta,
                rationale_trace: format!(
                    "{} {:.3} vs {} {:.3}",
                    first.0, first.1, second.0, second.1
                ),
                source: format!("{}|{}", first.0, second.0),
            });
        }
    }

    let mut blocking: BTreeMap<&SlotId, &ReasoningPath> = BTreeMap::new();
    for p in paths {
        if let Some(slot) = &p.precondition {
            if !slot_resolved(cur, slot.as_str(), cfg.w_min) {
                let keep = blocking.get(slot).is_none_or(|q| p.score > q.score);
                if keep {
                    blocking.insert(slot, p);
                }
            }
        }
    }
    for (slot, p) in blocking {
        gaps.push(GapSignal {
            kind: GapKind::PathBlocking,
            slot_id: Some(slot.clone()),
            severity: cfg.path_blocking_severity,
            rationale_trace: format!("path {} blocked at {slot}", p.nodes_joined()),
            source: "retrieval".to_owned(),
        });
    }

    gaps.sort_by(|a, b| {
        (a.kind, &a.slot_id, &a.source).cmp(&(b.kind, &b.slot_id, &b.source))
    });
    gaps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::Belief;
    use crate::model::{EvidenceSpan, GoalSlot, Role, RiskCondition, RiskRule, StateLabel, Temporality, TraceId};

    fn ev(turn: u32, ord: usize, slot: &str, value: &str, state: StateLabel) -> StatefulEvent {
        StatefulEvent {
            field_id: slot.into(),
            value: value.into(),
            state,
            temporality: Temporality::Present,
            role: Role::Patient,
            evidence: EvidenceSpan {
                turn_index: turn,
                char_start: 0,
                char_end: 1,
                speaker: Role::Patient,
            },
            confidence: 1.0,
            trace_id: TraceId::for_event(turn, ord),
        }
    }

    fn w() -> StateWeights {
        StateWeights::default()
    }

    #[test]
    fn empty_events_only_advance_the_turn() {
        let c0 = apply_events(&CurrentState::new(), &[ev(0, 0, "a", "x", StateLabel::ObservedResult)], 0, &w());
        let c1 = apply_events(&c0, &[], 1, &w());
        assert_eq!(c1.turn_index, Some(1));
        assert_eq!(c1.entries, c0.entries);
        assert_eq!(c1.provenance, c0.provenance);
    }

    #[test]
    fn completed_supersedes_recommended_and_keeps_provenance() {
        let c0 = apply_events(&CurrentState::new(), &[ev(0, 0, "chest_xray", "ordered", StateLabel::Recommended)], 0, &w());
        assert_eq!(c0.weight("chest_xray"), 0.2);
        let c1 = apply_events(&c0, &[ev(1, 0, "chest_xray", "result_normal", StateLabel::Completed)], 1, &w());
        let e = c1.entry("chest_xray").unwrap();
        assert_eq!(e.state, StateLabel::Completed);
        assert_eq!(e.weight, 0.7);
        assert_eq!(e.value, "result_normal");
        assert_eq!(e.supporting_trace_ids, vec![TraceId::from("t0e0"), TraceId::from("t1e0")]);
    }

    #[test]
    fn negation_against_observed_logs_contradiction_without_overwrite() {
        let c0 = apply_events(&CurrentState::new(), &[ev(0, 0, "penicillin_allergy", "present", StateLabel::ObservedResult)], 0, &w());
        let c1 = apply_events(&c0, &[ev(1, 0, "penicillin_allergy", "absent", StateLabel::Negated)], 1, &w());
        let e = c1.entry("penicillin_allergy").unwrap();
        assert_eq!(e.value, "present");
        assert_eq!(e.state, StateLabel::ObservedResult);
        assert_eq!(c1.contradictions.len(), 1);
        assert_eq!(c1.contradictions[0].slot.as_str(), "penicillin_allergy");
        assert_eq!(c1.contradictions[0].trace_ids.len(), 2);
        for id in &c1.contradictions[0].trace_ids {
            assert!(c1.provenance.contains_key(id));
        }
    }

    #[test]
    fn observed_after_negation_wins_and_is_flagged() {
        let c0 = apply_events(&CurrentState::new(), &[ev(0, 0, "fever", "absent", StateLabel::Negated)], 0, &w());
        let c1 = apply_events(&c0, &[ev(1, 0, "fever", "present", StateLabel::ObservedResult)], 1, &w());
        assert_eq!(c1.entry("fever").unwrap().state, StateLabel::ObservedResult);
        assert_eq!(c1.contradictions.len(), 1);
    }

    #[test]
    fn equal_weight_later_turn_wins_lower_weight_loses() {
        let c0 = apply_events(&CurrentState::new(), &[ev(0, 0, "a", "x", StateLabel::Confirmed)], 0, &w());
        let c1 = apply_events(&c0, &[ev(1, 0, "a", "y", StateLabel::ObservedResult)], 1, &w());
        assert_eq!(c1.entry("a").unwrap().value, "y");
        let c2 = apply_events(&c1, &[ev(2, 0, "a", "z", StateLabel::HistoricalResult)], 2, &w());
        assert_eq!(c2.entry("a").unwrap().value, "y");
        assert_eq!(c2.entry("a").unwrap().supporting_trace_ids.len(), 3);
    }

    #[test]
    fn refolding_the_same_events_is_a_no_op() {
        let events = [
            ev(0, 0, "a", "x", StateLabel::Recommended),
            ev(0, 1, "a", "y", StateLabel::Completed),
            ev(0, 2, "b", "absent", StateLabel::Negated),
        ];
        let c1 = apply_events(&CurrentState::new(), &events, 0, &w());
        let c2 = apply_events(&c1, &events, 0, &w());
        assert_eq!(c1.entries, c2.entries);
        assert_eq!(c1.contradictions, c2.contradictions);
    }

    fn goal() -> GoalState {
        GoalState {
            required_slots: vec![
                GoalSlot { slot: "symptom_duration".into(), section: "HPI".into(), mandatory: true, risk_flag: true },
                GoalSlot { slot: "chest_pain".into(), section: "HPI".into(), mandatory: true, risk_flag: false },
                GoalSlot { slot: "cough".into(), section: "ROS".into(), mandatory: false, risk_flag: false },
            ],
            risk_rules: vec![RiskRule {
                rule_id: "acute_coronary_workup".into(),
                description: String::new(),
                antecedent: vec![
                    RiskCondition { slot: "chest_pain".into(), value: None, states: None, min_weight: 0.5 },
                    RiskCondition { slot: "exertional_worsening".into(), value: None, states: None, min_weight: 0.5 },
                ],
                unresolved_condition: vec!["ecg".into()],
                severity: 2.0,
                threshold: 0.7,
            }],
            activation: BTreeMap::new(),
        }
    }

    #[test]
    fn missing_mandatory_slot_is_an_information_gap() {
        let cur = apply_events(&CurrentState::new(), &[ev(0, 0, "chest_pain", "present", StateLabel::ObservedResult)], 0, &w());
        let gaps = derive_gaps(&cur, &goal(), &Belief::uniform(&["h1"]), &[], &GapConfig::default());
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].kind, GapKind::Information);
        assert_eq!(gaps[0].slot_id.as_ref().unwrap().as_str(), "symptom_duration");
        assert_eq!(gaps[0].severity, 1.5);
    }

    #[test]
    fn fired_rule_yields_risk_gap_until_discharged() {
        let events = [
            ev(0, 0, "chest_pain", "present", StateLabel::ObservedResult),
            ev(0, 1, "exertional_worsening", "present", StateLabel::ObservedResult),
            ev(0, 2, "symptom_duration", "3d", StateLabel::ObservedResult),
        ];
        let cur = apply_events(&CurrentState::new(), &events, 0, &w());
        let gaps = derive_gaps(&cur, &goal(), &Belief::uniform(&["h1"]), &[], &GapConfig::default());
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].kind, GapKind::Risk);
        assert_eq!(gaps[0].severity, 2.0);
        assert_eq!(gaps[0].source, "acute_coronary_workup");
        assert_eq!(gaps[0].slot_id.as_ref().unwrap().as_str(), "ecg");
        assert!(!goal_met(&cur, &goal(), 0.7));

        let cur = apply_events(&cur, &[ev(1, 0, "ecg", "normal", StateLabel::Recommended)], 1, &w());
        assert_eq!(derive_gaps(&cur, &goal(), &Belief::uniform(&["h1"]), &[], &GapConfig::default())[0].kind, GapKind::Risk);
        let cur = apply_events(&cur, &[ev(2, 0, "ecg", "normal", StateLabel::Completed)], 2, &w());
        assert!(derive_gaps(&cur, &goal(), &Belief::uniform(&["h1"]), &[], &GapConfig::default()).is_empty());
        assert!(goal_met(&cur, &goal(), 0.7));
    }

    #[test]
    fn close_top_two_opens_a_differential_gap() {
        let b = Belief::from_pairs(&[("h1", 0.52), ("h2", 0.48)]).unwrap();
        let g = GoalState { required_slots: vec![], ..goal() };
        let gaps = derive_gaps(&CurrentState::new(), &g, &b, &[], &GapConfig::default());
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].kind, GapKind::Differential);
        assert!(gaps[0].severity > 0.0);
        let b = Belief::from_pairs(&[("h1", 0.7), ("h2", 0.3)]).unwrap();
        assert!(derive_gaps(&CurrentState::new(), &g, &b, &[], &GapConfig::default()).is_empty());
    }

    #[test]
    fn pending_items_are_evidence_gaps_and_negation_resolves_information() {
        let events = [
            ev(0, 0, "penicillin_allergy", "unclear", StateLabel::PendingVerification),
            ev(0, 1, "symptom_duration", "unknown", StateLabel::Negated),
            ev(0, 2, "chest_pain", "present", StateLabel::ObservedResult),
        ];
        let cur = apply_events(&CurrentState::new(), &events, 0, &w());
        let gaps = derive_gaps(&cur, &goal(), &Belief::uniform(&["h1"]), &[], &GapConfig::default());
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].kind, GapKind::Evidence);
    }

    #[test]
    fn blocked_paths_become_path_blocking_gaps() {
        let path = ReasoningPath {
            nodes: vec!["sym".into(), "exam".into()],
            edges: vec![crate::retrieval::PathEdge { relation: "needs".into(), cost: 1.0 }],
            cost: 1.25,
            score: 1.0,
            precondition: Some("ecg".into()),
        };
        let g = GoalState { required_slots: vec![], risk_rules: vec![], activation: BTreeMap::new() };
        let gaps = derive_gaps(&CurrentState::new(), &g, &Belief::uniform(&["h"]), &[path.clone(), path], &GapConfig::default());
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].kind, GapKind::PathBlocking);
    }
}
