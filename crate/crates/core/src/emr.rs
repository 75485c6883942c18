//! Structured record projected from the current state.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CurrentState, EvidenceSpan, GoalState, RuleId, SlotId, StateEntry, StateLabel, Temporality, TraceId};
use crate::state::outstanding_risks;

/// Section layout of the record and the section every slot lives in.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RecordSchema {
    /// Section ids in display order.
    pub sections: Vec<String>,
    pub slots: BTreeMap<SlotId, String>,
}

impl RecordSchema {
    pub fn section_of(&self, slot: &str) -> Option<&str> {
        self.slots.get(slot).map(String::as_str)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assertion {
    Positive,
    Negative,
    Proposed,
}

impl Assertion {
    pub fn for_state(state: StateLabel) -> Assertion {
        match state {
            StateLabel::Negated | StateLabel::NotDone => Assertion::Negative,
            StateLabel::Recommended => Assertion::Proposed,
            _ => Assertion::Positive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordSlot {
    pub slot_id: SlotId,
    pub normalized_value: String,
    pub status: StateLabel,
    pub temporality: Temporality,
    pub assertion: Assertion,
    pub risk_flag: bool,
    pub trace_ids: Vec<TraceId>,
    pub evidence: Vec<EvidenceSpan>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordSection {
    pub section: String,
    pub slots: Vec<RecordSlot>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskSummary {
    pub rule_id: RuleId,
    pub description: String,
    pub open_slots: Vec<SlotId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmrRecord {
    pub sections: Vec<RecordSection>,
    /// Fired rules that are still open. Kept apart from the slot sections so
    /// every slot value stays a verbatim copy of a state entry.
    pub risk_summary: Vec<RiskSummary>,
    pub generated_at_turn: Option<u32>,
}

impl EmrRecord {
    pub fn slots(&self) -> impl Iterator<Item = &RecordSlot> {
        self.sections.iter().flat_map(|s| s.slots.iter())
    }

    pub fn slot(&self, id: &str) -> Option<&RecordSlot> {
        self.slots().find(|s| s.slot_id.as_str() == id)
    }

    pub fn is_empty(&self) -> bool {
        self.sections.iter().all(|s| s.slots.is_empty())
    }
}

fn admitted(e: &StateEntry, w_emr: f64) -> bool {
    e.state.is_exclusion() || e.state == StateLabel::Recommended || (e.weight >= w_emr && e.weight > 0.0)
}

/// Project the state into the record layout. Entries below `w_emr` are
/// omitted unless they are exclusions (negative) or recommendations
/// (proposed).
pub fn project_record(cur: &CurrentState, goal: &GoalState, schema: &RecordSchema, w_emr: f64) -> Result<EmrRecord> {
    let mut by_section: BTreeMap<&str, Vec<RecordSlot>> = BTreeMap::new();
    for e in cur.entries.values() {
        let section = schema
            .section_of(e.field_id.as_str())
            .ok_or_else(|| Error::UnmappedSlot(e.field_id.to_string()))?;
        if !admitted(e, w_emr) {
            continue;
        }
        let ids: Vec<TraceId> = e
            .supporting_trace_ids
            .iter()
            .filter(|t| cur.provenance.contains_key(*t))
            .cloned()
            .collect();
        let evidence = ids.iter().map(|t| cur.provenance[t]).collect();
        by_section.entry(section).or_default().push(RecordSlot {
            slot_id: e.field_id.clone(),
            normalized_value: e.value.clone(),
            status: e.state,
            temporality: e.temporality,
            assertion: Assertion::for_state(e.state),
            risk_flag: goal.is_risk_flagged(e.field_id.as_str()),
            trace_ids: ids,
            evidence,
        });
    }

    let mut sections: Vec<RecordSection> = schema
        .sections
        .iter()
        .map(|s| RecordSection {
            section: s.clone(),
            slots: by_section.remove(s.as_str()).unwrap_or_default(),
        })
        .collect();
    // sections used by slots but missing from the declared order go last
    for (s, slots) in by_section {
        sections.push(RecordSection {
            section: s.to_owned(),
            slots,
        });
    }

    let risk_summary = outstanding_risks(cur, goal)
        .map(|r| RiskSummary {
            rule_id: r.rule_id.clone(),
            description: r.description.clone(),
            open_slots: r.unresolved_slots(cur).cloned().collect(),
        })
        .collect();

    Ok(EmrRecord {
        sections,
        risk_summary,
        generated_at_turn: cur.turn_index,
    })
}

/// Slot-level changes between two projections.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmrDiff {
    pub added: Vec<SlotId>,
    pub changed: Vec<SlotId>,
    pub removed: Vec<SlotId>,
}

impl EmrDiff {
    pub fn between(before: &EmrRecord, after: &EmrRecord) -> Self {
        let index = |r: &EmrRecord| -> BTreeMap<SlotId, RecordSlot> {
            r.slots().map(|s| (s.slot_id.clone(), s.clone())).collect()
        };
        let (b, a) = (index(before), index(after));
        let keys: BTreeSet<&SlotId> = b.keys().chain(a.keys()).collect();
        let mut diff = EmrDiff::default();
        for k in keys {
            match (b.get(k), a.get(k)) {
                (None, Some(_)) => diff.added.push(k.clone()),
                (Some(_), None) => diff.removed.push(k.clone()),
                (Some(x), Some(y)) if x != y => diff.changed.push(k.clone()),
                _ => {}
            }
        }
        diff
    }

    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.changed.is_empty() && self.removed.is_empty()
    }
}
