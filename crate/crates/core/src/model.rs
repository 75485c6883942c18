//! Shared domain types: identifiers, evidence states, the running case model,
//! goal templates, gap signals and action candidates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.pad(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Canonical lowercase snake_case slot name, e.g. `chest_pain`.
    SlotId
);
string_id!(
    /// Per-session evidence identifier, `t{turn}e{ordinal}`.
    TraceId
);
string_id!(
    /// Per-turn action identifier; lexicographic order is the tie-break order.
    ActionId
);
string_id!(RuleId);
string_id!(HypothesisId);
string_id!(ObjectId);

impl TraceId {
    pub fn for_event(turn_index: u32, ordinal: usize) -> Self {
        Self(format!("t{turn_index}e{ordinal}"))
    }
}

impl ActionId {
    pub fn for_candidate(turn_index: u32, ordinal: usize) -> Self {
        Self(format!("a{turn_index:04}.{ordinal:02}"))
    }
}

/// Evidential state of an extracted item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLabel {
    ObservedResult,
    Confirmed,
    Verified,
    Completed,
    HistoricalResult,
    Recommended,
    PendingVerification,
    Unconfirmed,
    NotDone,
    Negated,
    Unknown,
}

impl StateLabel {
    pub const ALL: [StateLabel; 11] = [
        StateLabel::ObservedResult,
        StateLabel::Confirmed,
        StateLabel::Verified,
        StateLabel::Completed,
        StateLabel::HistoricalResult,
        StateLabel::Recommended,
        StateLabel::PendingVerification,
        StateLabel::Unconfirmed,
        StateLabel::NotDone,
        StateLabel::Negated,
        StateLabel::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StateLabel::ObservedResult => "observed_result",
            StateLabel::Confirmed => "confirmed",
            StateLabel::Verified => "verified",
            StateLabel::Completed => "completed",
            StateLabel::HistoricalResult => "historical_result",
            StateLabel::Recommended => "recommended",
            StateLabel::PendingVerification => "pending_verification",
            StateLabel::Unconfirmed => "unconfirmed",
            StateLabel::NotDone => "not_done",
            StateLabel::Negated => "negated",
            StateLabel::Unknown => "unknown",
        }
    }

    /// Explicit exclusion states: they answer a slot without affirming it.
    pub fn is_exclusion(self) -> bool {
        matches!(self, StateLabel::Negated | StateLabel::NotDone)
    }

    pub fn needs_verification(self) -> bool {
        matches!(
            self,
            StateLabel::PendingVerification | StateLabel::Unconfirmed
        )
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StateLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::UnknownStateLabel(s.to_owned()))
    }
}

/// Default evidence weight of a state label.
///
/// `not_done` and `negated` carry no evidence tier; they get
/// 0.0 here and their exclusion semantics live in the state engine.
pub fn state_weight(state: StateLabel) -> f64 {
    StateWeights::default().weight(state)
}

/// State weight table with the two config-exposed overrides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StateWeights {
    pub not_done: f64,
    pub negated: f64,
}

impl Default for StateWeights {
    fn default() -> Self {
        Self {
            not_done: 0.0,
            negated: 0.0,
        }
    }
}

impl StateWeights {
    pub fn weight(&self, state: StateLabel) -> f64 {
        match state {
            StateLabel::ObservedResult | StateLabel::Confirmed | StateLabel::Verified => 1.0,
            StateLabel::Completed => 0.7,
            StateLabel::HistoricalResult => 0.5,
            StateLabel::Recommended
            | StateLabel::PendingVerification
            | StateLabel::Unconfirmed => 0.2,
            StateLabel::Unknown => 0.0,
            StateLabel::NotDone => self.not_done,
            StateLabel::Negated => self.negated,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Temporality {
    Present,
    RecentPast,
    Past,
    Future,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Patient,
    Physician,
    Family,
    Report,
    /// The controller itself; only used for rendered prompts, never for evidence.
    System,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EvidenceSpan {
    pub turn_index: u32,
    pub char_start: usize,
    pub char_end: usize,
    pub speaker: Role,
}

impl EvidenceSpan {
    pub fn fits(&self, text_len: usize) -> bool {
        self.char_start < self.char_end && self.char_end <= text_len
    }
}

/// One extracted item of evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatefulEvent {
    pub field_id: SlotId,
    pub value: String,
    pub state: StateLabel,
    pub temporality: Temporality,
    pub role: Role,
    pub evidence: EvidenceSpan,
    pub confidence: f64,
    pub trace_id: TraceId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateEntry {
    pub field_id: SlotId,
    pub value: String,
    pub state: StateLabel,
    pub weight: f64,
    pub temporality: Temporality,
    pub supporting_trace_ids: Vec<TraceId>,
    pub last_update_turn: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contradiction {
    pub slot: SlotId,
    pub trace_ids: Vec<TraceId>,
}

/// The running structured case model.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurrentState {
    pub entries: BTreeMap<SlotId, StateEntry>,
    pub contradictions: Vec<Contradiction>,
    /// Every evidence span folded so far, keyed by trace id.
    pub provenance: BTreeMap<TraceId, EvidenceSpan>,
    /// Index of the last applied turn; `None` before the first turn.
    pub turn_index: Option<u32>,
    /// Slots touched by the last applied turn.
    pub last_touched: BTreeSet<SlotId>,
}

impl CurrentState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn weight(&self, slot: &str) -> f64 {
        self.entries.get(slot).map_or(0.0, |e| e.weight)
    }

    pub fn entry(&self, slot: &str) -> Option<&StateEntry> {
        self.entries.get(slot)
    }

    /// Every trace id referenced anywhere in the state.
    pub fn trace_ids(&self) -> BTreeSet<TraceId> {
        let mut ids: BTreeSet<TraceId> = self.provenance.keys().cloned().collect();
        for entry in self.entries.values() {
            ids.extend(entry.supporting_trace_ids.iter().cloned());
        }
        for c in &self.contradictions {
            ids.extend(c.trace_ids.iter().cloned());
        }
        ids
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalSlot {
    pub slot: SlotId,
    pub section: String,
    pub mandatory: bool,
    #[serde(default)]
    pub risk_flag: bool,
}

/// One conjunct of a risk rule's antecedent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskCondition {
    pub slot: SlotId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    /// Accepted states; when absent the entry must carry at least `min_weight`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<StateLabel>>,
    #[serde(default = "default_condition_weight")]
    pub min_weight: f64,
}

fn default_condition_weight() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskRule {
    pub rule_id: RuleId,
    #[serde(default)]
    pub description: String,
    pub antecedent: Vec<RiskCondition>,
    /// Slots that must reach `threshold` weight to discharge the rule.
    pub unresolved_condition: Vec<SlotId>,
    pub severity: f64,
    #[serde(default = "default_discharge_threshold")]
    pub threshold: f64,
}

fn default_discharge_threshold() -> f64 {
    0.7
}

impl RiskRule {
    pub fn fires(&self, cur: &CurrentState) -> bool {
        !self.antecedent.is_empty()
            && self.antecedent.iter().all(|c| {
                let Some(entry) = cur.entry(c.slot.as_str()) else {
                    return false;
                };
                if let Some(v) = &c.value {
                    if !entry.value.eq_ignore_ascii_case(v) {
                        return false;
                    }
                }
                match &c.states {
                    Some(states) => states.contains(&entry.state),
                    None => entry.weight >= c.min_weight,
                }
            })
    }

    /// Discharge slots still below threshold, in declaration order.
    pub fn unresolved_slots<'a>(&'a self, cur: &'a CurrentState) -> impl Iterator<Item = &'a SlotId> {
        self.unresolved_condition
            .iter()
            .filter(move |s| cur.weight(s.as_str()) < self.threshold)
    }

    pub fn is_discharged(&self, cur: &CurrentState) -> bool {
        self.unresolved_slots(cur).next().is_none()
    }

    pub fn referenced_slots(&self) -> impl Iterator<Item = &SlotId> {
        self.antecedent
            .iter()
            .map(|c| &c.slot)
            .chain(self.unresolved_condition.iter())
    }
}

/// Target information structure for a scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GoalState {
    pub required_slots: Vec<GoalSlot>,
    #[serde(default)]
    pub risk_rules: Vec<RiskRule>,
    /// Scenario id -> the slots active for that scenario. Scenarios without an
    /// entry use every required slot.
    #[serde(default)]
    pub activation: BTreeMap<String, Vec<SlotId>>,
}

impl GoalState {
    pub fn is_empty(&self) -> bool {
        self.required_slots.is_empty() && self.risk_rules.is_empty()
    }

    pub fn slot(&self, slot: &str) -> Option<&GoalSlot> {
        self.required_slots.iter().find(|g| g.slot.as_str() == slot)
    }

    pub fn mandatory_slots(&self) -> impl Iterator<Item = &GoalSlot> {
        self.required_slots.iter().filter(|g| g.mandatory)
    }

    pub fn is_risk_flagged(&self, slot: &str) -> bool {
        self.slot(slot).is_some_and(|g| g.risk_flag)
            || self
                .risk_rules
                .iter()
                .any(|r| r.unresolved_condition.iter().any(|s| s.as_str() == slot))
    }

    /// Narrow the goal to the slots activated for `scenario`.
    pub fn activated_for(&self, scenario: &str) -> GoalState {
        let mut goal = self.clone();
        if let Some(active) = self.activation.get(scenario) {
            let active: BTreeSet<&str> = active.iter().map(SlotId::as_str).collect();
            goal.required_slots
                .retain(|g| active.contains(g.slot.as_str()));
        }
        goal.activation.clear();
        goal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapKind {
    Information,
    Evidence,
    Risk,
    Differential,
    PathBlocking,
}

impl GapKind {
    /// Planner priority at equal severity; lower sorts first.
    pub fn priority(self) -> u8 {
        match self {
            GapKind::Risk => 0,
            GapKind::Evidence => 1,
            GapKind::Information => 2,
            GapKind::Differential => 3,
            GapKind::PathBlocking => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSignal {
    pub kind: GapKind,
    pub slot_id: Option<SlotId>,
    pub severity: f64,
    pub rationale_trace: String,
    pub source: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verb {
    Ask,
    Verify,
    Explain,
    RecommendExam,
    RecommendPlan,
}

impl Verb {
    pub fn as_str(self) -> &'static str {
        match self {
            Verb::Ask => "ask",
            Verb::Verify => "verify",
            Verb::Explain => "explain",
            Verb::RecommendExam => "recommend_exam",
            Verb::RecommendPlan => "recommend_plan",
        }
    }

    pub fn is_question(self) -> bool {
        matches!(self, Verb::Ask | Verb::Verify)
    }

    pub fn closes_risk(self) -> bool {
        matches!(self, Verb::Verify | Verb::RecommendExam | Verb::RecommendPlan)
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Key an outcome model or a responder entry is stored under: `verb:slot`.
pub fn action_key(verb: Verb, slot: Option<&SlotId>) -> String {
    match slot {
        Some(s) => format!("{}:{}", verb.as_str(), s),
        None => verb.as_str().to_owned(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UtilityBreakdown {
    pub ig: f64,
    pub rr: f64,
    pub ps: f64,
    pub eg: f64,
    pub rp: f64,
    pub cl: f64,
    pub cb: f64,
}

impl UtilityBreakdown {
    pub fn is_finite(&self) -> bool {
        [self.ig, self.rr, self.ps, self.eg, self.rp, self.cl, self.cb]
            .iter()
            .all(|x| x.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionCandidate {
    pub action_id: ActionId,
    pub verb: Verb,
    pub target_slot: Option<SlotId>,
    pub prompt_text: String,
    /// Gap kind that produced the candidate.
    pub addresses: GapKind,
    pub utility_components: UtilityBreakdown,
    pub utility: f64,
}

impl ActionCandidate {
    pub fn key(&self) -> String {
        action_key(self.verb, self.target_slot.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_table_matches_tiers() {
        let expected = [
            (StateLabel::ObservedResult, 1.0),
            (StateLabel::Confirmed, 1.0),
            (StateLabel::Verified, 1.0),
            (StateLabel::Completed, 0.7),
            (StateLabel::HistoricalResult, 0.5),
            (StateLabel::Recommended, 0.2),
            (StateLabel::PendingVerification, 0.2),
            (StateLabel::Unconfirmed, 0.2),
            (StateLabel::Unknown, 0.0),
        ];
        for (state, w) in expected {
            assert_eq!(state_weight(state).to_bits(), f64::to_bits(w), "{state}");
        }
        assert_eq!(state_weight(StateLabel::Negated), 0.0);
        assert_eq!(state_weight(StateLabel::NotDone), 0.0);
    }

    #[test]
    fn overrides_only_touch_exclusion_states() {
        let w = StateWeights {
            not_done: 0.3,
            negated: 0.4,
        };
        assert_eq!(w.weight(StateLabel::NotDone), 0.3);
        assert_eq!(w.weight(StateLabel::Negated), 0.4);
        assert_eq!(w.weight(StateLabel::Completed), 0.7);
    }

    #[test]
    fn state_labels_round_trip_and_reject_unknown_strings() {
        for l in StateLabel::ALL {
            assert_eq!(l.as_str().parse::<StateLabel>().unwrap(), l);
            let json = serde_json::to_string(&l).unwrap();
            assert_eq!(json, format!("\"{}\"", l.as_str()));
        }
        assert!("probable".parse::<StateLabel>().is_err());
        assert!(serde_json::from_str::<StateLabel>("\"Observed\"").is_err());
    }

    #[test]
    fn action_ids_sort_by_turn_then_ordinal() {
        let a = ActionId::for_candidate(3, 2);
        let b = ActionId::for_candidate(3, 10);
        let c = ActionId::for_candidate(12, 0);
        assert!(a < b && b < c);
    }

    #[test]
    fn activation_narrows_required_slots() {
        let goal = GoalState {
            required_slots: vec![
                GoalSlot {
                    slot: "a".into(),
                    section: "HPI".into(),
                    mandatory: true,
                    risk_flag: false,
                },
                GoalSlot {
                    slot: "b".into(),
                    section: "HPI".into(),
                    mandatory: true,
                    risk_flag: false,
                },
            ],
            risk_rules: vec![],
            activation: [("s1".to_owned(), vec![SlotId::from("b")])].into(),
        };
        let g = goal.activated_for("s1");
        assert_eq!(g.required_slots.len(), 1);
        assert_eq!(g.required_slots[0].slot.as_str(), "b");
        assert_eq!(goal.activated_for("other").required_slots.len(), 2);
    }
}
