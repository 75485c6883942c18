//! Request and response bodies. Every body carries the format version `v`.

use serde::{Deserialize, Serialize};

use inquiry_core::emr::{EmrDiff, EmrRecord};
use inquiry_core::extraction::GoldAnnotation;
use inquiry_core::model::{ActionCandidate, GapSignal, Role, StatefulEvent};
use inquiry_core::planner::{PolicyKind, SessionStatus, TurnTrace};
use inquiry_core::session::{ScenarioInfo, StateView};

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CreateSession {
    pub v: u32,
    pub scenario_id: String,
    #[serde(default = "default_policy")]
    pub policy: String,
}

fn default_policy() -> String {
    PolicyKind::FullFramework.as_str().to_owned()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SessionCreated {
    pub v: u32,
    pub session_id: String,
    pub scenario_id: String,
    pub policy: PolicyKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PostUtterance {
    pub v: u32,
    pub speaker: Role,
    pub text: String,
    /// Annotated events; when present the engine replays them instead of
    /// running the rule extractor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_events: Option<Vec<GoldAnnotation>>,
}

/// What one turn changed, plus the hashes needed to audit it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TurnSummary {
    pub v: u32,
    pub session_id: String,
    pub status: SessionStatus,
    pub turn_index: u32,
    pub events: Vec<StatefulEvent>,
    pub gaps: Vec<GapSignal>,
    pub proposed_action: Option<ActionCandidate>,
    pub candidates: Vec<ActionCandidate>,
    pub emr_diff: EmrDiff,
    pub goal_met: bool,
    pub state_hash: String,
    pub trace_hash: String,
}

impl TurnSummary {
    pub fn new(session_id: &str, status: SessionStatus, t: TurnTrace) -> Self {
        Self {
            v: VERSION,
            session_id: session_id.to_owned(),
            status,
            turn_index: t.turn_index,
            proposed_action: t.chosen_candidate().cloned(),
            events: t.events,
            gaps: t.gaps,
            candidates: t.candidates,
            emr_diff: t.emr_diff,
            goal_met: t.goal_met,
            state_hash: t.state_hash,
            trace_hash: t.trace_hash,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenarios {
    pub v: u32,
    pub scenarios: Vec<ScenarioInfo>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateBody {
    pub v: u32,
    #[serde(flatten)]
    pub view: StateView,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmrBody {
    pub v: u32,
    pub session_id: String,
    pub record: EmrRecord,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceBody {
    pub v: u32,
    pub session_id: String,
    pub traces: Vec<TurnTrace>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorEnvelope {
    pub v: u32,
    pub error: ErrorBody,
}
