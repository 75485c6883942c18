use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::policy::PolicyKind;
use super::{
    generate_candidates, prompt_for, score_candidates, select_action, ActionHistory, PlannerConfig,
    PlanningContext, UtilityWeights,
};
use crate::belief::{entropy, update_belief, Belief};
use crate::emr::{project_record, EmrDiff, EmrRecord};
use crate::error::{Error, Result};
use crate::extraction::{validate_events, Diagnostic, DialogueTurn, ExtractionConfig, ExtractionMode, Extractor, GoldExtractor, RuleExtractor};
use crate::hash::digest;
use crate::model::{
    ActionCandidate, ActionId, CurrentState, GapKind, GapSignal, HypothesisId, ObjectId, SlotId,
    StateWeights, StatefulEvent, UtilityBreakdown,
};
use crate::pack::CaseSpec;
use crate::retrieval::{retrieve, KnowledgeBase, QueryContext, RankedObject, ReasoningPath, RetrievalConfig, RetrievalResult};
use crate::state::{derive_gaps, goal_met, GapConfig};

/// Engine knobs a pack manifest can pin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// `gold` replays annotations when a turn carries them and falls back to
    /// the rule pack otherwise; `rule` always uses the rule pack.
    pub extraction: ExtractionMode,
    pub extraction_confidence: ExtractionConfig,
    pub state_weights: StateWeights,
    pub gaps: GapConfig,
    pub lambda: UtilityWeights,
    pub planner: PlannerConfig,
    /// Minimum weight for an affirmative entry to enter the record.
    pub w_emr: f64,
    /// Turn budget of a simulated session.
    pub max_turns: u32,
    /// Retrieved objects and paths kept verbatim in each trace.
    pub trace_top: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            extraction: ExtractionMode::Gold,
            extraction_confidence: ExtractionConfig::default(),
            state_weights: StateWeights::default(),
            gaps: GapConfig::default(),
            lambda: UtilityWeights::default(),
            planner: PlannerConfig::default(),
            w_emr: 0.5,
            max_turns: 16,
            trace_top: 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Active,
    GoalReached,
    Ended,
}

/// Auditable record of one pass through the control loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurnTrace {
    pub turn_index: u32,
    pub policy: PolicyKind,
    pub input: DialogueTurn,
    pub events: Vec<StatefulEvent>,
    pub diagnostics: Vec<Diagnostic>,
    pub state_hash: String,
    pub belief: BTreeMap<HypothesisId, f64>,
    pub entropy: f64,
    pub gaps: Vec<GapSignal>,
    pub retrieval_top_k: Vec<ObjectId>,
    pub retrieved: Vec<RankedObject>,
    pub paths: Vec<ReasoningPath>,
    pub candidates: Vec<ActionCandidate>,
    pub chosen: Option<ActionId>,
    pub goal_met: bool,
    pub emr_diff: EmrDiff,
    /// Digest of every other field.
    pub trace_hash: String,
}

impl TurnTrace {
    pub fn chosen_candidate(&self) -> Option<&ActionCandidate> {
        let id = self.chosen.as_ref()?;
        self.candidates.iter().find(|c| &c.action_id == id)
    }

    fn seal(&mut self) {
        self.trace_hash.clear();
        self.trace_hash = digest(self);
    }

    /// Recompute the digest and compare.
    pub fn verify_hash(&self) -> bool {
        let mut t = self.clone();
        t.seal();
        t.trace_hash == self.trace_hash
    }
}

/// One consultation: the running state plus its trace log.
#[derive(Clone, Debug)]
pub struct Session {
    pub id: String,
    pub case: Arc<CaseSpec>,
    pub kb: Arc<KnowledgeBase>,
    pub policy: PolicyKind,
    pub state: CurrentState,
    pub belief: Belief,
    pub history: ActionHistory,
    pub traces: Vec<TurnTrace>,
    pub record: EmrRecord,
    pub status: SessionStatus,
    paths: Vec<ReasoningPath>,
    checklist_pos: usize,
}

impl Session {
    pub fn new(case: Arc<CaseSpec>, kb: Arc<KnowledgeBase>, policy: PolicyKind) -> Result<Self> {
        let belief = case.scenario.prior()?;
        let state = CurrentState::new();
        let record = project_record(&state, &case.goal, &case.schema, case.config.w_emr)?;
        Ok(Self {
            id: String::new(),
            case,
            kb,
            policy,
            state,
            belief,
            history: ActionHistory::default(),
            traces: Vec::new(),
            record,
            status: SessionStatus::Active,
            paths: Vec::new(),
            checklist_pos: 0,
        })
    }

    pub fn next_turn_index(&self) -> u32 {
        self.traces.len() as u32
    }

    pub fn state_hash(&self) -> String {
        digest(&self.state)
    }

    pub fn end(&mut self) {
        if self.status == SessionStatus::Active {
            self.status = SessionStatus::Ended;
        }
    }

    fn extract(&self, turn: &DialogueTurn) -> Result<Vec<StatefulEvent>> {
        let cfg = &self.case.config;
        let use_gold = cfg.extraction == ExtractionMode::Gold && turn.gold_events.is_some();
        if use_gold {
            GoldExtractor {
                confidence: cfg.extraction_confidence.gold_confidence,
            }
            .extract(turn)
        } else if self.case.rules.is_empty() {
            Ok(Vec::new())
        } else {
            RuleExtractor::new(self.case.rules.clone(), cfg.extraction_confidence.rule_confidence)?.extract(turn)
        }
    }

    /// Run the control loop on one incoming turn: extract, fold, update the
    /// belief, derive gaps, retrieve, generate and score candidates, select.
    /// The turn index is assigned by the session.
    pub fn run_turn(&mut self, mut turn: DialogueTurn) -> Result<&TurnTrace> {
        if self.status != SessionStatus::Active {
            return Err(Error::SessionEnded(self.id.clone()));
        }
        let t = self.next_turn_index();
        turn.turn_index = t;
        let trace = self.step(turn).map_err(|e| e.at_turn(t))?;
        self.traces.push(trace);
        Ok(self.traces.last().expect("just pushed"))
    }

    fn step(&mut self, turn: DialogueTurn) -> Result<TurnTrace> {
        let case = Arc::clone(&self.case);
        let cfg = &case.config;
        let t = turn.turn_index;

        let validated = validate_events(self.extract(&turn)?, &turn);
        let state = crate::state::apply_events(&self.state, &validated.events, t, &cfg.state_weights);
        let mut belief = if self.policy == PolicyKind::RuleTemplate {
            self.belief.clone()
        } else {
            update_belief(&self.belief, &validated.events, &case.scenario.likelihoods, &cfg.state_weights)?
        };
        belief.record_entropy(t);

        let mut gaps = derive_gaps(&state, &case.goal, &belief, &self.paths, &cfg.gaps);
        if self.policy == PolicyKind::ChunkRag {
            gaps.retain(|g| g.kind == GapKind::Information);
        }

        let retrieval = match self.policy {
            PolicyKind::FullFramework | PolicyKind::ChunkRag => {
                // blocked-path slots stay out of the focus so a path cannot keep
                // itself retrieved
                let focus: Vec<SlotId> = gaps
                    .iter()
                    .filter(|g| g.kind != GapKind::PathBlocking)
                    .filter_map(|g| g.slot_id.clone())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                let q = QueryContext {
                    cur: &state,
                    goal: &case.goal,
                    belief: &belief,
                    focus: &focus,
                };
                let mut rc = RetrievalConfig::from_manifest(&self.kb.manifest);
                rc.w_min = cfg.gaps.w_min;
                if self.policy == PolicyKind::ChunkRag {
                    rc = rc.chunk_only();
                }
                retrieve(q, &self.kb, &rc)
            }
            _ => RetrievalResult::default(),
        };

        let mut candidates = match self.policy {
            PolicyKind::DirectGeneration => Vec::new(),
            PolicyKind::RuleTemplate => self.checklist_candidate(t),
            PolicyKind::FullFramework | PolicyKind::ChunkRag => {
                let ctx = PlanningContext {
                    turn_index: t,
                    cur: &state,
                    goal: &case.goal,
                    belief: &belief,
                    outcomes: &case.scenario.outcomes,
                    gaps: &gaps,
                    retrieval: &retrieval,
                    kb: &self.kb,
                    history: &self.history,
                    config: &cfg.planner,
                };
                let mut c = generate_candidates(&ctx);
                let w = if self.policy == PolicyKind::ChunkRag {
                    UtilityWeights::IG_ONLY
                } else {
                    cfg.lambda
                };
                score_candidates(&mut c, &ctx, &w);
                c
            }
        };
        candidates.retain(|c| c.utility_components.is_finite());

        let chosen = select_action(&candidates).ok().cloned();
        if let Some(c) = &chosen {
            self.history.push(t, c);
        }

        let met = goal_met(&state, &case.goal, cfg.gaps.w_min);
        let record = project_record(&state, &case.goal, &case.schema, cfg.w_emr)?;
        let emr_diff = EmrDiff::between(&self.record, &record);
        let paths = retrieval.all_paths();

        let mut trace = TurnTrace {
            turn_index: t,
            policy: self.policy,
            input: turn,
            events: validated.events,
            diagnostics: validated.diagnostics,
            state_hash: digest(&state),
            entropy: entropy(&belief),
            belief: belief.probs.clone(),
            gaps,
            retrieval_top_k: retrieval.top_ids(retrieval.ranked.len()),
            retrieved: retrieval.ranked.iter().take(cfg.trace_top).cloned().collect(),
            paths: paths.iter().take(cfg.trace_top).cloned().collect(),
            candidates,
            chosen: chosen.map(|c| c.action_id),
            goal_met: met,
            emr_diff,
            trace_hash: String::new(),
        };
        trace.seal();

        self.state = state;
        self.belief = belief;
        self.record = record;
        self.paths = paths;
        if met && self.policy.is_interactive() {
            self.status = SessionStatus::GoalReached;
        }
        Ok(trace)
    }

    /// The template baseline takes the next checklist step, whatever the state.
    fn checklist_candidate(&mut self, t: u32) -> Vec<ActionCandidate> {
        let Some(item) = self.case.scenario.checklist.get(self.checklist_pos).cloned() else {
            return Vec::new();
        };
        self.checklist_pos += 1;
        vec![ActionCandidate {
            action_id: ActionId::for_candidate(t, 0),
            verb: item.verb,
            prompt_text: prompt_for(item.verb, Some(&item.slot)),
            target_slot: Some(item.slot),
            addresses: if item.verb.closes_risk() { GapKind::Risk } else { GapKind::Information },
            utility_components: UtilityBreakdown::default(),
            utility: 0.0,
        }]
    }

    /// The action proposed on the last turn, if any.
    pub fn last_action(&self) -> Option<&ActionCandidate> {
        self.traces.last()?.chosen_candidate()
    }
}
