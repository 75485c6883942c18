use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::engine::{Session, TurnTrace};
use crate::emr::EmrRecord;
use crate::error::{Error, Result};
use crate::extraction::DialogueTurn;
use crate::model::{ActionCandidate, CurrentState, Role, SlotId, Verb};
use crate::pack::{CaseSpec, Scenario};
use crate::retrieval::KnowledgeBase;
use crate::state::slot_resolved;

/// The four compared systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    DirectGeneration,
    ChunkRag,
    RuleTemplate,
    FullFramework,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::DirectGeneration,
        PolicyKind::ChunkRag,
        PolicyKind::RuleTemplate,
        PolicyKind::FullFramework,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::DirectGeneration => "direct_generation",
            PolicyKind::ChunkRag => "chunk_rag",
            PolicyKind::RuleTemplate => "rule_template",
            PolicyKind::FullFramework => "full_framework",
        }
    }

    /// Row label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            PolicyKind::DirectGeneration => "A: Direct generation",
            PolicyKind::ChunkRag => "B: Chunk RAG",
            PolicyKind::RuleTemplate => "C: Rule/template",
            PolicyKind::FullFramework => "D: Full framework",
        }
    }

    pub fn is_interactive(self) -> bool {
        self != PolicyKind::DirectGeneration
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownPolicy(s.to_owned()))
    }
}

/// Scripted patient: answers the first action aimed at a slot it has a reply
/// for, once.
#[derive(Clone, Debug, Default)]
pub struct Responder {
    replies: BTreeMap<SlotId, DialogueTurn>,
    filler: String,
}

impl Responder {
    pub fn for_scenario(s: &Scenario) -> Self {
        Self {
            replies: s.responses.iter().map(|r| (r.slot.clone(), r.turn.clone())).collect(),
            filler: s.filler_text.clone(),
        }
    }

    pub fn answer(&mut self, action: &ActionCandidate) -> Option<DialogueTurn> {
        self.replies.remove(action.target_slot.as_ref()?)
    }

    pub fn filler(&self) -> DialogueTurn {
        DialogueTurn::new(0, Role::Patient, self.filler.clone()).with_gold(Vec::new())
    }
}

/// A proposed action with the redundancy judgment made when it was proposed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposedAction {
    pub turn_index: u32,
    pub action: ActionCandidate,
    /// Target already resolved, or the same (verb, slot) was proposed before.
    pub redundant: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub scenario_id: String,
    pub policy: PolicyKind,
    pub traces: Vec<TurnTrace>,
    pub actions: Vec<ProposedAction>,
    pub final_state: CurrentState,
    pub record: EmrRecord,
    /// 1-based count of turns until the goal was met; `None` if it never was
    /// or the policy is non-interactive.
    pub t_goal: Option<u32>,
}

impl SessionResult {
    pub fn redundant_count(&self) -> usize {
        self.actions.iter().filter(|a| a.redundant).count()
    }

    /// Slots targeted by a risk-closing action.
    pub fn risk_targeted_slots(&self) -> BTreeSet<SlotId> {
        self.actions
            .iter()
            .filter(|a| matches!(a.action.verb, Verb::Verify | Verb::RecommendExam | Verb::RecommendPlan))
            .filter_map(|a| a.action.target_slot.clone())
            .collect()
    }
}

/// Drive one scripted case under a policy.
///
/// The direct baseline folds the script and proposes nothing. Interactive
/// policies interleave the script with the responder: after each proposed
/// action the responder's reply (if any) becomes the next turn, otherwise
/// the next scripted turn, otherwise a filler reply. The session stops when
/// the goal is met, when the turn budget is spent, or when nothing is left to
/// say on either side.
pub fn run_policy(case: Arc<CaseSpec>, kb: Arc<KnowledgeBase>, script: &[DialogueTurn], kind: PolicyKind) -> Result<SessionResult> {
    let scenario_id = case.scenario.scenario_id.clone();
    let w_min = case.config.gaps.w_min;
    let max_turns = case.config.max_turns;
    let mut responder = Responder::for_scenario(&case.scenario);
    let mut session = Session::new(case, kb, kind)?;
    let mut actions: Vec<ProposedAction> = Vec::new();
    let mut t_goal = None;

    let mut queue: VecDeque<DialogueTurn> = script.iter().cloned().collect();
    let mut next = queue.pop_front();
    while let Some(turn) = next.take() {
        if kind.is_interactive() && session.traces.len() as u32 >= max_turns {
            break;
        }
        let trace = session.run_turn(turn)?;
        let t = trace.turn_index;
        let chosen = trace.chosen_candidate().cloned();
        if kind.is_interactive() && trace.goal_met {
            t_goal = Some(t + 1);
        }
        if let Some(a) = &chosen {
            let satisfied = a
                .target_slot
                .as_ref()
                .is_some_and(|s| slot_resolved(&session.state, s.as_str(), w_min));
            let repeated = actions
                .iter()
                .any(|p| p.action.verb == a.verb && p.action.target_slot == a.target_slot);
            actions.push(ProposedAction {
                turn_index: t,
                action: a.clone(),
                redundant: satisfied || repeated,
            });
        }
        if t_goal.is_some() {
            break;
        }
        next = match &chosen {
            Some(a) => responder
                .answer(a)
                .or_else(|| queue.pop_front())
                .or_else(|| Some(responder.filler())),
            None => queue.pop_front(),
        };
    }
    session.end();

    Ok(SessionResult {
        scenario_id,
        policy: kind,
        final_state: session.state.clone(),
        record: session.record.clone(),
        traces: session.traces,
        actions,
        t_goal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_names_round_trip() {
        for p in PolicyKind::ALL {
            assert_eq!(p.as_str().parse::<PolicyKind>().unwrap(), p);
        }
        assert!(matches!("oracle".parse::<PolicyKind>(), Err(Error::UnknownPolicy(_))));
    }
}
