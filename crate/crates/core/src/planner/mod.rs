//! One-step action selection: candidates from gaps, a seven-term utility,
//! argmax with a lexicographic tie-break.

mod engine;
mod policy;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use engine::{EngineConfig, Session, SessionStatus, TurnTrace};
pub use policy::{run_policy, PolicyKind, ProposedAction, Responder, SessionResult};

use crate::belief::{eig_for_outcomes, Belief, OutcomeModel};
use crate::error::{Error, Result};
use crate::model::{
    action_key, ActionCandidate, ActionId, CurrentState, GapKind, GapSignal, GoalState, SlotId,
    UtilityBreakdown, Verb,
};
use crate::retrieval::{KnowledgeBase, ObjectKind, RetrievalResult};

/// Non-negative weights of the seven utility terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityWeights {
    pub ig: f64,
    pub rr: f64,
    pub ps: f64,
    pub eg: f64,
    pub rp: f64,
    pub cl: f64,
    pub cb: f64,
}

impl Default for UtilityWeights {
    fn default() -> Self {
        Self {
            ig: 1.0,
            rr: 1.5,
            ps: 0.5,
            eg: 0.3,
            rp: 1.0,
            cl: 0.5,
            cb: 0.4,
        }
    }
}

impl UtilityWeights {
    pub const IG_ONLY: UtilityWeights = UtilityWeights {
        ig: 1.0,
        rr: 0.0,
        ps: 0.0,
        eg: 0.0,
        rp: 0.0,
        cl: 0.0,
        cb: 0.0,
    };

    pub fn as_array(&self) -> [f64; 7] {
        [self.ig, self.rr, self.ps, self.eg, self.rp, self.cl, self.cb]
    }

    pub fn scaled(&self, c: f64) -> Self {
        let [ig, rr, ps, eg, rp, cl, cb] = self.as_array().map(|x| x * c);
        Self { ig, rr, ps, eg, rp, cl, cb }
    }

    pub fn validate(&self) -> Result<()> {
        if self.as_array().iter().all(|x| x.is_finite() && *x >= 0.0) {
            Ok(())
        } else {
            Err(Error::PackInvalid("utility weights must be finite and non-negative".into()))
        }
    }
}

/// `λ1 IG + λ2 RR + λ3 PS + λ4 EG - λ5 RP - λ6 CL + λ7 CB`.
pub fn utility(c: &UtilityBreakdown, w: &UtilityWeights) -> f64 {
    w.ig * c.ig + w.rr * c.rr + w.ps * c.ps + w.eg * c.eg - w.rp * c.rp - w.cl * c.cl + w.cb * c.cb
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub n_max: usize,
    /// Turns back within which a repeated (verb, slot) counts as repetition.
    pub repeat_window: u32,
    /// Weight at which asking about a slot again counts as repetition.
    pub repeat_weight: f64,
    /// Question run length at which the burden term saturates.
    pub burden_run: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            n_max: 12,
            repeat_window: 3,
            repeat_weight: 0.7,
            burden_run: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuedAction {
    pub turn_index: u32,
    pub verb: Verb,
    pub target_slot: Option<SlotId>,
}

/// Actions proposed so far in a session.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionHistory {
    pub issued: Vec<IssuedAction>,
}

impl ActionHistory {
    pub fn push(&mut self, turn_index: u32, c: &ActionCandidate) {
        self.issued.push(IssuedAction {
            turn_index,
            verb: c.verb,
            target_slot: c.target_slot.clone(),
        });
    }

    pub fn issued_recently(&self, verb: Verb, slot: Option<&SlotId>, turn: u32, window: u32) -> bool {
        self.issued.iter().any(|a| {
            a.verb == verb && a.target_slot.as_ref() == slot && a.turn_index + window >= turn
        })
    }

    /// Length of the trailing run of question actions.
    pub fn question_run(&self) -> usize {
        self.issued.iter().rev().take_while(|a| a.verb.is_question()).count()
    }
}

/// Everything candidate generation and scoring read.
#[derive(Clone, Copy, Debug)]
pub struct PlanningContext<'a> {
    pub turn_index: u32,
    pub cur: &'a CurrentState,
    pub goal: &'a GoalState,
    pub belief: &'a Belief,
    pub outcomes: &'a OutcomeModel,
    pub gaps: &'a [GapSignal],
    pub retrieval: &'a RetrievalResult,
    pub kb: &'a KnowledgeBase,
    pub history: &'a ActionHistory,
    pub config: &'a PlannerConfig,
}

fn words(slot: &SlotId) -> String {
    slot.as_str().replace('_', " ")
}

pub fn prompt_for(verb: Verb, slot: Option<&SlotId>) -> String {
    let what = slot.map(words).unwrap_or_else(|| "the leading possibilities".into());
    match verb {
        Verb::Ask => format!("Can you tell me about {what}?"),
        Verb::Verify => format!("Can we confirm the {what} finding?"),
        Verb::Explain => format!("Let me explain how we are weighing {what}."),
        Verb::RecommendExam => format!("I recommend we obtain {what} now."),
        Verb::RecommendPlan => format!("I recommend we act on {what}."),
    }
}

/// The discharging object for a risk gap among the retrieved objects, if any.
fn discharging_object<'a>(ctx: &PlanningContext<'a>, rule: &str) -> Option<&'a crate::retrieval::KnowledgeObject> {
    ctx.retrieval
        .ranked
        .iter()
        .filter_map(|r| ctx.kb.get(r.object_id.as_str()))
        .find(|o| o.kind != ObjectKind::RiskRuleUnit && o.field_list("discharges").contains(&rule))
}

/// One candidate per gap (path-blocking gaps become an ask on the blocking
/// slot), deduplicated on (verb, slot), ordered by severity then gap
/// priority then slot, capped at `n_max`. Utilities are left at zero.
pub fn generate_candidates(ctx: &PlanningContext<'_>) -> Vec<ActionCandidate> {
    let mut gaps: Vec<&GapSignal> = ctx.gaps.iter().collect();
    gaps.sort_by(|a, b| {
        b.severity
            .total_cmp(&a.severity)
            .then(a.kind.priority().cmp(&b.kind.priority()))
            .then_with(|| a.slot_id.cmp(&b.slot_id))
            .then_with(|| a.source.cmp(&b.source))
    });

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for g in gaps {
        let (verb, slot) = match g.kind {
            GapKind::Information | GapKind::PathBlocking => (Verb::Ask, g.slot_id.clone()),
            GapKind::Evidence => (Verb::Verify, g.slot_id.clone()),
            GapKind::Differential => (Verb::Explain, None),
            GapKind::Risk => match discharging_object(ctx, &g.source) {
                Some(o) if o.kind == ObjectKind::ExamUnit => (Verb::RecommendExam, g.slot_id.clone()),
                Some(_) => (Verb::RecommendPlan, g.slot_id.clone()),
                None => continue,
            },
        };
        if !seen.insert((verb, slot.clone())) {
            continue;
        }
        out.push(ActionCandidate {
            action_id: ActionId::for_candidate(ctx.turn_index, out.len()),
            verb,
            prompt_text: prompt_for(verb, slot.as_ref()),
            target_slot: slot,
            addresses: g.kind,
            utility_components: UtilityBreakdown::default(),
            utility: 0.0,
        });
        if out.len() == ctx.config.n_max {
            break;
        }
    }
    out
}

/// The seven utility terms of one candidate.
pub fn components(c: &ActionCandidate, ctx: &PlanningContext<'_>) -> UtilityBreakdown {
    let slot = c.target_slot.as_ref();
    let n = ctx.belief.len();

    let ig = match ctx.outcomes.get(&action_key(c.verb, slot)) {
        Some(outcomes) if n > 1 => eig_for_outcomes(ctx.belief, outcomes) / (n as f64).ln(),
        _ => 0.0,
    };

    let rr = {
        let risks: Vec<&GapSignal> = ctx.gaps.iter().filter(|g| g.kind == GapKind::Risk).collect();
        let total: f64 = risks.iter().map(|g| g.severity).sum();
        if total > 0.0 && c.verb.closes_risk() {
            let hit: f64 = risks
                .iter()
                .filter(|g| {
                    slot.is_some_and(|s| {
                        ctx.goal
                            .risk_rules
                            .iter()
                            .find(|r| r.rule_id.as_str() == g.source)
                            .is_some_and(|r| r.unresolved_slots(ctx.cur).any(|u| u == s))
                    })
                })
                .map(|g| g.severity)
                .sum();
            hit / total
        } else {
            0.0
        }
    };

    let ps = slot.map_or(0.0, |s| {
        ctx.retrieval
            .paths
            .values()
            .flatten()
            .filter(|p| p.precondition.as_ref() == Some(s))
            .map(|p| p.score)
            .fold(0.0, f64::max)
    });

    let eg = f64::from(u8::from(c.verb == Verb::Explain && c.addresses == GapKind::Differential));

    let rp = {
        let satisfied = slot.is_some_and(|s| ctx.cur.weight(s.as_str()) >= ctx.config.repeat_weight);
        let repeated = ctx
            .history
            .issued_recently(c.verb, slot, ctx.turn_index, ctx.config.repeat_window);
        f64::from(u8::from(satisfied || repeated))
    };

    let cl = if c.verb.is_question() && ctx.config.burden_run > 0 {
        (ctx.history.question_run() as f64 / ctx.config.burden_run as f64).min(1.0)
    } else {
        0.0
    };

    let cb = f64::from(u8::from(
        matches!(c.verb, Verb::Verify | Verb::RecommendExam)
            && slot.is_some_and(|s| ctx.goal.is_risk_flagged(s.as_str())),
    ));

    UtilityBreakdown { ig, rr, ps, eg, rp, cl, cb }
}

/// Fill in components and utilities in place.
pub fn score_candidates(cands: &mut [ActionCandidate], ctx: &PlanningContext<'_>, w: &UtilityWeights) {
    for c in cands.iter_mut() {
        c.utility_components = components(c, ctx);
        c.utility = utility(&c.utility_components, w);
    }
}

/// Maximal utility, ties to the smallest action id.
pub fn select_action(cands: &[ActionCandidate]) -> Result<&ActionCandidate> {
    cands
        .iter()
        .min_by(|a, b| {
            b.utility
                .total_cmp(&a.utility)
                .then_with(|| a.action_id.cmp(&b.action_id))
        })
        .ok_or(Error::NoCandidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::KbManifest;

    fn cand(id: &str, u: f64) -> ActionCandidate {
        ActionCandidate {
            action_id: id.into(),
            verb: Verb::Ask,
            target_slot: None,
            prompt_text: String::new(),
            addresses: GapKind::Information,
            utility_components: UtilityBreakdown::default(),
            utility: u,
        }
    }

    #[test]
    fn utility_is_the_signed_weighted_sum() {
        let ones = UtilityWeights::IG_ONLY.scaled(0.0);
        assert_eq!(utility(&UtilityBreakdown::default(), &UtilityWeights::default()), 0.0);
        let all = UtilityWeights { ig: 1.0, rr: 1.0, ps: 1.0, eg: 1.0, rp: 1.0, cl: 1.0, cb: 1.0 };
        let c = UtilityBreakdown { ig: 0.5, rr: 0.2, ps: 0.1, eg: 0.0, rp: 0.3, cl: 0.1, cb: 0.05 };
        assert!((utility(&c, &all) - 0.45).abs() < 1e-12);
        assert_eq!(utility(&c, &ones), 0.0);
    }

    #[test]
    fn selection_tie_breaks_on_action_id() {
        let cs = [cand("a0001.01", 0.45), cand("a0001.00", 0.45)];
        assert_eq!(select_action(&cs).unwrap().action_id.as_str(), "a0001.00");
        let cs = [cand("a0001.00", 0.45), cand("a0001.01", 0.71)];
        assert_eq!(select_action(&cs).unwrap().action_id.as_str(), "a0001.01");
        assert!(matches!(select_action(&[]), Err(Error::NoCandidates)));
    }

    fn ctx_parts() -> (CurrentState, GoalState, Belief, OutcomeModel, RetrievalResult, KnowledgeBase, ActionHistory, PlannerConfig) {
        (
            CurrentState::new(),
            GoalState::default(),
            Belief::uniform(&["a", "b"]),
            OutcomeModel::default(),
            RetrievalResult::default(),
            KnowledgeBase::new(KbManifest::default(), vec![], vec![]).unwrap(),
            ActionHistory::default(),
            PlannerConfig::default(),
        )
    }

    fn info_gap(slot: &str) -> GapSignal {
        GapSignal {
            kind: GapKind::Information,
            slot_id: Some(slot.into()),
            severity: 1.0,
            rationale_trace: String::new(),
            source: "goal".into(),
        }
    }

    #[test]
    fn one_ask_per_information_gap_and_none_without_gaps() {
        let (cur, goal, b, om, r, kb, h, cfg) = ctx_parts();
        let gaps = [info_gap("symptom_duration")];
        let mut ctx = PlanningContext {
            turn_index: 3,
            cur: &cur,
            goal: &goal,
            belief: &b,
            outcomes: &om,
            gaps: &[],
            retrieval: &r,
            kb: &kb,
            history: &h,
            config: &cfg,
        };
        assert!(generate_candidates(&ctx).is_empty());
        ctx.gaps = &gaps;
        let c = generate_candidates(&ctx);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].verb, Verb::Ask);
        assert_eq!(c[0].target_slot.as_ref().unwrap().as_str(), "symptom_duration");
        assert_eq!(c[0].action_id.as_str(), "a0003.00");
    }

    #[test]
    fn candidates_are_capped() {
        let (cur, goal, b, om, r, kb, h, cfg) = ctx_parts();
        let gaps: Vec<GapSignal> = (0..30).map(|i| info_gap(&format!("s{i:02}"))).collect();
        let ctx = PlanningContext {
            turn_index: 0,
            cur: &cur,
            goal: &goal,
            belief: &b,
            outcomes: &om,
            gaps: &gaps,
            retrieval: &r,
            kb: &kb,
            history: &h,
            config: &cfg,
        };
        assert_eq!(generate_candidates(&ctx).len(), cfg.n_max);
    }

    #[test]
    fn history_terms() {
        let mut h = ActionHistory::default();
        let mut c = cand("a0000.00", 0.0);
        c.target_slot = Some("x".into());
        h.push(0, &c);
        h.push(1, &c);
        assert_eq!(h.question_run(), 2);
        assert!(h.issued_recently(Verb::Ask, Some(&"x".into()), 4, 3));
        assert!(!h.issued_recently(Verb::Ask, Some(&"x".into()), 5, 3));
        assert!(!h.issued_recently(Verb::Verify, Some(&"x".into()), 2, 3));
    }
}
