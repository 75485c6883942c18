//! Pilot metrics and the benchmark runner behind the dialogue and retrieval
//! reports.

mod metrics;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use metrics::{
    coverage, first_hit_rank, mrr_at_k, ndcg, ndcg_at_k, object_hit_rate, path_hit_rate, recall_at_k,
    redundancy, risk_recall, status_compatible, structural_completeness, t_goal, Matcher, QueryOutcome, Ratio,
};

use crate::belief::update_belief;
use crate::error::{Error, Result};
use crate::model::{CurrentState, EvidenceSpan, Role, StatefulEvent, Temporality, TraceId};
use crate::pack::{QueryPoint, ScenarioPack};
use crate::planner::{run_policy, PolicyKind, SessionResult};
use crate::retrieval::{retrieve, KnowledgeBase, QueryContext, RetrievalConfig, RetrievalMode};
use crate::state::apply_events;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub scenario_id: String,
    pub coverage: Ratio,
    pub risk_recall: Ratio,
    pub structural: Ratio,
    pub redundancy: Option<Ratio>,
    pub t_goal: Option<u32>,
    pub turns: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DialogueRow {
    pub policy: PolicyKind,
    pub coverage: Ratio,
    pub risk_recall: Ratio,
    pub structural: Ratio,
    /// Pooled over all proposed actions; `None` for the non-interactive
    /// baseline.
    pub redundancy: Option<Ratio>,
    /// Sum of per-case T_goal over the cases that reached the goal, and their
    /// count. `None` for the non-interactive baseline.
    pub t_goal: Option<Ratio>,
    pub t_goal_dnf: usize,
    pub cases: Vec<CaseRow>,
}

impl DialogueRow {
    pub fn t_goal_mean(&self) -> Option<f64> {
        self.t_goal.filter(|r| r.den > 0).map(|r| r.value())
    }
}

/// Score one finished session against its gold audit.
pub fn score_case(pack: &ScenarioPack, result: &SessionResult) -> Result<CaseRow> {
    let gold = pack.gold_for(&result.scenario_id)?;
    let m = Matcher::new(&pack.manifest.value_aliases);
    let interactive = result.policy.is_interactive();
    Ok(CaseRow {
        scenario_id: result.scenario_id.clone(),
        coverage: coverage(gold, &result.record, &m)?,
        risk_recall: risk_recall(gold, &result.record, &result.risk_targeted_slots(), &m)?,
        structural: structural_completeness(gold, &result.record, &m)?,
        redundancy: if interactive { redundancy(&result.actions) } else { None },
        t_goal: if interactive { result.t_goal } else { None },
        turns: result.traces.len(),
    })
}

fn aggregate(policy: PolicyKind, cases: Vec<CaseRow>) -> DialogueRow {
    let sum = |f: fn(&CaseRow) -> Ratio| cases.iter().map(f).fold(Ratio::default(), std::ops::Add::add);
    let interactive = policy.is_interactive();
    let finished: Vec<u32> = cases.iter().filter_map(|c| c.t_goal).collect();
    DialogueRow {
        policy,
        coverage: sum(|c| c.coverage),
        risk_recall: sum(|c| c.risk_recall),
        structural: sum(|c| c.structural),
        redundancy: interactive.then(|| {
            cases
                .iter()
                .filter_map(|c| c.redundancy)
                .fold(Ratio::default(), std::ops::Add::add)
        }),
        t_goal: interactive.then(|| Ratio::new(finished.iter().map(|&t| u64::from(t)).sum(), finished.len() as u64)),
        t_goal_dnf: if interactive { cases.len() - finished.len() } else { 0 },
        cases,
    }
}

/// Run one policy over every scripted case.
pub fn run_dialogues(pack: &ScenarioPack, kb: &Arc<KnowledgeBase>, policy: PolicyKind) -> Result<(DialogueRow, Vec<SessionResult>)> {
    let mut cases = Vec::new();
    let mut results = Vec::new();
    for id in pack.scenarios.keys() {
        let case = Arc::new(pack.case(id)?);
        let r = run_policy(case, Arc::clone(kb), pack.script(id)?, policy)?;
        cases.push(score_case(pack, &r)?);
        results.push(r);
    }
    Ok((aggregate(policy, cases), results))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRow {
    pub mode: RetrievalMode,
    pub recall: Ratio,
    pub mrr: f64,
    pub ndcg: f64,
    pub object_hit: Ratio,
    pub path_hit: Ratio,
    /// Recall over the risk-critical subset only.
    pub risk_critical_recall: Ratio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub k: usize,
    pub k_hit: usize,
    pub queries: usize,
    pub risk_critical: usize,
    pub rows: Vec<RetrievalRow>,
}

/// The state a query point describes, as if its entries arrived in one turn.
pub fn query_state(q: &QueryPoint) -> CurrentState {
    let events = query_events(q);
    let mut cur = apply_events(&CurrentState::new(), &events, 0, &Default::default());
    if !q.last_touched.is_empty() {
        cur.last_touched = q.last_touched.iter().cloned().collect();
    }
    cur
}

fn query_events(q: &QueryPoint) -> Vec<StatefulEvent> {
    q.state
        .iter()
        .enumerate()
        .map(|(i, e)| StatefulEvent {
            field_id: e.slot.clone(),
            value: e.value.clone(),
            state: e.state,
            temporality: Temporality::Present,
            role: Role::Patient,
            evidence: EvidenceSpan {
                turn_index: 0,
                char_start: 0,
                char_end: 1,
                speaker: Role::Patient,
            },
            confidence: 1.0,
            trace_id: TraceId::for_event(0, i),
        })
        .collect()
}

/// Run every query point through one retrieval configuration.
pub fn query_outcomes(pack: &ScenarioPack, kb: &KnowledgeBase, cfg: &RetrievalConfig) -> Result<Vec<QueryOutcome>> {
    let mut goals = BTreeMap::new();
    let mut out = Vec::with_capacity(pack.queries.len());
    for q in &pack.queries {
        if !goals.contains_key(&q.scenario_id) {
            goals.insert(q.scenario_id.clone(), pack.goal_for(&q.scenario_id)?);
        }
        let goal = &goals[&q.scenario_id];
        let scenario = pack.scenario(&q.scenario_id)?;
        let cur = query_state(q);
        let belief = update_belief(&scenario.prior()?, &query_events(q), &scenario.likelihoods, &Default::default())?;
        let ctx = QueryContext {
            cur: &cur,
            goal,
            belief: &belief,
            focus: &q.focus,
        };
        let r = retrieve(ctx, kb, cfg);
        out.push(QueryOutcome {
            query_id: q.query_id.clone(),
            ranked: r.top_ids(r.ranked.len()),
            paths: r.all_paths().into_iter().map(|p| p.nodes).collect(),
            gold_objects: q.gold_objects.clone(),
            gold_paths: q.gold_paths.clone(),
            risk_critical: q.risk_critical,
        });
    }
    Ok(out)
}

pub fn retrieval_row(mode: RetrievalMode, qs: &[QueryOutcome], k: usize, k_hit: usize) -> RetrievalRow {
    let risky: Vec<QueryOutcome> = qs.iter().filter(|q| q.risk_critical).cloned().collect();
    RetrievalRow {
        mode,
        recall: recall_at_k(qs, k),
        mrr: mrr_at_k(qs, k),
        ndcg: ndcg_at_k(qs, k),
        object_hit: object_hit_rate(qs, k_hit),
        path_hit: path_hit_rate(qs),
        risk_critical_recall: recall_at_k(&risky, k),
    }
}

/// Chunk-only and hybrid rows over the pack's query points.
pub fn bench_retrieval(pack: &ScenarioPack, kb: &KnowledgeBase, k: usize, k_hit: usize) -> Result<RetrievalReport> {
    if pack.queries.is_empty() {
        return Err(Error::EmptyGold("retrieval queries"));
    }
    if k == 0 || k_hit == 0 {
        return Err(Error::PackInvalid("cutoffs must be at least 1".into()));
    }
    let hybrid = RetrievalConfig::from_manifest(&kb.manifest);
    let chunk = hybrid.clone().chunk_only();
    let mut rows = Vec::new();
    for cfg in [chunk, hybrid] {
        let qs = query_outcomes(pack, kb, &cfg)?;
        rows.push(retrieval_row(cfg.mode, &qs, k, k_hit));
    }
    Ok(RetrievalReport {
        k,
        k_hit,
        queries: pack.queries.len(),
        risk_critical: pack.queries.iter().filter(|q| q.risk_critical).count(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PilotReport {
    pub v: u32,
    pub pack_id: String,
    pub dialogue: Vec<DialogueRow>,
    pub retrieval: RetrievalReport,
}

impl PilotReport {
    pub fn row(&self, p: PolicyKind) -> Option<&DialogueRow> {
        self.dialogue.iter().find(|r| r.policy == p)
    }

    /// Thresholds are minimums on the full framework's ratios, keyed by
    /// `coverage`, `risk_recall`, `structural_completeness`, `recall_at_k`,
    /// `object_hit_rate` or `path_hit_rate`; `redundancy` is a maximum.
    pub fn threshold_violations(&self, thresholds: &BTreeMap<String, f64>) -> Vec<String> {
        let ours = self.row(PolicyKind::FullFramework);
        let hybrid = self.retrieval.rows.iter().find(|r| r.mode == RetrievalMode::Hybrid);
        let mut out = Vec::new();
        for (name, &limit) in thresholds {
            let value = match name.as_str() {
                "coverage" => ours.map(|r| r.coverage.value()),
                "risk_recall" => ours.map(|r| r.risk_recall.value()),
                "structural_completeness" => ours.map(|r| r.structural.value()),
                "redundancy" => ours.and_then(|r| r.redundancy).map(|r| r.value()),
                "recall_at_k" => hybrid.map(|r| r.recall.value()),
                "object_hit_rate" => hybrid.map(|r| r.object_hit.value()),
                "path_hit_rate" => hybrid.map(|r| r.path_hit.value()),
                _ => {
                    out.push(format!("unknown threshold {name}"));
                    continue;
                }
            };
            let ok = match value {
                Some(v) if name == "redundancy" => v <= limit,
                Some(v) => v >= limit,
                None => false,
            };
            if !ok {
                out.push(format!("{name}: {value:?} violates {limit}"));
            }
        }
        out
    }
}

/// All four (or the requested) policies plus the retrieval comparison.
pub fn run_pilot(pack: &ScenarioPack, kb: &Arc<KnowledgeBase>, policies: &[PolicyKind], k: usize, k_hit: usize) -> Result<PilotReport> {
    pack.validate(Some(kb))?;
    let mut dialogue = Vec::new();
    for &p in policies {
        dialogue.push(run_dialogues(pack, kb, p)?.0);
    }
    Ok(PilotReport {
        v: REPORT_VERSION,
        pack_id: pack.manifest.pack_id.clone(),
        dialogue,
        retrieval: bench_retrieval(pack, kb, k, k_hit)?,
    })
}

fn render(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&width).enumerate() {
            if i == 0 {
                let _ = write!(s, "{c:<w$}");
            } else {
                let _ = write!(s, "  {c:>w$}");
            }
        }
        s.trim_end().to_owned() + "\n"
    };
    let mut out = line(headers.to_vec());
    out.push_str(&line(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

fn na(x: Option<String>) -> String {
    x.unwrap_or_else(|| "N/A".to_owned())
}

/// Method rows with the five dialogue metrics, then the raw counts.
pub fn dialogue_table(rows: &[DialogueRow]) -> String {
    let headers = [
        "Method",
        "Coverage (%)",
        "Risk Recall (%)",
        "Structural Completeness (%)",
        "Redundancy (%)",
        "T_goal",
    ];
    let main: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.policy.label().to_owned(),
                r.coverage.percent(),
                r.risk_recall.percent(),
                r.structural.percent(),
                na(r.redundancy.map(|x| x.percent())),
                // interactive but never finished: defined, just not reached
                na(r.t_goal.map(|t| if t.den > 0 { t.fixed(1) } else { "DNF".to_owned() })),
            ]
        })
        .collect();
    let counts: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.policy.label().to_owned(),
                r.coverage.to_string(),
                r.risk_recall.to_string(),
                r.structural.to_string(),
                na(r.redundancy.map(|x| x.to_string())),
                na(r.t_goal.map(|t| format!("{} reached, {} DNF", t.den, r.t_goal_dnf))),
            ]
        })
        .collect();
    let mut s = render(&headers, &main);
    s.push('\n');
    s.push_str(&render(&headers, &counts));
    s
}

/// Metric rows, chunk-only then hybrid columns.
pub fn retrieval_table(r: &RetrievalReport) -> String {
    let col = |m: RetrievalMode| r.rows.iter().find(|x| x.mode == m);
    let cells = |f: &dyn Fn(&RetrievalRow) -> String| -> Vec<String> {
        [RetrievalMode::ChunkOnly, RetrievalMode::Hybrid]
            .into_iter()
            .map(|m| col(m).map_or_else(|| "N/A".to_owned(), f))
            .collect()
    };
    let k = r.k;
    let mut rows = Vec::new();
    let mut push = |name: String, f: &dyn Fn(&RetrievalRow) -> String| {
        let mut row = vec![name];
        row.extend(cells(f));
        rows.push(row);
    };
    push(format!("Recall@{k}"), &|x| format!("{} ({})", x.recall.fixed(3), x.recall));
    push(format!("MRR@{k}"), &|x| format!("{:.3}", x.mrr));
    push(format!("nDCG@{k}"), &|x| format!("{:.3}", x.ndcg));
    push("Object hit rate".into(), &|x| format!("{} ({})", x.object_hit.fixed(2), x.object_hit));
    push("Path hit rate".into(), &|x| format!("{} ({})", x.path_hit.fixed(2), x.path_hit));
    push(format!("Risk-critical Recall@{k}"), &|x| {
        format!("{} ({})", x.risk_critical_recall.fixed(3), x.risk_critical_recall)
    });
    render(&["Metric", "Chunk-only RAG", "Hybrid Retrieval"], &rows)
}

pub fn pilot_table(r: &PilotReport) -> String {
    format!(
        "Pilot evaluation ({}; {} queries, {} risk-critical)\n\n{}\n{}",
        r.pack_id,
        r.retrieval.queries,
        r.retrieval.risk_critical,
        dialogue_table(&r.dialogue),
        retrieval_table(&r.retrieval)
    )
}
