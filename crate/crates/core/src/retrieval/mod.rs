//! Hybrid retrieval over an objectified knowledge base.
//!
//! Pipeline: exact cosine top-k over feature-hashed embeddings, then simple
//! path enumeration from objects anchored in the current state to every
//! coarse candidate, then the seven-term object rerank (which consumes the
//! path scores), then linear fusion of the three stage scores.

mod embed;
mod kb;
mod paths;
mod weights;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use embed::{cosine, embed, token_hash, token_slot, tokenize, DEFAULT_DIM, DEFAULT_SEED, HASH_NAME};
pub use kb::{KbManifest, KnowledgeBase, KnowledgeEdge, KnowledgeObject, ObjectKind};
pub use paths::{enumerate_paths, path_cost, path_scores, PathEdge, ReasoningPath};
pub use weights::{FusionWeights, RerankWeights, SubScores};

use crate::belief::Belief;
use crate::model::{CurrentState, GoalState, ObjectId, SlotId};
use crate::state::{outstanding_risks, slot_resolved};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetrievalMode {
    Hybrid,
    /// Cosine over object text only; no rerank, no paths.
    ChunkOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrievalConfig {
    pub mode: RetrievalMode,
    pub alpha: RerankWeights,
    pub beta: FusionWeights,
    pub rho: f64,
    pub coarse_k: usize,
    pub max_path_len: usize,
    pub paths_per_object: usize,
    pub w_min: f64,
}

impl RetrievalConfig {
    pub fn from_manifest(m: &KbManifest) -> Self {
        Self {
            mode: RetrievalMode::Hybrid,
            alpha: m.alpha,
            beta: m.beta,
            rho: m.rho,
            coarse_k: m.coarse_k,
            max_path_len: m.max_path_len,
            paths_per_object: m.paths_per_object,
            w_min: 0.7,
        }
    }

    pub fn chunk_only(mut self) -> Self {
        self.mode = RetrievalMode::ChunkOnly;
        self.beta = FusionWeights::VECTOR_ONLY;
        self
    }
}

/// What a retrieval call looks at.
#[derive(Clone, Copy, Debug)]
pub struct QueryContext<'a> {
    pub cur: &'a CurrentState,
    pub goal: &'a GoalState,
    pub belief: &'a Belief,
    /// Unresolved slots the query is about (gap targets).
    pub focus: &'a [SlotId],
}

/// Tokens of every entry at weight >= 0.5 plus the focus slots. Focus
/// tokens are repeated until they carry at least as much mass as the state
/// tokens, so the query stays about the open need as the record grows.
pub fn query_bag(ctx: &QueryContext<'_>) -> Vec<String> {
    let mut bag = Vec::new();
    for e in ctx.cur.entries.values() {
        if e.weight >= 0.5 {
            bag.extend(tokenize(e.field_id.as_str()));
            bag.extend(tokenize(&e.value));
        }
    }
    let focus: Vec<String> = ctx.focus.iter().flat_map(|s| tokenize(s.as_str())).collect();
    if !focus.is_empty() {
        let reps = bag.len().div_ceil(focus.len()).max(1);
        for _ in 0..reps {
            bag.extend(focus.iter().cloned());
        }
    }
    bag
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredObject {
    pub object_id: ObjectId,
    pub score: f64,
}

fn sort_desc(v: &mut [(usize, f64)]) {
    // objects are stored in id order, so index order is id order
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

fn coarse_indices(bag: &[String], kb: &KnowledgeBase, k: usize, text_only: bool) -> Vec<(usize, f64)> {
    let q = embed(bag, kb.manifest.dim, kb.manifest.seed).ok();
    let mut scored: Vec<(usize, f64)> = kb
        .objects()
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let e = if text_only { &o.text_embedding } else { &o.embedding };
            let s = q.as_ref().and_then(|q| cosine(q, e).ok()).unwrap_or(0.0);
            (i, s)
        })
        .collect();
    sort_desc(&mut scored);
    scored.truncate(k.max(1));
    scored
}

/// Exact top-k by cosine, ties broken by ascending object id. An empty bag
/// scores every object 0.
pub fn coarse_retrieve(bag: &[String], kb: &KnowledgeBase, k: usize) -> Vec<ScoredObject> {
    coarse_indices(bag, kb, k, false)
        .into_iter()
        .map(|(i, score)| ScoredObject {
            object_id: kb.objects()[i].object_id.clone(),
            score,
        })
        .collect()
}

/// Per-call facts the object sub-scores need.
#[derive(Clone, Debug)]
pub struct RerankContext<'a> {
    pub query: QueryContext<'a>,
    pub w_min: f64,
    /// Hop distance to the nearest anchored object, by object id.
    pub anchor_distance: BTreeMap<ObjectId, usize>,
    /// Best path score among paths through each object.
    pub best_path: BTreeMap<ObjectId, f64>,
    outstanding_rules: BTreeSet<String>,
    outstanding_slots: BTreeSet<SlotId>,
    active_sections: BTreeSet<String>,
}

impl<'a> RerankContext<'a> {
    pub fn new(
        query: QueryContext<'a>,
        kb: &KnowledgeBase,
        best_path: BTreeMap<ObjectId, f64>,
        w_min: f64,
    ) -> Self {
        let anchors = anchor_positions(query.cur, kb);
        let anchor_distance = kb
            .hop_distances(&anchors)
            .into_iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (kb.objects()[i].object_id.clone(), d)))
            .collect();
        let mut outstanding_rules = BTreeSet::new();
        let mut outstanding_slots = BTreeSet::new();
        for r in outstanding_risks(query.cur, query.goal) {
            outstanding_rules.insert(r.rule_id.to_string());
            outstanding_slots.extend(r.unresolved_slots(query.cur).cloned());
        }
        let active_sections = query
            .cur
            .last_touched
            .iter()
            .filter_map(|s| query.goal.slot(s.as_str()).map(|g| g.section.clone()))
            .collect();
        Self {
            query,
            w_min,
            anchor_distance,
            best_path,
            outstanding_rules,
            outstanding_slots,
            active_sections,
        }
    }

    pub fn sub_scores(&self, obj: &KnowledgeObject) -> SubScores {
        let cur = self.query.cur;
        let goal = self.query.goal;
        let slots = obj.addressed_slots();
        let frac = |pred: &dyn Fn(&SlotId) -> bool| {
            if slots.is_empty() {
                0.0
            } else {
                slots.iter().filter(|s| pred(s)).count() as f64 / slots.len() as f64
            }
        };

        let field = {
            let mut of: BTreeSet<String> = slots.iter().map(|s| s.to_string()).collect();
            if let (Some(v), Some(s)) = (obj.field("value"), obj.primary_slot()) {
                of.insert(format!("{s}={v}"));
            }
            let cf: BTreeSet<String> = cur
                .entries
                .values()
                .filter(|e| e.weight >= 0.5)
                .flat_map(|e| [e.field_id.to_string(), format!("{}={}", e.field_id, e.value)])
                .collect();
            let union = of.union(&cf).count();
            if union == 0 {
                0.0
            } else {
                of.intersection(&cf).count() as f64 / union as f64
            }
        };

        let structural = match obj.field("section") {
            Some(sec) if slots.is_empty() => f64::from(u8::from(self.active_sections.contains(sec))),
            _ => frac(&|s| {
                goal.slot(s.as_str())
                    .is_some_and(|g| self.active_sections.contains(&g.section))
            }),
        };

        let graph = self
            .anchor_distance
            .get(&obj.object_id)
            .map_or(0.0, |d| 1.0 / (1.0 + *d as f64));

        let goal_distance = frac(&|s| {
            goal.slot(s.as_str()).is_some_and(|g| g.mandatory)
                && !slot_resolved(cur, s.as_str(), self.w_min)
        });

        let risk = {
            let discharges = obj
                .field_list("discharges")
                .into_iter()
                .chain(obj.field("rule"))
                .any(|r| self.outstanding_rules.contains(r));
            let closes_slot = slots.iter().any(|s| self.outstanding_slots.contains(s))
                && obj.field("rule").is_none();
            f64::from(u8::from(discharges || closes_slot))
        };

        let path = self.best_path.get(&obj.object_id).copied().unwrap_or(0.0);

        let state = if let Some(h) = obj.field("hypothesis") {
            let max = self
                .query
                .belief
                .probs
                .values()
                .copied()
                .fold(0.0, f64::max);
            if max > 0.0 {
                self.query.belief.prob(h) / max
            } else {
                0.0
            }
        } else {
            let req = obj.field_list("requires");
            if req.is_empty() {
                1.0
            } else {
                req.iter().map(|s| cur.weight(s).clamp(0.0, 1.0)).sum::<f64>() / req.len() as f64
            }
        };

        SubScores {
            field,
            structural,
            graph,
            goal: goal_distance,
            risk,
            path,
            state,
        }
    }
}

/// Composite object score and its parts.
pub fn rerank_score(ctx: &RerankContext<'_>, obj: &KnowledgeObject, w: &RerankWeights) -> (f64, SubScores) {
    let s = ctx.sub_scores(obj);
    (s.combine(w), s)
}

/// Objects addressing a slot that holds a weight-1.0 entry.
fn anchor_positions(cur: &CurrentState, kb: &KnowledgeBase) -> Vec<usize> {
    kb.objects()
        .iter()
        .enumerate()
        .filter(|(_, o)| o.addressed_slots().iter().any(|s| cur.weight(s.as_str()) >= 1.0))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedObject {
    pub object_id: ObjectId,
    pub vector_score: f64,
    pub object_score: f64,
    pub path_score: f64,
    pub fused_score: f64,
    pub sub_scores: SubScores,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    /// Sorted by fused score descending, ties by object id ascending.
    pub ranked: Vec<RankedObject>,
    /// Best-scoring paths through each ranked object.
    pub paths: BTreeMap<ObjectId, Vec<ReasoningPath>>,
}

impl RetrievalResult {
    pub fn top_ids(&self, k: usize) -> Vec<ObjectId> {
        self.ranked.iter().take(k).map(|r| r.object_id.clone()).collect()
    }

    /// Distinct paths across all objects, in (score desc, node order).
    pub fn all_paths(&self) -> Vec<ReasoningPath> {
        let mut seen = BTreeSet::new();
        let mut out: Vec<ReasoningPath> = Vec::new();
        for p in self.paths.values().flatten() {
            if seen.insert((p.nodes.clone(), p.edges.iter().map(|e| e.relation.clone()).collect::<Vec<_>>())) {
                out.push(p.clone());
            }
        }
        out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.nodes.cmp(&b.nodes)));
        out
    }
}

pub fn retrieve(query: QueryContext<'_>, kb: &KnowledgeBase, cfg: &RetrievalConfig) -> RetrievalResult {
    let bag = query_bag(&query);
    let text_only = cfg.mode == RetrievalMode::ChunkOnly;
    let coarse = coarse_indices(&bag, kb, cfg.coarse_k, text_only);

    if text_only {
        return RetrievalResult {
            ranked: coarse
                .into_iter()
                .map(|(i, s)| RankedObject {
                    object_id: kb.objects()[i].object_id.clone(),
                    vector_score: s,
                    object_score: 0.0,
                    path_score: 0.0,
                    fused_score: cfg.beta.fuse(s, 0.0, 0.0),
                    sub_scores: SubScores::default(),
                })
                .collect(),
            paths: BTreeMap::new(),
        };
    }

    let candidates: BTreeSet<ObjectId> = coarse
        .iter()
        .map(|(i, _)| kb.objects()[*i].object_id.clone())
        .collect();
    let sources: Vec<ObjectId> = anchor_positions(query.cur, kb)
        .into_iter()
        .map(|i| kb.objects()[i].object_id.clone())
        .collect();
    let mut paths = enumerate_paths(kb, &sources, &candidates, cfg.max_path_len);
    let costs: Vec<f64> = paths.iter().map(|p| path_cost(p, cfg.rho)).collect();
    for ((p, c), s) in paths.iter_mut().zip(&costs).zip(path_scores(&costs)) {
        p.cost = *c;
        p.score = s;
    }

    let mut best_path: BTreeMap<ObjectId, f64> = BTreeMap::new();
    let mut per_object: BTreeMap<ObjectId, Vec<ReasoningPath>> = BTreeMap::new();
    for p in &paths {
        for n in &p.nodes {
            if !candidates.contains(n) {
                continue;
            }
            let best = best_path.entry(n.clone()).or_insert(0.0);
            *best = best.max(p.score);
            per_object.entry(n.clone()).or_default().push(p.clone());
        }
    }
    for list in per_object.values_mut() {
        list.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.nodes.cmp(&b.nodes)));
        list.dedup_by(|a, b| a.nodes == b.nodes && a.edges == b.edges);
        list.truncate(cfg.paths_per_object);
    }

    let ctx = RerankContext::new(query, kb, best_path, cfg.w_min);
    let mut ranked: Vec<RankedObject> = coarse
        .into_iter()
        .map(|(i, vector_score)| {
            let obj = &kb.objects()[i];
            let (object_score, sub_scores) = rerank_score(&ctx, obj, &cfg.alpha);
            let path_score = ctx.best_path.get(&obj.object_id).copied().unwrap_or(0.0);
            RankedObject {
                object_id: obj.object_id.clone(),
                vector_score,
                object_score,
                path_score,
                fused_score: cfg.beta.fuse(vector_score, object_score, path_score),
                sub_scores,
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.fused_score
            .total_cmp(&a.fused_score)
            .then_with(|| a.object_id.cmp(&b.object_id))
    });
    RetrievalResult {
        ranked,
        paths: per_object,
    }
}
