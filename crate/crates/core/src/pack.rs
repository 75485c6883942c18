//! Scenario packs: the on-disk bundle of scripts, goals, models, gold audits
//! and retrieval query points.
//!
//! Layout under the pack directory:
//!
//! ```text
//! manifest.json          PackManifest
//! schema.json            RecordSchema
//! rules.jsonl            ExtractionRule per line
//! queries.jsonl          QueryPoint per line
//! goals/<family>.json    GoalState
//! scenarios/<id>.json    Scenario
//! scripts/<id>.jsonl     DialogueTurn per line
//! gold/<id>.json         GoldAudit
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::belief::{Belief, Hypothesis, LikelihoodModel, OutcomeModel};
use crate::emr::{Assertion, RecordSchema};
use crate::error::{Error, Result};
use crate::extraction::{DialogueTurn, ExtractionRule};
use crate::io;
use crate::model::{GoalState, HypothesisId, ObjectId, SlotId, StateLabel, Temporality, Verb};
use crate::planner::EngineConfig;
use crate::retrieval::KnowledgeBase;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackCounts {
    pub scenarios: usize,
    pub gold_items: usize,
    pub risk_items: usize,
    pub structural_slots: usize,
    pub queries: usize,
    pub risk_critical_queries: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackManifest {
    pub v: u32,
    pub pack_id: String,
    #[serde(default)]
    pub description: String,
    pub scenarios: Vec<String>,
    pub counts: PackCounts,
    #[serde(default)]
    pub config: EngineConfig,
    /// Metric name -> minimum acceptable value for the full framework.
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    /// How the query set over-represents risk-critical states.
    #[serde(default)]
    pub enrichment: String,
    /// Value canonicalization applied before gold matching (lowercased keys).
    #[serde(default)]
    pub value_aliases: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistItem {
    pub verb: Verb,
    pub slot: SlotId,
}

/// A scripted reply keyed by the slot the system action targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScriptedReply {
    pub slot: SlotId,
    pub turn: DialogueTurn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub scenario_id: String,
    pub family: String,
    #[serde(default)]
    pub title: String,
    pub hypotheses: Vec<Hypothesis>,
    #[serde(default)]
    pub likelihoods: LikelihoodModel,
    #[serde(default)]
    pub outcomes: OutcomeModel,
    /// Fixed action order used by the template baseline.
    #[serde(default)]
    pub checklist: Vec<ChecklistItem>,
    /// Replies a simulated patient gives when asked about a slot.
    #[serde(default)]
    pub responses: Vec<ScriptedReply>,
    /// Reply used when the script is exhausted and no scripted reply fits.
    #[serde(default = "default_filler")]
    pub filler_text: String,
}

fn default_filler() -> String {
    "I'm not sure.".to_owned()
}

impl Scenario {
    pub fn prior(&self) -> Result<Belief> {
        Belief::from_hypotheses(&self.hypotheses)
    }

    pub fn hypothesis_ids(&self) -> Vec<HypothesisId> {
        self.hypotheses.iter().map(|h| h.hypothesis_id.clone()).collect()
    }
}

/// One audited information item.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldItem {
    pub slot: SlotId,
    pub value: String,
    pub status: StateLabel,
    pub temporality: Temporality,
    pub assertion: Assertion,
    #[serde(default)]
    pub risk_flag: bool,
    /// Counts toward structural completeness.
    #[serde(default)]
    pub structural: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldAudit {
    pub scenario_id: String,
    pub items: Vec<GoldItem>,
}

impl GoldAudit {
    pub fn risk_items(&self) -> impl Iterator<Item = &GoldItem> {
        self.items.iter().filter(|i| i.risk_flag)
    }

    pub fn structural_items(&self) -> impl Iterator<Item = &GoldItem> {
        self.items.iter().filter(|i| i.structural)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub slot: SlotId,
    pub value: String,
    pub state: StateLabel,
}

/// A retrieval query: an unresolved state and the objects and paths that
/// should come back for it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryPoint {
    pub query_id: String,
    pub scenario_id: String,
    /// Query-point type, e.g. `symptom_duration_follow_up`.
    pub kind: String,
    #[serde(default)]
    pub prompt: String,
    pub state: Vec<SnapshotEntry>,
    #[serde(default)]
    pub last_touched: Vec<SlotId>,
    pub focus: Vec<SlotId>,
    /// The first entry is the primary object.
    pub gold_objects: Vec<ObjectId>,
    #[serde(default)]
    pub gold_paths: Vec<Vec<ObjectId>>,
    pub risk_critical: bool,
}

/// Everything a session needs for one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseSpec {
    pub scenario: Scenario,
    pub goal: GoalState,
    pub schema: RecordSchema,
    pub rules: Vec<ExtractionRule>,
    pub config: EngineConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioPack {
    pub manifest: PackManifest,
    pub schema: RecordSchema,
    pub rules: Vec<ExtractionRule>,
    pub queries: Vec<QueryPoint>,
    pub goals: BTreeMap<String, GoalState>,
    pub scenarios: BTreeMap<String, Scenario>,
    pub scripts: BTreeMap<String, Vec<DialogueTurn>>,
    pub gold: BTreeMap<String, GoldAudit>,
}

impl ScenarioPack {
    /// Read a pack directory. Structural problems are reported by
    /// [`ScenarioPack::problems`], not here.
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: PackManifest = io::read_json(&dir.join("manifest.json"))?;
        let schema = io::read_json(&dir.join("schema.json"))?;
        let rules = io::read_jsonl(&dir.join("rules.jsonl"))?;
        let queries = io::read_jsonl(&dir.join("queries.jsonl"))?;
        let mut scenarios = BTreeMap::new();
        let mut scripts = BTreeMap::new();
        let mut gold = BTreeMap::new();
        let mut goals = BTreeMap::new();
        for id in &manifest.scenarios {
            let s: Scenario = io::read_json(&dir.join("scenarios").join(format!("{id}.json")))?;
            if !goals.contains_key(&s.family) {
                let g: GoalState = io::read_json(&dir.join("goals").join(format!("{}.json", s.family)))?;
                goals.insert(s.family.clone(), g);
            }
            scenarios.insert(id.clone(), s);
            scripts.insert(id.clone(), io::read_jsonl(&dir.join("scripts").join(format!("{id}.jsonl")))?);
            gold.insert(id.clone(), io::read_json(&dir.join("gold").join(format!("{id}.json")))?);
        }
        Ok(Self {
            manifest,
            schema,
            rules,
            queries,
            goals,
            scenarios,
            scripts,
            gold,
        })
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        io::write_file(&dir.join("manifest.json"), &io::to_json_pretty(&self.manifest))?;
        io::write_file(&dir.join("schema.json"), &io::to_json_pretty(&self.schema))?;
        io::write_file(&dir.join("rules.jsonl"), &io::to_jsonl(&self.rules))?;
        io::write_file(&dir.join("queries.jsonl"), &io::to_jsonl(&self.queries))?;
        for (family, g) in &self.goals {
            io::write_file(&dir.join("goals").join(format!("{family}.json")), &io::to_json_pretty(g))?;
        }
        for (id, s) in &self.scenarios {
            io::write_file(&dir.join("scenarios").join(format!("{id}.json")), &io::to_json_pretty(s))?;
        }
        for (id, turns) in &self.scripts {
            io::write_file(&dir.join("scripts").join(format!("{id}.jsonl")), &io::to_jsonl(turns))?;
        }
        for (id, g) in &self.gold {
            io::write_file(&dir.join("gold").join(format!("{id}.json")), &io::to_json_pretty(g))?;
        }
        Ok(())
    }

    pub fn scenario(&self, id: &str) -> Result<&Scenario> {
        self.scenarios
            .get(id)
            .ok_or_else(|| Error::UnknownScenario(id.to_owned()))
    }

    pub fn script(&self, id: &str) -> Result<&[DialogueTurn]> {
        self.scripts
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownScenario(id.to_owned()))
    }

    pub fn gold_for(&self, id: &str) -> Result<&GoldAudit> {
        self.gold
            .get(id)
            .ok_or_else(|| Error::UnknownScenario(id.to_owned()))
    }

    /// Goal template of the scenario's family, narrowed to its activation.
    pub fn goal_for(&self, id: &str) -> Result<GoalState> {
        let s = self.scenario(id)?;
        let g = self
            .goals
            .get(&s.family)
            .ok_or_else(|| Error::PackInvalid(format!("no goal template for family {}", s.family)))?;
        Ok(g.activated_for(id))
    }

    pub fn case(&self, id: &str) -> Result<CaseSpec> {
        Ok(CaseSpec {
            scenario: self.scenario(id)?.clone(),
            goal: self.goal_for(id)?,
            schema: self.schema.clone(),
            rules: self.rules.clone(),
            config: self.manifest.config.clone(),
        })
    }

    pub fn canonical_value(&self, v: &str) -> String {
        let v = v.trim().to_lowercase();
        self.manifest.value_aliases.get(&v).cloned().unwrap_or(v)
    }

    /// Counts measured from the loaded content.
    pub fn measured_counts(&self) -> PackCounts {
        let items = self.gold.values().flat_map(|g| g.items.iter());
        PackCounts {
            scenarios: self.scenarios.len(),
            gold_items: items.clone().count(),
            risk_items: items.clone().filter(|i| i.risk_flag).count(),
            structural_slots: items.filter(|i| i.structural).count(),
            queries: self.queries.len(),
            risk_critical_queries: self.queries.iter().filter(|q| q.risk_critical).count(),
        }
    }

    /// Every structural problem found, empty when the pack is clean. When a
    /// knowledge base is given, object references are checked against it.
    pub fn problems(&self, kb: Option<&KnowledgeBase>) -> Vec<String> {
        let mut p = Vec::new();
        let measured = self.measured_counts();
        if measured != self.manifest.counts {
            p.push(format!(
                "manifest counts {:?} differ from contents {:?}",
                self.manifest.counts, measured
            ));
        }
        if let Err(e) = self.manifest.config.lambda.validate() {
            p.push(e.to_string());
        }
        let known_slot = |s: &SlotId| self.schema.slots.contains_key(s);
        let sections: BTreeSet<&str> = self.schema.sections.iter().map(String::as_str).collect();
        for (slot, sec) in &self.schema.slots {
            if !sections.contains(sec.as_str()) {
                p.push(format!("schema slot {slot} maps to undeclared section {sec}"));
            }
        }
        for r in &self.rules {
            if !known_slot(&r.emits.field_id) {
                p.push(format!("extraction rule {} emits unknown slot {}", r.rule_id, r.emits.field_id));
            }
        }
        for (family, g) in &self.goals {
            for s in &g.required_slots {
                if !known_slot(&s.slot) {
                    p.push(format!("goal {family}: slot {} not in schema", s.slot));
                } else if self.schema.section_of(s.slot.as_str()) != Some(s.section.as_str()) {
                    p.push(format!("goal {family}: slot {} section {} disagrees with schema", s.slot, s.section));
                }
            }
            for r in &g.risk_rules {
                for s in r.referenced_slots() {
                    if !known_slot(s) {
                        p.push(format!("goal {family}: rule {} references unknown slot {s}", r.rule_id));
                    }
                }
                if !(r.severity > 0.0) {
                    p.push(format!("goal {family}: rule {} has non-positive severity", r.rule_id));
                }
            }
            for (sc, slots) in &g.activation {
                if !self.scenarios.contains_key(sc) {
                    p.push(format!("goal {family}: activation for unknown scenario {sc}"));
                }
                for s in slots {
                    if g.slot(s.as_str()).is_none() {
                        p.push(format!("goal {family}: activation of {sc} names non-goal slot {s}"));
                    }
                }
            }
        }
        for (id, s) in &self.scenarios {
            if s.scenario_id != *id {
                p.push(format!("scenario file {id} declares id {}", s.scenario_id));
            }
            if !self.goals.contains_key(&s.family) {
                p.push(format!("scenario {id}: unknown family {}", s.family));
            }
            match s.prior() {
                Ok(_) => {}
                Err(e) => p.push(format!("scenario {id}: prior: {e}")),
            }
            if let Err(e) = s.likelihoods.validate() {
                p.push(format!("scenario {id}: {e}"));
            }
            if let Err(e) = s.outcomes.validate(&s.hypothesis_ids()) {
                p.push(format!("scenario {id}: {e}"));
            }
            for slot in s.checklist.iter().map(|c| &c.slot).chain(s.responses.iter().map(|r| &r.slot)) {
                if !known_slot(slot) {
                    p.push(format!("scenario {id}: unknown slot {slot}"));
                }
            }
            for r in &s.responses {
                p.extend(turn_problems(&format!("scenario {id} reply {}", r.slot), &r.turn, &known_slot));
            }
            match self.scripts.get(id) {
                None => p.push(format!("scenario {id}: no script")),
                Some(turns) if turns.is_empty() => p.push(format!("scenario {id}: empty script")),
                Some(turns) => {
                    for (i, t) in turns.iter().enumerate() {
                        p.extend(turn_problems(&format!("script {id} line {}", i + 1), t, &known_slot));
                    }
                }
            }
            match self.gold.get(id) {
                None => p.push(format!("scenario {id}: no gold audit")),
                Some(g) => {
                    if g.scenario_id != *id {
                        p.push(format!("gold {id} declares scenario {}", g.scenario_id));
                    }
                    let mut seen = BTreeSet::new();
                    for item in &g.items {
                        if !known_slot(&item.slot) {
                            p.push(format!("gold {id}: unknown slot {}", item.slot));
                        }
                        if !seen.insert(&item.slot) {
                            p.push(format!("gold {id}: duplicate slot {}", item.slot));
                        }
                    }
                }
            }
        }
        let mut qids = BTreeSet::new();
        for q in &self.queries {
            if !qids.insert(&q.query_id) {
                p.push(format!("duplicate query {}", q.query_id));
            }
            if !self.scenarios.contains_key(&q.scenario_id) {
                p.push(format!("query {}: unknown scenario {}", q.query_id, q.scenario_id));
            }
            if q.gold_objects.is_empty() {
                p.push(format!("query {}: no gold objects", q.query_id));
            }
            for s in q.state.iter().map(|e| &e.slot).chain(&q.focus).chain(&q.last_touched) {
                if !known_slot(s) {
                    p.push(format!("query {}: unknown slot {s}", q.query_id));
                }
            }
            if let Some(kb) = kb {
                for o in q.gold_objects.iter().chain(q.gold_paths.iter().flatten()) {
                    if kb.get(o.as_str()).is_none() {
                        p.push(format!("query {}: unknown object {o}", q.query_id));
                    }
                }
            }
        }
        p
    }

    pub fn validate(&self, kb: Option<&KnowledgeBase>) -> Result<()> {
        let p = self.problems(kb);
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::PackInvalid(p.join("; ")))
        }
    }
}

fn turn_problems(what: &str, t: &DialogueTurn, known_slot: &dyn Fn(&SlotId) -> bool) -> Vec<String> {
    let mut p = Vec::new();
    let len = t.char_len();
    for g in t.gold_events.iter().flatten() {
        if !known_slot(&g.field_id) {
            p.push(format!("{what}: unknown slot {}", g.field_id));
        }
        if !(g.char_start < g.char_end && g.char_end <= len) {
            p.push(format!("{what}: span {}..{} outside text of length {len}", g.char_start, g.char_end));
        }
    }
    p
}
