//! Writes the bundled pilot pack and knowledge base.
//!
//! ```text
//! cargo run -p inquiry-core --example author_pilot_pack -- [OUT_DIR]
//! ```
//!
//! `OUT_DIR` defaults to the workspace root; the pack lands in
//! `OUT_DIR/packs/pilot` and the knowledge base in `OUT_DIR/kb/pilot`.
//! Output is deterministic: query sampling uses a fixed ChaCha seed.

mod content;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use inquiry_core::belief::{Hypothesis, LikelihoodEntry, LikelihoodModel, Outcome, OutcomeModel};
use inquiry_core::emr::{Assertion, RecordSchema};
use inquiry_core::extraction::{DialogueTurn, EventTemplate, ExtractionRule, GoldAnnotation};
use inquiry_core::model::{
    action_key, GoalSlot, GoalState, RiskCondition, RiskRule, Role, SlotId, StateLabel, Temporality, Verb,
};
use inquiry_core::pack::{
    ChecklistItem, GoldAudit, GoldItem, PackCounts, PackManifest, QueryPoint, Scenario, ScenarioPack,
    ScriptedReply, SnapshotEntry,
};
use inquiry_core::planner::EngineConfig;
use inquiry_core::retrieval::{KbManifest, KnowledgeBase, KnowledgeEdge, KnowledgeObject, ObjectKind};

use content::{Family, Item, Spec, Src, CATALOG, DISTRACTORS, SECTIONS};

const QUERY_SEED: u64 = 17;
const QUERIES_PER_SCENARIO: usize = 30;
const RISK_QUERIES_PER_SCENARIO: usize = 12;

fn object_id(slot: &str) -> String {
    let def = CATALOG.iter().find(|d| d.slot == slot).expect("catalogued slot");
    if def.section == "Plan" {
        format!("exam.{slot}")
    } else {
        format!("obj.{slot}")
    }
}

fn reply_turn(speaker: Role, slot: &str, value: &str, state: StateLabel, temporality: Temporality, text: &str) -> DialogueTurn {
    DialogueTurn::new(0, speaker, text).with_gold(vec![GoldAnnotation {
        field_id: slot.into(),
        value: value.to_owned(),
        state,
        temporality,
        role: Some(speaker),
        char_start: 0,
        char_end: text.chars().count(),
        confidence: None,
    }])
}

/// State an item has when it first enters the conversation.
fn spoken_state(item: &Item) -> StateLabel {
    match item.src {
        Src::Unsure(_) => StateLabel::Unconfirmed,
        _ => item.state,
    }
}

fn script(spec: &Spec) -> Vec<DialogueTurn> {
    (0..spec.speakers.len())
        .map(|t| {
            let mut text = String::new();
            let mut gold = Vec::new();
            for item in &spec.items {
                let (Src::Said(n) | Src::Unsure(n)) = item.src else { continue };
                if n != t {
                    continue;
                }
                if !text.is_empty() {
                    text.push(' ');
                }
                let start = text.chars().count();
                text.push_str(item.phrase);
                gold.push(GoldAnnotation {
                    field_id: item.slot.into(),
                    value: item.value.to_owned(),
                    state: spoken_state(item),
                    temporality: item.temporality,
                    role: Some(spec.speakers[t]),
                    char_start: start,
                    char_end: start + item.phrase.chars().count(),
                    confidence: None,
                });
            }
            assert!(!text.is_empty(), "{}: empty turn {t}", spec.id);
            DialogueTurn::new(t as u32, spec.speakers[t], text).with_gold(gold)
        })
        .collect()
}

/// Scripted answers for the scenario's own items, then denials for every
/// other slot the family template or its rules mention: findings outside the
/// case are absent and exams outside it were not done.
fn responses(spec: &Spec) -> Vec<ScriptedReply> {
    let mut out: Vec<ScriptedReply> = spec
        .items
        .iter()
        .filter(|i| !matches!(i.src, Src::Said(_)))
        .map(|i| {
            let speaker = if i.src == Src::Exam { Role::Report } else { Role::Patient };
            ScriptedReply {
                slot: i.slot.into(),
                turn: reply_turn(speaker, i.slot, i.value, i.state, i.temporality, i.reply),
            }
        })
        .collect();
    let own: BTreeSet<&str> = spec.items.iter().map(|i| i.slot).collect();
    // anything else the patient is asked about is denied, and any other test
    // is reported as not done
    for d in CATALOG {
        let slot = d.slot;
        if own.contains(slot) {
            continue;
        }
        let turn = if d.section == "Plan" {
            reply_turn(Role::Report, slot, "present", StateLabel::NotDone, Temporality::Present, "That test has not been done.")
        } else {
            reply_turn(Role::Patient, slot, "present", StateLabel::Negated, Temporality::Present, "No, nothing like that.")
        };
        out.push(ScriptedReply { slot: slot.into(), turn });
    }
    out
}

fn outcome(h: &[(&str, &str, f64); 3], p_first: f64, p_second: f64, p_third: f64) -> Vec<Outcome> {
    let ps = [p_first, p_second, p_third];
    ["positive", "negative"]
        .iter()
        .enumerate()
        .map(|(k, id)| Outcome {
            outcome_id: (*id).to_owned(),
            likelihoods: h
                .iter()
                .zip(ps)
                .map(|((hid, _, _), p)| ((*hid).into(), if k == 0 { p } else { 1.0 - p }))
                .collect(),
        })
        .collect()
}

/// Observation likelihoods: affirmed findings favour the working diagnosis,
/// decoys favour its competitor.
fn likelihoods(spec: &Spec) -> LikelihoodModel {
    let mut table = Vec::new();
    for item in &spec.items {
        if item.src == Src::Exam || Assertion::for_state(item.state) != Assertion::Positive {
            continue;
        }
        let favoured = usize::from(spec.decoys.contains(&item.slot));
        for (k, (hid, _, _)) in spec.hypotheses.iter().enumerate() {
            table.push(LikelihoodEntry {
                hypothesis: (*hid).into(),
                slot: item.slot.into(),
                value: item.value.to_owned(),
                state: None,
                likelihood: if k == favoured { 0.7 } else { 0.45 },
            });
        }
    }
    LikelihoodModel {
        table,
        default_likelihood: 0.5,
    }
}

/// Answer distributions for the actions the script can answer.
fn outcomes(spec: &Spec) -> OutcomeModel {
    let h = &spec.hypotheses;
    let mut actions = BTreeMap::new();
    for item in &spec.items {
        let (verb, p) = match item.src {
            Src::Said(_) => continue,
            Src::Unsure(_) => (Verb::Verify, (0.85, 0.3, 0.35)),
            Src::Elicit => (Verb::Ask, (0.8, 0.3, 0.4)),
            Src::Path => (Verb::Ask, (0.95, 0.1, 0.2)),
            Src::Exam => (Verb::RecommendExam, (0.9, 0.2, 0.15)),
        };
        let slot = SlotId::from(item.slot);
        actions.insert(action_key(verb, Some(&slot)), outcome(h, p.0, p.1, p.2));
    }
    OutcomeModel { actions }
}

fn family<'a>(families: &'a [Family], id: &str) -> &'a Family {
    families.iter().find(|f| f.id == id).expect("known family")
}

fn risk_rule(r: &content::RuleDef) -> RiskRule {
    RiskRule {
        rule_id: r.id.into(),
        description: r.description.to_owned(),
        antecedent: r
            .antecedent
            .iter()
            .map(|s| RiskCondition {
                slot: (*s).into(),
                value: None,
                states: None,
                min_weight: 0.5,
            })
            .collect(),
        unresolved_condition: r.discharge.iter().map(|s| (*s).into()).collect(),
        severity: r.severity,
        threshold: 0.7,
    }
}

/// Slots a scenario activates in its family template: every non-exam item.
fn activation(spec: &Spec) -> Vec<SlotId> {
    spec.items
        .iter()
        .filter(|i| i.src != Src::Exam)
        .map(|i| i.slot.into())
        .collect()
}

fn goals(families: &[Family], specs: &[Spec]) -> BTreeMap<String, GoalState> {
    families
        .iter()
        .map(|f| {
            let required_slots = f
                .slots
                .iter()
                .map(|s| GoalSlot {
                    slot: s.slot.into(),
                    section: CATALOG.iter().find(|d| d.slot == s.slot).expect("catalogued").section.to_owned(),
                    mandatory: s.mandatory,
                    risk_flag: s.risk,
                })
                .collect();
            let activation = specs
                .iter()
                .filter(|s| s.family == f.id)
                .map(|s| (s.id.to_owned(), activation(s)))
                .collect();
            let goal = GoalState {
                required_slots,
                risk_rules: f.rules.iter().map(risk_rule).collect(),
                activation,
            };
            (f.id.to_owned(), goal)
        })
        .collect()
}

/// Template order: mandatory slots by section, then the exams of every rule
/// whose antecedent lies inside the scenario's activated slots.
fn checklist(goal: &GoalState) -> Vec<ChecklistItem> {
    let mut out = Vec::new();
    for sec in SECTIONS {
        for g in goal.mandatory_slots().filter(|g| g.section == sec) {
            out.push(ChecklistItem {
                verb: Verb::Ask,
                slot: g.slot.clone(),
            });
        }
    }
    let mut seen = BTreeSet::new();
    for r in &goal.risk_rules {
        if r.antecedent.iter().all(|c| goal.slot(c.slot.as_str()).is_some()) {
            for s in &r.unresolved_condition {
                if seen.insert(s.clone()) {
                    out.push(ChecklistItem {
                        verb: Verb::RecommendExam,
                        slot: s.clone(),
                    });
                }
            }
        }
    }
    out
}

fn gold(spec: &Spec, goal: &GoalState) -> GoldAudit {
    let items: Vec<GoldItem> = spec
        .items
        .iter()
        .map(|i| GoldItem {
            slot: i.slot.into(),
            value: i.value.to_owned(),
            status: i.state,
            temporality: i.temporality,
            assertion: Assertion::for_state(i.state),
            risk_flag: goal.is_risk_flagged(i.slot),
            structural: i.src == Src::Exam || goal.slot(i.slot).is_some_and(|g| g.mandatory),
        })
        .collect();
    let count = |src: fn(Src) -> bool| spec.items.iter().filter(|i| src(i.src)).count();
    assert_eq!(items.len(), 18, "{}: item count", spec.id);
    assert_eq!(count(|s| matches!(s, Src::Said(_))), 10, "{}: volunteered items", spec.id);
    assert_eq!(count(|s| matches!(s, Src::Unsure(_))), 2, "{}: unconfirmed items", spec.id);
    assert_eq!(count(|s| s == Src::Elicit), 3, "{}: elicited items", spec.id);
    assert_eq!(count(|s| s == Src::Exam), 2, "{}: exam items", spec.id);
    assert_eq!(count(|s| s == Src::Path), 1, "{}: path items", spec.id);
    assert_eq!(items.iter().filter(|i| i.risk_flag).count(), 6, "{}: risk items", spec.id);
    assert_eq!(items.iter().filter(|i| i.structural).count(), 14, "{}: structural items", spec.id);
    for i in &spec.items {
        let mandatory = goal.slot(i.slot).is_some_and(|g| g.mandatory);
        match i.src {
            Src::Elicit => assert!(mandatory, "{}: elicited {} must be mandatory", spec.id, i.slot),
            Src::Unsure(_) | Src::Path => assert!(!mandatory, "{}: {} must be optional", spec.id, i.slot),
            _ => {}
        }
    }
    GoldAudit {
        scenario_id: spec.id.to_owned(),
        items,
    }
}

fn schema() -> RecordSchema {
    RecordSchema {
        sections: SECTIONS.iter().map(|s| (*s).to_owned()).collect(),
        slots: CATALOG.iter().map(|d| (d.slot.into(), d.section.to_owned())).collect(),
    }
}

fn extraction_rules() -> Vec<ExtractionRule> {
    let mut out = Vec::new();
    for d in CATALOG {
        for (k, trig) in d.triggers.iter().enumerate() {
            out.push(ExtractionRule {
                rule_id: format!("{}.{k}", d.slot),
                trigger: (*trig).to_owned(),
                emits: EventTemplate {
                    field_id: d.slot.into(),
                    value: "present".to_owned(),
                    state: StateLabel::ObservedResult,
                    temporality: Temporality::Present,
                },
                priority: 0,
                confidence: None,
            });
        }
    }
    out
}

fn edge(src: &str, dst: &str, relation: &str, cost: f64) -> KnowledgeEdge {
    KnowledgeEdge {
        src: src.into(),
        dst: dst.into(),
        relation: relation.to_owned(),
        cost,
    }
}

fn knowledge_base(families: &[Family], specs: &[Spec]) -> KnowledgeBase {
    let mut objects = Vec::new();
    let mut edges: BTreeMap<(String, String), KnowledgeEdge> = BTreeMap::new();
    let mut add_edge = |e: KnowledgeEdge| {
        edges.entry((e.src.to_string(), e.dst.to_string())).or_insert(e);
    };

    let rules: Vec<&content::RuleDef> = families.iter().flat_map(|f| f.rules.iter()).collect();
    for d in CATALOG {
        let id = object_id(d.slot);
        if d.section == "Plan" {
            let discharges: Vec<&str> = rules.iter().filter(|r| r.discharge.contains(&d.slot)).map(|r| r.id).collect();
            let requires: BTreeSet<&str> = rules
                .iter()
                .filter(|r| r.discharge.contains(&d.slot))
                .flat_map(|r| r.antecedent.iter().copied())
                .collect();
            let discharges = discharges.join(",");
            let requires = requires.into_iter().collect::<Vec<_>>().join(",");
            let mut fields = vec![("slot", d.slot), ("section", d.section)];
            if !discharges.is_empty() {
                fields.push(("discharges", &discharges));
                fields.push(("requires", &requires));
            }
            objects.push(KnowledgeObject::new(&id, ObjectKind::ExamUnit, d.text, &fields));
        } else {
            objects.push(KnowledgeObject::new(
                &id,
                ObjectKind::SymptomUnit,
                d.text,
                &[("slot", d.slot), ("section", d.section)],
            ));
        }
    }
    for r in &rules {
        let rid = format!("rule.{}", r.id);
        let requires = r.antecedent.join(",");
        objects.push(KnowledgeObject::new(
            &rid,
            ObjectKind::RiskRuleUnit,
            r.text,
            &[("rule", r.id), ("requires", &requires)],
        ));
        for a in r.antecedent {
            add_edge(edge(&object_id(a), &rid, "triggers", 0.5));
        }
        for x in r.discharge {
            add_edge(edge(&rid, &object_id(x), "discharged_by", 0.5));
        }
    }

    let mut dx: BTreeMap<&str, (&str, BTreeSet<&str>)> = BTreeMap::new();
    for s in specs {
        for (k, (hid, label, _)) in s.hypotheses.iter().enumerate() {
            let entry = dx.entry(hid).or_insert((label, BTreeSet::new()));
            if k == 0 {
                entry.1.extend(s.items.iter().filter(|i| i.src != Src::Exam && !s.decoys.contains(&i.slot)).filter(|i| Assertion::for_state(i.state) == Assertion::Positive).map(|i| i.slot));
            } else if k == 1 {
                entry.1.extend(s.decoys.iter().copied());
            }
        }
    }
    for (hid, (label, cues)) in &dx {
        let cues: Vec<&str> = cues.iter().copied().collect();
        let text = format!(
            "{label}: typical presentation includes {}.",
            cues.iter().map(|c| c.replace('_', " ")).collect::<Vec<_>>().join(", ")
        );
        let requires = cues.join(",");
        objects.push(KnowledgeObject::new(
            &format!("dx.{hid}"),
            ObjectKind::DiagnosisUnit,
            &text,
            &[("hypothesis", hid), ("requires", &requires)],
        ));
    }

    for s in specs {
        let chief = object_id(s.items[0].slot);
        let truth = format!("dx.{}", s.hypotheses[0].0);
        let rival = format!("dx.{}", s.hypotheses[1].0);
        for i in s.items.iter().skip(1) {
            match i.src {
                Src::Exam => add_edge(edge(&truth, &object_id(i.slot), "confirmed_by", 1.0)),
                Src::Path => {
                    add_edge(edge(&object_id(s.path_anchor), &object_id(i.slot), "refined_by", 0.5));
                    add_edge(edge(&object_id(i.slot), &truth, "discriminates", 0.5));
                }
                _ => add_edge(edge(&chief, &object_id(i.slot), "follow_up", 1.0)),
            }
        }
        for d in s.decoys {
            add_edge(edge(&object_id(d), &rival, "suggests", 1.0));
        }
        objects.push(KnowledgeObject::new(
            &format!("case.{}", s.id),
            ObjectKind::CaseSummary,
            &format!("Worked case: {}.", s.title),
            &[("family", s.family)],
        ));
    }
    for (k, text) in DISTRACTORS.iter().enumerate() {
        objects.push(KnowledgeObject::new(&format!("ref.{k:03}"), ObjectKind::CaseSummary, text, &[]));
    }

    let manifest = KbManifest {
        kb_id: "pilot".to_owned(),
        ..KbManifest::default()
    };
    KnowledgeBase::new(manifest, objects, edges.into_values().collect()).expect("consistent knowledge base")
}

fn query_kind(slot: &str, src: Src, risk: bool) -> &'static str {
    match slot {
        "medication_allergy" | "penicillin_allergy" => "allergy_verification",
        "current_medications" | "aspirin_use" | "nsaid_use" | "anticoagulant_use" | "oral_contraceptive_use" => {
            "medication_clarification"
        }
        "symptom_duration" | "symptom_onset" => "symptom_duration_follow_up",
        _ if src == Src::Exam => "exam_completion_status",
        _ if risk => "red_flag_escalation",
        _ => "information_follow_up",
    }
}

/// Query points at every script prefix, one per still-open gold item; a fixed
/// number of risk-critical points per scenario is sampled first.
fn queries(families: &[Family], specs: &[Spec], gold: &BTreeMap<String, GoldAudit>, kb: &KnowledgeBase) -> Vec<QueryPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(QUERY_SEED);
    let mut out = Vec::new();
    for s in specs {
        let fam = family(families, s.family);
        let audit = &gold[s.id];
        let chief = s.items[0].slot;
        let mut risky = Vec::new();
        let mut plain = Vec::new();
        for prefix in 0..s.speakers.len() {
            let spoken: Vec<&Item> = s
                .items
                .iter()
                .filter(|i| matches!(i.src, Src::Said(n) | Src::Unsure(n) if n <= prefix))
                .collect();
            let resolved = |slot: &str| {
                spoken
                    .iter()
                    .any(|i| i.slot == slot && (spoken_state(i).is_exclusion() || inquiry_core::model::state_weight(spoken_state(i)) >= 0.7))
            };
            let firm = |slot: &str| {
                spoken
                    .iter()
                    .any(|i| i.slot == slot && inquiry_core::model::state_weight(spoken_state(i)) >= 1.0)
            };
            for (item, g) in s.items.iter().zip(&audit.items) {
                if resolved(item.slot) {
                    continue;
                }
                let focus_obj = object_id(item.slot);
                let mut gold_objects = vec![focus_obj.clone().into()];
                let mut gold_paths = Vec::new();
                if item.src == Src::Exam {
                    for r in fam.rules.iter().filter(|r| r.discharge.contains(&item.slot)) {
                        let rid = format!("rule.{}", r.id);
                        gold_objects.push(rid.clone().into());
                        match r.antecedent.iter().find(|a| firm(a)) {
                            Some(a) => gold_paths.push(vec![object_id(a).into(), rid.into(), focus_obj.clone().into()]),
                            None => gold_paths.push(vec![rid.into(), focus_obj.clone().into()]),
                        }
                    }
                } else {
                    let anchor = if item.src == Src::Path { s.path_anchor } else { chief };
                    if firm(anchor) {
                        gold_paths.push(vec![object_id(anchor).into(), focus_obj.clone().into()]);
                    }
                }
                if item.src == Src::Path {
                    gold_objects.push(format!("dx.{}", s.hypotheses[0].0).into());
                }
                let kind = query_kind(item.slot, item.src, g.risk_flag);
                let q = QueryPoint {
                    query_id: String::new(),
                    scenario_id: s.id.to_owned(),
                    kind: kind.to_owned(),
                    prompt: format!("{} after turn {prefix}: {}", kind.replace('_', " "), item.slot.replace('_', " ")),
                    state: spoken
                        .iter()
                        .map(|i| SnapshotEntry {
                            slot: i.slot.into(),
                            value: i.value.to_owned(),
                            state: spoken_state(i),
                        })
                        .collect(),
                    last_touched: spoken
                        .iter()
                        .filter(|i| matches!(i.src, Src::Said(n) | Src::Unsure(n) if n == prefix))
                        .map(|i| i.slot.into())
                        .collect(),
                    focus: vec![item.slot.into()],
                    gold_objects,
                    gold_paths,
                    risk_critical: g.risk_flag,
                };
                if g.risk_flag {
                    risky.push(q);
                } else {
                    plain.push(q);
                }
            }
        }
        risky.shuffle(&mut rng);
        plain.shuffle(&mut rng);
        assert!(risky.len() >= RISK_QUERIES_PER_SCENARIO, "{}: too few risk-critical points", s.id);
        assert!(plain.len() >= QUERIES_PER_SCENARIO - RISK_QUERIES_PER_SCENARIO, "{}: too few plain points", s.id);
        let mut picked: Vec<QueryPoint> = risky
            .into_iter()
            .take(RISK_QUERIES_PER_SCENARIO)
            .chain(plain.into_iter().take(QUERIES_PER_SCENARIO - RISK_QUERIES_PER_SCENARIO))
            .collect();
        picked.sort_by(|a, b| (a.state.len(), &a.focus).cmp(&(b.state.len(), &b.focus)));
        for (k, mut q) in picked.into_iter().enumerate() {
            q.query_id = format!("{}.q{:02}", s.id, k + 1);
            for o in q.gold_objects.iter().chain(q.gold_paths.iter().flatten()) {
                assert!(kb.get(o.as_str()).is_some(), "{}: unknown object {o}", q.query_id);
            }
            out.push(q);
        }
    }
    out
}

fn main() {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../.."));
    std::fs::create_dir_all(&root).expect("create output root");
    let root = root.canonicalize().expect("resolve output root");
    let families = content::families();
    let specs = content::scenarios();
    let goals = goals(&families, &specs);

    let mut scenarios = BTreeMap::new();
    let mut scripts = BTreeMap::new();
    let mut gold_audits = BTreeMap::new();
    for s in &specs {
        let goal = goals[s.family].activated_for(s.id);
        let scenario = Scenario {
            scenario_id: s.id.to_owned(),
            family: s.family.to_owned(),
            title: s.title.to_owned(),
            hypotheses: s
                .hypotheses
                .iter()
                .map(|(id, label, prior)| Hypothesis {
                    hypothesis_id: (*id).into(),
                    label: (*label).to_owned(),
                    prior: *prior,
                })
                .collect(),
            likelihoods: likelihoods(s),
            outcomes: outcomes(s),
            checklist: checklist(&goal),
            responses: responses(s),
            filler_text: "I'm not sure, nothing else comes to mind.".to_owned(),
        };
        gold_audits.insert(s.id.to_owned(), gold(s, &goal));
        scripts.insert(s.id.to_owned(), script(s));
        scenarios.insert(s.id.to_owned(), scenario);
    }

    let kb = knowledge_base(&families, &specs);
    let queries = queries(&families, &specs, &gold_audits, &kb);
    let config = EngineConfig {
        max_turns: 24,
        ..EngineConfig::default()
    };

    let mut pack = ScenarioPack {
        manifest: PackManifest {
            v: 1,
            pack_id: "pilot".to_owned(),
            description: "Ten scripted consultations (four chest pain, three abdominal pain, three other acute \
                          presentations) with audited gold records and retrieval query points."
                .to_owned(),
            scenarios: specs.iter().map(|s| s.id.to_owned()).collect(),
            counts: PackCounts::default(),
            config,
            thresholds: [
                ("coverage", 0.8),
                ("risk_recall", 0.9),
                ("structural_completeness", 0.85),
                ("recall_at_k", 0.8),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_owned(), v))
            .collect(),
            enrichment: String::new(),
            value_aliases: [("yes", "present"), ("positive_finding", "present")]
                .into_iter()
                .map(|(k, v)| (k.to_owned(), v.to_owned()))
                .collect(),
        },
        schema: schema(),
        rules: extraction_rules(),
        queries,
        goals,
        scenarios,
        scripts,
        gold: gold_audits,
    };
    let counts = pack.measured_counts();
    pack.manifest.enrichment = format!(
        "Risk-critical query points are over-sampled: {} of {} queries ({:.1}%) versus {} of {} audited items ({:.1}%).",
        counts.risk_critical_queries,
        counts.queries,
        100.0 * counts.risk_critical_queries as f64 / counts.queries as f64,
        counts.risk_items,
        counts.gold_items,
        100.0 * counts.risk_items as f64 / counts.gold_items as f64,
    );
    pack.manifest.counts = counts.clone();
    pack.validate(Some(&kb)).expect("pack validates against the knowledge base");

    let pack_dir = root.join("packs/pilot");
    let kb_dir = root.join("kb/pilot");
    pack.save(&pack_dir).expect("write pack");
    kb.save(&kb_dir).expect("write knowledge base");
    println!("pack  {}", pack_dir.display());
    println!("kb    {} ({} objects, {} edges)", kb_dir.display(), kb.objects().len(), kb.edges().len());
    println!("{counts:?}");
}
