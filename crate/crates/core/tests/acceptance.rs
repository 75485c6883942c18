//! Acceptance run: one line per criterion, each under its time budget.
//!
//! `cargo test -p inquiry-core --test acceptance -- --nocapture` shows the
//! report; the test fails if any line is FAIL.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use inquiry_core::belief::{
    entropy, expected_information_gain, update_belief, Belief, LikelihoodEntry, LikelihoodModel, Outcome, OutcomeModel,
};
use inquiry_core::emr::{project_record, Assertion, EmrRecord};
use inquiry_core::eval::{
    dialogue_table, mrr_at_k, ndcg, ndcg_at_k, object_hit_rate, path_hit_rate, recall_at_k, run_pilot, QueryOutcome, Ratio,
};
use inquiry_core::model::{
    ActionCandidate, CurrentState, EvidenceSpan, GapKind, ObjectId, Role, SlotId, StateLabel, StateWeights, StatefulEvent,
    Temporality, TraceId, UtilityBreakdown, Verb,
};
use inquiry_core::pack::ScenarioPack;
use inquiry_core::planner::{run_policy, select_action, utility, PolicyKind, SessionResult, UtilityWeights};
use inquiry_core::retrieval::{
    coarse_retrieve, cosine, embed, path_scores, FusionWeights, KbManifest, KnowledgeBase, KnowledgeObject, ObjectKind,
    RerankWeights, SubScores,
};
use inquiry_core::state::apply_events;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn assets() -> (ScenarioPack, Arc<KnowledgeBase>) {
    let pack = ScenarioPack::load(&root().join("packs/pilot")).expect("bundled pack loads");
    let kb = KnowledgeBase::load(&root().join("kb/pilot")).expect("bundled kb loads");
    (pack, Arc::new(kb))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn run(&mut self, name: &str, budget: Duration, f: impl FnOnce() -> String) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(detail) if took <= budget => (true, detail),
            Ok(detail) => (false, format!("{detail}; over budget {budget:?}")),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, msg)
            }
        };
        let line = format!(
            "{} {name} ({:.2}s){}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            if detail.is_empty() { String::new() } else { format!(": {detail}") }
        );
        println!("{line}");
        self.lines.push((ok, line));
    }
}

fn ids(xs: &[&str]) -> Vec<ObjectId> {
    xs.iter().map(|s| ObjectId::from(*s)).collect()
}

/// `hits` outcomes whose gold object ranks first, the rest missing entirely.
fn outcomes(total: usize, hits: usize, path_hits: usize) -> Vec<QueryOutcome> {
    (0..total)
        .map(|i| QueryOutcome {
            query_id: format!("q{i}"),
            ranked: if i < hits { ids(&["gold", "x", "y"]) } else { ids(&["x", "y", "z"]) },
            paths: if i < path_hits { vec![ids(&["a", "gold"])] } else { vec![ids(&["a", "x"])] },
            gold_objects: ids(&["gold"]),
            gold_paths: vec![ids(&["a", "gold"])],
            risk_critical: false,
        })
        .collect()
}

fn metric_arithmetic() -> String {
    assert_eq!(Ratio::new(150, 180).percent(), "83.3");
    assert_eq!(Ratio::new(48, 60).percent(), "80.0");
    assert_eq!(Ratio::new(114, 140).percent(), "81.4");
    assert_eq!(Ratio::new(15, 95).percent(), "15.8");

    let hybrid = outcomes(300, 261, 219);
    assert_eq!(recall_at_k(&hybrid, 5), Ratio::new(261, 300));
    assert_eq!(recall_at_k(&hybrid, 5).fixed(3), "0.870");
    let objects = outcomes(300, 249, 0);
    assert_eq!(object_hit_rate(&objects, 5).fixed(2), "0.83");
    assert_eq!(path_hit_rate(&hybrid).fixed(2), "0.73");

    let chunk = outcomes(300, 231, 162);
    assert_eq!(recall_at_k(&chunk, 5).fixed(3), "0.770");
    assert_eq!(object_hit_rate(&outcomes(300, 214, 0), 5).fixed(2), "0.71");
    assert_eq!(path_hit_rate(&chunk).fixed(2), "0.54");
    "83.3 80.0 81.4 15.8 0.870 0.83 0.73".into()
}

fn weight_table() -> String {
    let w = StateWeights::default();
    let table = [
        (StateLabel::ObservedResult, 1.0),
        (StateLabel::Confirmed, 1.0),
        (StateLabel::Verified, 1.0),
        (StateLabel::Completed, 0.7),
        (StateLabel::HistoricalResult, 0.5),
        (StateLabel::Recommended, 0.2),
        (StateLabel::PendingVerification, 0.2),
        (StateLabel::Unconfirmed, 0.2),
        (StateLabel::Unknown, 0.0),
        (StateLabel::Negated, 0.0),
        (StateLabel::NotDone, 0.0),
    ];
    for (s, expected) in table {
        let got: f64 = w.weight(s);
        assert_eq!(got.to_bits(), f64::to_bits(expected), "{s}");
    }
    format!("{} labels bit-exact", table.len())
}

fn random_event(r: &mut impl Rng, slots: &[SlotId], values: &[&str], turn: u32, ordinal: usize) -> StatefulEvent {
    let state = *StateLabel::ALL.choose(r).unwrap();
    let temporality = *[Temporality::Present, Temporality::RecentPast, Temporality::Past, Temporality::Future]
        .choose(r)
        .unwrap();
    let start = r.gen_range(0..40);
    StatefulEvent {
        field_id: slots.choose(r).unwrap().clone(),
        value: values.choose(r).unwrap().to_string(),
        state,
        temporality,
        role: *[Role::Patient, Role::Physician, Role::Family, Role::Report].choose(r).unwrap(),
        evidence: EvidenceSpan {
            turn_index: turn,
            char_start: start,
            char_end: start + r.gen_range(1..20),
            speaker: Role::Patient,
        },
        confidence: 1.0,
        trace_id: TraceId::for_event(turn, ordinal),
    }
}

/// Mutual information `sum_h sum_o p(h) p(o|h) ln(p(o|h) / p(o))`, a
/// different route to the same quantity as `H(b) - E[H(b | o)]`.
fn mutual_information(prior: &[f64], lik: &[Vec<f64>]) -> f64 {
    let outcomes = lik[0].len();
    let p_o: Vec<f64> = (0..outcomes)
        .map(|o| prior.iter().zip(lik).map(|(p, l)| p * l[o]).sum())
        .collect();
    let mut mi = 0.0;
    for (h, p) in prior.iter().enumerate() {
        for o in 0..outcomes {
            let l = lik[h][o];
            if *p > 0.0 && l > 0.0 {
                mi += p * l * (l / p_o[o]).ln();
            }
        }
    }
    mi
}

fn outcome_model(hyps: &[String], lik: &[Vec<f64>]) -> OutcomeModel {
    let outcomes = (0..lik[0].len())
        .map(|o| Outcome {
            outcome_id: format!("o{o}"),
            likelihoods: hyps.iter().zip(lik).map(|(h, l)| (h.as_str().into(), l[o])).collect(),
        })
        .collect();
    OutcomeModel {
        actions: BTreeMap::from([("ask:x".to_owned(), outcomes)]),
    }
}

fn belief_suite() -> String {
    let mut r = rng(11);
    let weights = StateWeights::default();
    let slots: Vec<SlotId> = ["s0", "s1", "s2"].map(SlotId::from).to_vec();
    let values = ["present", "absent", "high"];

    let mut updates = 0;
    let mut worst_norm: f64 = 0.0;
    while updates < 10_000 {
        let n = r.gen_range(2..=6);
        let names: Vec<String> = (0..n).map(|i| format!("h{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut table = Vec::new();
        for h in &names {
            for s in &slots {
                for v in values {
                    table.push(LikelihoodEntry {
                        hypothesis: h.as_str().into(),
                        slot: s.clone(),
                        value: v.to_owned(),
                        state: None,
                        likelihood: r.gen_range(0.05..1.0),
                    });
                }
            }
        }
        let lm = LikelihoodModel {
            table,
            default_likelihood: 0.5,
        };
        let mut b = Belief::uniform(&refs);
        for step in 0..100 {
            let ev = random_event(&mut r, &slots, &values, step, 0);
            b = update_belief(&b, &[ev], &lm, &weights).expect("update stays finite");
            updates += 1;
            let mass = b.total_mass();
            worst_norm = worst_norm.max((mass - 1.0).abs());
            assert!(b.probs.values().all(|p| *p >= 0.0));
            let h = entropy(&b);
            assert!(h >= 0.0 && h <= (n as f64).ln() + 1e-12, "H = {h} with n = {n}");
        }
    }
    assert!(worst_norm <= 1e-12, "mass drift {worst_norm}");

    let mut worst_gap: f64 = 0.0;
    for _ in 0..1_000 {
        let n = r.gen_range(2..=5);
        let m = r.gen_range(2..=4);
        let hyps: Vec<String> = (0..n).map(|i| format!("h{i}")).collect();
        let prior: Vec<f64> = {
            let raw: Vec<f64> = (0..n).map(|_| r.gen_range(0.01..1.0)).collect();
            let t: f64 = raw.iter().sum();
            raw.iter().map(|x| x / t).collect()
        };
        let lik: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let raw: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..1.0)).collect();
                let t: f64 = raw.iter().sum();
                raw.iter().map(|x| x / t).collect()
            })
            .collect();
        let pairs: Vec<(&str, f64)> = hyps.iter().map(String::as_str).zip(prior.iter().copied()).collect();
        let b = Belief::from_pairs(&pairs).unwrap();
        let eig = expected_information_gain(&b, "ask:x", &outcome_model(&hyps, &lik)).unwrap();
        assert!(eig >= -1e-12, "EIG {eig}");
        let oracle = mutual_information(&prior, &lik);
        worst_gap = worst_gap.max((eig - oracle).abs());
    }
    assert!(worst_gap <= 1e-9, "EIG differs from enumeration by {worst_gap}");

    // ln 2 + 0.9 ln 0.9 + 0.1 ln 0.1
    const BINARY: f64 = 0.368064207168497;
    let hyps = vec!["h0".to_owned(), "h1".to_owned()];
    let b = Belief::uniform(&["h0", "h1"]);
    let eig = expected_information_gain(&b, "ask:x", &outcome_model(&hyps, &[vec![0.9, 0.1], vec![0.1, 0.9]])).unwrap();
    assert!((eig - BINARY).abs() <= 1e-9, "binary EIG {eig}");

    format!("{updates} updates, drift {worst_norm:.1e}, EIG gap {worst_gap:.1e}, binary {eig:.6}")
}

const VOCAB: [&str; 12] = [
    "chest", "pain", "ecg", "troponin", "fever", "cough", "nausea", "arm", "stairs", "liver", "rash", "sweat",
];

fn random_text(r: &mut impl Rng, len: usize) -> String {
    (0..len).map(|_| *VOCAB.choose(r).unwrap()).collect::<Vec<_>>().join(" ")
}

fn retrieval_suite() -> String {
    let mut r = rng(23);
    let kinds = [
        ObjectKind::SymptomUnit,
        ObjectKind::DiagnosisUnit,
        ObjectKind::ExamUnit,
        ObjectKind::RiskRuleUnit,
        ObjectKind::CaseSummary,
    ];
    for _ in 0..1_000 {
        let n = r.gen_range(1..=30);
        let objects: Vec<KnowledgeObject> = (0..n)
            .map(|i| {
                let len = r.gen_range(1..6);
                let text = random_text(&mut r, len);
                KnowledgeObject::new(&format!("o{i:02}"), *kinds.choose(&mut r).unwrap(), &text, &[])
            })
            .collect();
        let kb = KnowledgeBase::new(KbManifest::default(), objects, vec![]).unwrap();
        let qlen = r.gen_range(0..5);
        let bag: Vec<String> = random_text(&mut r, qlen).split_whitespace().map(str::to_owned).collect();
        let k = r.gen_range(1..=n + 3);

        // an empty bag has no embedding and scores every object 0
        let q = embed(&bag, kb.manifest.dim, kb.manifest.seed).ok();
        let mut brute: Vec<(f64, ObjectId)> = kb
            .objects()
            .iter()
            .map(|o| (q.as_ref().map_or(0.0, |q| cosine(q, &o.embedding).unwrap_or(0.0)), o.object_id.clone()))
            .collect();
        brute.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        let expected: Vec<ObjectId> = brute.into_iter().take(k).map(|(_, id)| id).collect();
        let got: Vec<ObjectId> = coarse_retrieve(&bag, &kb, k).into_iter().map(|s| s.object_id).collect();
        assert_eq!(got, expected);
    }

    for _ in 0..1_000 {
        let s: [f64; 7] = std::array::from_fn(|_| r.gen_range(0.0..1.0));
        let w = RerankWeights::from_array(std::array::from_fn(|_| r.gen_range(0.0..1.0)));
        let i = r.gen_range(0..7);
        let mut bumped = s;
        bumped[i] = (s[i] + r.gen_range(0.0..1.0)).min(1.0);
        let (lo, hi) = (SubScores::from_array(s).combine(&w), SubScores::from_array(bumped).combine(&w));
        assert!(hi >= lo, "rerank {lo} -> {hi}");

        let fw = FusionWeights {
            vector: r.gen_range(0.0..1.0),
            object: r.gen_range(0.0..1.0),
            path: r.gen_range(0.0..1.0),
        };
        let mut x: [f64; 3] = std::array::from_fn(|_| r.gen_range(0.0..1.0));
        let before = fw.fuse(x[0], x[1], x[2]);
        let j = r.gen_range(0..3);
        x[j] += r.gen_range(0.0..1.0);
        assert!(fw.fuse(x[0], x[1], x[2]) >= before);
    }

    for _ in 0..1_000 {
        let n = r.gen_range(1..20);
        let costs: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..10.0)).collect();
        let scores = path_scores(&costs);
        let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
        for (c, s) in costs.iter().zip(&scores) {
            assert!((0.0..=1.0).contains(s));
            if *c == min {
                assert_eq!(*s, 1.0);
            }
        }
    }

    let gold: BTreeSet<ObjectId> = ids(&["b", "d"]).into_iter().collect();
    // (1/log2 3 + 1/log2 5) / (1 + 1/log2 3)
    let expected = 0.6509209298071326;
    assert!((ndcg(&ids(&["a", "b", "c", "d", "e"]), &gold, 5) - expected).abs() <= 1e-9);
    assert!((ndcg(&ids(&["d", "b", "a"]), &gold, 5) - 1.0).abs() <= 1e-9);
    assert_eq!(ndcg(&ids(&["a", "c"]), &gold, 5), 0.0);
    let q = |ranked: &[&str]| QueryOutcome {
        ranked: ids(ranked),
        gold_objects: ids(&["g"]),
        ..Default::default()
    };
    let qs = [q(&["x", "g"]), q(&["g"]), q(&["x", "y", "z", "w", "v", "g"])];
    assert!((mrr_at_k(&qs, 5) - 0.5).abs() <= 1e-9);
    // 1/log2 3 for the rank-2 hit, 1 for the rank-1 hit, 0 for the miss
    assert!((ndcg_at_k(&qs, 5) - (0.6309297535714575 + 1.0) / 3.0).abs() <= 1e-9);
    "10^3 corpora, 10^3 perturbations, hand cases".into()
}

fn candidate(id: String, c: UtilityBreakdown, w: &UtilityWeights) -> ActionCandidate {
    ActionCandidate {
        action_id: id.into(),
        verb: Verb::Ask,
        target_slot: None,
        prompt_text: String::new(),
        addresses: GapKind::Information,
        utility: utility(&c, w),
        utility_components: c,
    }
}

fn planner_suite(pack: &ScenarioPack, kb: &Arc<KnowledgeBase>) -> String {
    let mut r = rng(37);
    let base = UtilityWeights::default();
    for _ in 0..1_000 {
        let n = r.gen_range(1..=12);
        let comps: Vec<UtilityBreakdown> = (0..n)
            .map(|_| {
                let [ig, rr, ps, eg, rp, cl, cb] = std::array::from_fn(|_| r.gen_range(0.0..1.0));
                UtilityBreakdown { ig, rr, ps, eg, rp, cl, cb }
            })
            .collect();
        let c = r.gen_range(0.01..100.0);
        let pick = |w: &UtilityWeights| {
            let cands: Vec<ActionCandidate> = comps
                .iter()
                .enumerate()
                .map(|(i, x)| candidate(format!("a0000.{i:02}"), *x, w))
                .collect();
            select_action(&cands).unwrap().action_id.clone()
        };
        assert_eq!(pick(&base), pick(&base.scaled(c)));
    }

    for _ in 0..100 {
        let mut cands: Vec<ActionCandidate> = (0..8)
            .map(|i| candidate(format!("a0003.{i:02}"), UtilityBreakdown::default(), &base))
            .collect();
        cands.shuffle(&mut r);
        assert_eq!(select_action(&cands).unwrap().action_id.as_str(), "a0003.00");
    }

    let mut replays = 0;
    for (id, script) in &pack.scripts {
        let case = Arc::new(pack.case(id).unwrap());
        for p in PolicyKind::ALL {
            let a = run_policy(case.clone(), kb.clone(), script, p).unwrap();
            let b = run_policy(case.clone(), kb.clone(), script, p).unwrap();
            let hashes = |s: &SessionResult| s.traces.iter().map(|t| t.trace_hash.clone()).collect::<Vec<_>>();
            assert_eq!(hashes(&a), hashes(&b), "{id} under {p}");
            assert_eq!(serde_json::to_vec(&a.traces).unwrap(), serde_json::to_vec(&b.traces).unwrap());
            assert!(a.traces.iter().all(|t| t.verify_hash()));
            replays += 1;
        }
    }
    format!("10^3 scalings, tie-breaks, {replays} replay pairs identical")
}

fn case_study(pack: &ScenarioPack, kb: &Arc<KnowledgeBase>) -> String {
    let script = pack.script("chest_01").unwrap();
    let case = Arc::new(pack.case("chest_01").unwrap());
    let exertion = &script[1].text;

    let chosen_after = |p: PolicyKind| {
        let result = run_policy(case.clone(), kb.clone(), script, p).unwrap();
        let at = result.traces.iter().position(|t| &t.input.text == exertion).expect("exertion turn replayed");
        let mut state = CurrentState::new();
        for t in &result.traces[..=at] {
            state = apply_events(&state, &t.events, t.turn_index, &case.config.state_weights);
        }
        (result.traces[at].chosen_candidate().cloned(), state)
    };

    let (ours, state) = chosen_after(PolicyKind::FullFramework);
    let ours = ours.expect("full framework proposes an action");
    assert!(matches!(ours.verb, Verb::Verify | Verb::RecommendExam), "{} {:?}", ours.verb, ours.target_slot);
    assert_eq!(ours.target_slot.as_ref().map(SlotId::as_str), Some("ecg"));
    let fired: Vec<_> = case.goal.risk_rules.iter().filter(|r| r.fires(&state)).collect();
    assert!(
        fired.iter().any(|r| r.unresolved_condition.iter().any(|s| s.as_str() == "ecg")),
        "no fired rule waits on ecg"
    );

    let (theirs, _) = chosen_after(PolicyKind::ChunkRag);
    let theirs_desc = theirs
        .as_ref()
        .map(|c| format!("{} {}", c.verb, c.target_slot.as_ref().map_or("-", |s| s.as_str())))
        .unwrap_or_else(|| "nothing".into());
    if let Some(c) = &theirs {
        let risk_closing = matches!(c.verb, Verb::Verify | Verb::RecommendExam);
        assert!(!(risk_closing && c.target_slot.as_ref().is_some_and(|s| s.as_str() == "ecg")), "chunk_rag also chose {theirs_desc}");
    }
    format!("full_framework: {} ecg; chunk_rag: {theirs_desc}", ours.verb)
}

fn pilot_shape(pack: &ScenarioPack, kb: &Arc<KnowledgeBase>) -> String {
    let counts = pack.measured_counts();
    assert_eq!(
        (counts.gold_items, counts.risk_items, counts.structural_slots, counts.queries),
        (180, 60, 140, 300)
    );
    let report = run_pilot(pack, kb, &PolicyKind::ALL, 5, 5).unwrap();
    assert_eq!(report.dialogue.len(), 4);
    assert_eq!(report.retrieval.queries, 300);
    for row in &report.dialogue {
        assert_eq!((row.coverage.den, row.risk_recall.den, row.structural.den), (180, 60, 140));
        let interactive = row.policy.is_interactive();
        assert_eq!(row.redundancy.is_some(), interactive);
        assert_eq!(row.t_goal.is_some(), interactive);
    }

    let table = dialogue_table(&report.dialogue);
    for row in &report.dialogue {
        let line = table.lines().find(|l| l.starts_with(row.policy.label())).unwrap();
        let cells: Vec<&str> = line[row.policy.label().len()..].split_whitespace().collect();
        let na: Vec<usize> = cells.iter().enumerate().filter(|(_, c)| **c == "N/A").map(|(i, _)| i).collect();
        let expected: Vec<usize> = if row.policy == PolicyKind::DirectGeneration { vec![3, 4] } else { vec![] };
        assert_eq!(na, expected, "{line}");
    }

    let cov: Vec<String> = report.dialogue.iter().map(|r| r.coverage.percent()).collect();
    let risk: Vec<String> = report.dialogue.iter().map(|r| r.risk_recall.percent()).collect();
    let ordered = |xs: Vec<f64>| xs.windows(2).all(|w| w[0] <= w[1]);
    let holds = ordered(report.dialogue.iter().map(|r| r.coverage.value()).collect())
        && ordered(report.dialogue.iter().map(|r| r.risk_recall.value()).collect());
    format!(
        "coverage A..D {}, risk recall A..D {}, D >= C >= B >= A {}",
        cov.join("/"),
        risk.join("/"),
        if holds { "holds" } else { "does not hold" }
    )
}

fn admitted(state: StateLabel, weight: f64, w_emr: f64) -> bool {
    state.is_exclusion() || state == StateLabel::Recommended || (weight > 0.0 && weight >= w_emr)
}

fn emr_properties(pack: &ScenarioPack) -> String {
    let mut r = rng(53);
    let slots: Vec<SlotId> = pack.schema.slots.keys().cloned().collect();
    let goal = pack.goal_for("chest_01").unwrap();
    let weights = StateWeights::default();
    let w_emr = 0.5;
    let values = ["present", "absent", "120/80", "type_2", "yesterday"];
    let mut slots_seen = 0;
    for _ in 0..1_000 {
        let mut cur = CurrentState::new();
        for turn in 0..r.gen_range(1..6) {
            let events: Vec<StatefulEvent> = (0..r.gen_range(0..6))
                .map(|o| random_event(&mut r, &slots, &values, turn, o))
                .collect();
            cur = apply_events(&cur, &events, turn, &weights);
        }

        let record = project_record(&cur, &goal, &pack.schema, w_emr).unwrap();
        assert_eq!(record, project_record(&cur, &goal, &pack.schema, w_emr).unwrap());
        let copy: CurrentState = serde_json::from_str(&serde_json::to_string(&cur).unwrap()).unwrap();
        assert_eq!(record, project_record(&copy, &goal, &pack.schema, w_emr).unwrap());
        let again: EmrRecord = serde_json::from_str(&serde_json::to_string(&record).unwrap()).unwrap();
        assert_eq!(record, again);

        for s in record.slots() {
            let e = cur.entry(s.slot_id.as_str()).expect("record slot has a state entry");
            assert_eq!(
                (&s.normalized_value, s.status, s.temporality),
                (&e.value, e.state, e.temporality)
            );
            assert!(admitted(e.state, e.weight, w_emr));
            let expected_assertion = if e.state.is_exclusion() {
                Assertion::Negative
            } else if e.state == StateLabel::Recommended {
                Assertion::Proposed
            } else {
                Assertion::Positive
            };
            assert_eq!(s.assertion, expected_assertion);
            assert_eq!(s.trace_ids.len(), s.evidence.len());
            for (t, span) in s.trace_ids.iter().zip(&s.evidence) {
                assert!(e.supporting_trace_ids.contains(t), "{t} not supporting {}", s.slot_id);
                assert_eq!(cur.provenance.get(t), Some(span));
            }
            assert!(!s.trace_ids.is_empty());
            slots_seen += 1;
        }
        for e in cur.entries.values() {
            if admitted(e.state, e.weight, w_emr) {
                assert!(record.slot(e.field_id.as_str()).is_some(), "{} dropped", e.field_id);
            }
        }
    }
    format!("10^3 states, {slots_seen} record slots checked")
}

#[test]
fn acceptance() {
    let (pack, kb) = assets();
    let mut report = Report { lines: Vec::new() };
    let secs = Duration::from_secs;

    report.run("metric arithmetic reproduces reference figures", Duration::from_millis(1000), metric_arithmetic);
    report.run("state-weight table", secs(1), weight_table);
    report.run("belief suite", secs(10), belief_suite);
    report.run("retrieval suite", secs(30), retrieval_suite);
    report.run("planner suite", secs(30), || planner_suite(&pack, &kb));
    report.run("case study: risk-closing action after the exertion turn", secs(5), || case_study(&pack, &kb));
    report.run("pilot-shape run", secs(60), || pilot_shape(&pack, &kb));
    report.run("emr projection properties", secs(30), || emr_properties(&pack));

    let failed: Vec<&String> = report.lines.iter().filter(|(ok, _)| !ok).map(|(_, l)| l).collect();
    assert!(failed.is_empty(), "{} criteria failed:\n{}", failed.len(), failed.iter().map(|l| l.as_str()).collect::<Vec<_>>().join("\n"));
}
