//! Turning dialogue turns into stateful events.
//!
//! Two extractors ship with the crate: a gold extractor that replays the
//! annotations carried by scripted turns, and a rule extractor that fires
//! case-insensitive literal triggers. Both sit behind [`Extractor`] so a
//! learned extractor can replace them without touching the state engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    EvidenceSpan, Role, SlotId, StateLabel, StatefulEvent, Temporality, TraceId,
};

/// A gold annotation attached to a scripted turn. Spans are character offsets
/// into the turn text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub field_id: SlotId,
    pub value: String,
    pub state: StateLabel,
    pub temporality: Temporality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
    pub char_start: usize,
    pub char_end: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DialogueTurn {
    pub turn_index: u32,
    pub speaker: Role,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_events: Option<Vec<GoldAnnotation>>,
}

impl DialogueTurn {
    pub fn new(turn_index: u32, speaker: Role, text: impl Into<String>) -> Self {
        Self {
            turn_index,
            speaker,
            text: text.into(),
            gold_events: None,
        }
    }

    pub fn with_gold(mut self, gold: Vec<GoldAnnotation>) -> Self {
        self.gold_events = Some(gold);
        self
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventTemplate {
    pub field_id: SlotId,
    pub value: String,
    pub state: StateLabel,
    pub temporality: Temporality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRule {
    pub rule_id: String,
    pub trigger: String,
    pub emits: EventTemplate,
    #[serde(default)]
    pub priority: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMode {
    Gold,
    Rule,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub gold_confidence: f64,
    pub rule_confidence: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            gold_confidence: 1.0,
            rule_confidence: 0.9,
        }
    }
}

pub trait Extractor: Send + Sync {
    fn extract(&self, turn: &DialogueTurn) -> Result<Vec<StatefulEvent>>;
}

#[derive(Clone, Debug, Default)]
pub struct GoldExtractor {
    pub confidence: f64,
}

impl Extractor for GoldExtractor {
    fn extract(&self, turn: &DialogueTurn) -> Result<Vec<StatefulEvent>> {
        let gold = turn.gold_events.as_ref().ok_or(Error::MissingGold {
            turn: turn.turn_index,
        })?;
        Ok(gold
            .iter()
            .enumerate()
            .map(|(i, g)| StatefulEvent {
                field_id: g.field_id.clone(),
                value: g.value.clone(),
                state: g.state,
                temporality: g.temporality,
                role: g.role.unwrap_or(turn.speaker),
                evidence: EvidenceSpan {
                    turn_index: turn.turn_index,
                    char_start: g.char_start,
                    char_end: g.char_end,
                    speaker: turn.speaker,
                },
                confidence: g.confidence.unwrap_or(self.confidence),
                trace_id: TraceId::for_event(turn.turn_index, i),
            })
            .collect())
    }
}

#[derive(Clone, Debug)]
pub struct RuleExtractor {
    rules: Vec<ExtractionRule>,
    confidence: f64,
}

impl RuleExtractor {
    pub fn new(mut rules: Vec<ExtractionRule>, confidence: f64) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::EmptyRulePack);
        }
        rules.sort_by(|a, b| (a.priority, &a.rule_id).cmp(&(b.priority, &b.rule_id)));
        Ok(Self { rules, confidence })
    }

    pub fn rules(&self) -> &[ExtractionRule] {
        &self.rules
    }
}

impl Extractor for RuleExtractor {
    fn extract(&self, turn: &DialogueTurn) -> Result<Vec<StatefulEvent>> {
        let text: Vec<char> = turn.text.chars().collect();
        let mut out = Vec::new();
        for rule in &self.rules {
            let trigger: Vec<char> = rule.trigger.chars().collect();
            let Some(start) = find_ignore_case(&text, &trigger) else {
                continue;
            };
            out.push(StatefulEvent {
                field_id: rule.emits.field_id.clone(),
                value: rule.emits.value.clone(),
                state: rule.emits.state,
                temporality: rule.emits.temporality,
                role: turn.speaker,
                evidence: EvidenceSpan {
                    turn_index: turn.turn_index,
                    char_start: start,
                    char_end: start + trigger.len(),
                    speaker: turn.speaker,
                },
                confidence: rule.confidence.unwrap_or(self.confidence),
                trace_id: TraceId::for_event(turn.turn_index, out.len()),
            });
        }
        Ok(out)
    }
}

fn chars_eq_ignore_case(a: char, b: char) -> bool {
    a == b || a.to_lowercase().eq(b.to_lowercase())
}

/// First char offset of `needle` in `haystack`, ignoring case. Linear scan per
/// start position; no backtracking beyond the needle length.
fn find_ignore_case(haystack: &[char], needle: &[char]) -> Option<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return None;
    }
    (0..=haystack.len() - needle.len()).find(|&i| {
        haystack[i..i + needle.len()]
            .iter()
            .zip(needle)
            .all(|(&a, &b)| chars_eq_ignore_case(a, b))
    })
}

pub fn extract_events(
    turn: &DialogueTurn,
    mode: ExtractionMode,
    rules: &[ExtractionRule],
    config: &ExtractionConfig,
) -> Result<Vec<StatefulEvent>> {
    match mode {
        ExtractionMode::Gold => GoldExtractor {
            confidence: config.gold_confidence,
        }
        .extract(turn),
        ExtractionMode::Rule => {
            RuleExtractor::new(rules.to_vec(), config.rule_confidence)?.extract(turn)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub trace_id: TraceId,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Validated {
    pub events: Vec<StatefulEvent>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Drop events whose span falls outside the turn or whose confidence is not a
/// probability.
pub fn validate_events(events: Vec<StatefulEvent>, turn: &DialogueTurn) -> Validated {
    let len = turn.char_len();
    let mut out = Validated::default();
    for ev in events {
        let reason = if ev.evidence.turn_index != turn.turn_index {
            Some(format!(
                "evidence points at turn {} but belongs to turn {}",
                ev.evidence.turn_index, turn.turn_index
            ))
        } else if !ev.evidence.fits(len) {
            Some(format!(
                "span {}..{} outside turn text of length {len}",
                ev.evidence.char_start, ev.evidence.char_end
            ))
        } else if !(0.0..=1.0).contains(&ev.confidence) {
            Some(format!("confidence {} outside [0, 1]", ev.confidence))
        } else {
            None
        };
        match reason {
            Some(reason) => out.diagnostics.push(Diagnostic {
                trace_id: ev.trace_id,
                reason,
            }),
            None => out.events.push(ev),
        }
    }
    out
}
