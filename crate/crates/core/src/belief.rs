//! Discrete belief over candidate hypotheses: tempered Bayesian updates,
//! entropy, and exact expected information gain.
//!
//! All logarithms are natural.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HypothesisId, SlotId, StateLabel, StateWeights, StatefulEvent};

/// Below this max log-mass the posterior is treated as underflowed.
const UNDERFLOW_LOG_MASS: f64 = -700.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub hypothesis_id: HypothesisId,
    pub label: String,
    pub prior: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyPoint {
    pub turn_index: u32,
    pub entropy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Belief {
    pub probs: BTreeMap<HypothesisId, f64>,
    #[serde(default)]
    pub history: Vec<EntropyPoint>,
}

impl Belief {
    pub fn uniform(ids: &[&str]) -> Self {
        let p = 1.0 / ids.len() as f64;
        Self {
            probs: ids.iter().map(|id| (HypothesisId::from(*id), p)).collect(),
            history: Vec::new(),
        }
    }

    /// Build from explicit probabilities, renormalizing.
    pub fn from_pairs(pairs: &[(&str, f64)]) -> Result<Self> {
        let probs = pairs
            .iter()
            .map(|(id, p)| (HypothesisId::from(*id), *p))
            .collect();
        normalize(probs)
    }

    pub fn from_hypotheses(hyps: &[Hypothesis]) -> Result<Self> {
        normalize(
            hyps.iter()
                .map(|h| (h.hypothesis_id.clone(), h.prior))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, id: &str) -> f64 {
        self.probs.get(id).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Hypotheses sorted by probability (descending), ties by id.
    pub fn ranked(&self) -> Vec<(HypothesisId, f64)> {
        let mut v: Vec<_> = self.probs.iter().map(|(k, p)| (k.clone(), *p)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v
    }

    pub fn top_two(&self) -> Option<((HypothesisId, f64), (HypothesisId, f64))> {
        let mut r = self.ranked().into_iter();
        Some((r.next()?, r.next()?))
    }

    pub fn record_entropy(&mut self, turn_index: u32) {
        let entropy = entropy(self);
        self.history.push(EntropyPoint {
            turn_index,
            entropy,
        });
    }
}

fn normalize(probs: BTreeMap<HypothesisId, f64>) -> Result<Belief> {
    if probs.is_empty() {
        return Err(Error::EmptyBelief);
    }
    let total: f64 = probs.values().sum();
    if !(total > 0.0) || !total.is_finite() || probs.values().any(|p| *p < 0.0) {
        return Err(Error::DegenerateBelief {
            max_log_mass: f64::NEG_INFINITY,
        });
    }
    Ok(Belief {
        probs: probs.into_iter().map(|(k, p)| (k, p / total)).collect(),
        history: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodEntry {
    pub hypothesis: HypothesisId,
    pub slot: SlotId,
    pub value: String,
    /// `None` matches any state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateLabel>,
    pub likelihood: f64,
}

/// Observation likelihoods `p(slot = value, state | hypothesis)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodModel {
    pub table: Vec<LikelihoodEntry>,
    pub default_likelihood: f64,
}

impl Default for LikelihoodModel {
    fn default() -> Self {
        Self {
            table: Vec::new(),
            default_likelihood: 0.5,
        }
    }
}

impl LikelihoodModel {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x <= 1.0;
        if !ok(self.default_likelihood) {
            return Err(Error::PackInvalid(format!(
                "default likelihood {} outside (0, 1]",
                self.default_likelihood
            )));
        }
        if let Some(e) = self.table.iter().find(|e| !ok(e.likelihood)) {
            return Err(Error::PackInvalid(format!(
                "likelihood {} for {}/{}={} outside (0, 1]",
                e.likelihood, e.hypothesis, e.slot, e.value
            )));
        }
        Ok(())
    }

    /// Exact-state entries take precedence over state-agnostic ones.
    pub fn lookup(&self, hypothesis: &str, slot: &str, value: &str, state: StateLabel) -> f64 {
        let mut any_state = None;
        for e in &self.table {
            if e.hypothesis.as_str() != hypothesis
                || e.slot.as_str() != slot
                || !e.value.eq_ignore_ascii_case(value)
            {
                continue;
            }
            match e.state {
                Some(s) if s == state => return e.likelihood,
                None if any_state.is_none() => any_state = Some(e.likelihood),
                _ => {}
            }
        }
        any_state.unwrap_or(self.default_likelihood)
    }
}

/// Multiply each hypothesis by its likelihood raised to the event's state
/// weight, then renormalize. Computed in log space.
pub fn update_belief(
    b: &Belief,
    events: &[StatefulEvent],
    lm: &LikelihoodModel,
    weights: &StateWeights,
) -> Result<Belief> {
    if b.is_empty() {
        return Err(Error::EmptyBelief);
    }
    let mut log_mass: Vec<(HypothesisId, f64)> =
        b.probs.iter().map(|(h, p)| (h.clone(), p.ln())).collect();
    for ev in events {
        let w = weights.weight(ev.state);
        if w <= 0.0 {
            continue;
        }
        for (h, lp) in log_mass.iter_mut() {
            let l = lm.lookup(h.as_str(), ev.field_id.as_str(), &ev.value, ev.state);
            *lp += w * l.ln();
        }
    }
    let max = log_mass
        .iter()
        .map(|(_, lp)| *lp)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(max >= UNDERFLOW_LOG_MASS) {
        return Err(Error::DegenerateBelief { max_log_mass: max });
    }
    let total: f64 = log_mass.iter().map(|(_, lp)| (lp - max).exp()).sum();
    Ok(Belief {
        probs: log_mass
            .into_iter()
            .map(|(h, lp)| (h, (lp - max).exp() / total))
            .collect(),
        history: b.history.clone(),
    })
}

/// Shannon entropy in nats, with `0 log 0 = 0`.
pub fn entropy(b: &Belief) -> f64 {
    entropy_of(b.probs.values().copied())
}

pub(crate) fn entropy_of(ps: impl IntoIterator<Item = f64>) -> f64 {
    -ps.into_iter()
        .filter(|p| *p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub outcome_id: String,
    /// `p(outcome | hypothesis)`.
    pub likelihoods: BTreeMap<HypothesisId, f64>,
}

/// Finite outcome distributions per action key (`verb:slot`).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeModel {
    pub actions: BTreeMap<String, Vec<Outcome>>,
}

impl OutcomeModel {
    pub fn get(&self, key: &str) -> Option<&[Outcome]> {
        self.actions.get(key).map(Vec::as_slice)
    }

    /// Every hypothesis' outcome likelihoods must sum to one.
    pub fn validate(&self, hypotheses: &[HypothesisId]) -> Result<()> {
        for (key, outcomes) in &self.actions {
            if outcomes.is_empty() {
                return Err(Error::PackInvalid(format!("outcome model {key} has no outcomes")));
            }
            for h in hypotheses {
                let mut sum = 0.0;
                for o in outcomes {
                    let l = o.likelihoods.get(h).copied().ok_or_else(|| {
                        Error::PackInvalid(format!("outcome {key}/{} misses hypothesis {h}", o.outcome_id))
                    })?;
                    if !(0.0..=1.0).contains(&l) {
                        return Err(Error::PackInvalid(format!(
                            "outcome {key}/{} has likelihood {l} for {h}",
                            o.outcome_id
                        )));
                    }
                    sum += l;
                }
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::PackInvalid(format!(
                        "outcome likelihoods for {key} under {h} sum to {sum}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `H(b) - sum_o p(o) H(b | o)` by exact enumeration of the outcome list.
pub fn expected_information_gain(b: &Belief, action_key: &str, om: &OutcomeModel) -> Result<f64> {
    let outcomes = om
        .get(action_key)
        .ok_or_else(|| Error::MissingOutcomeModel(action_key.to_owned()))?;
    Ok(eig_for_outcomes(b, outcomes))
}

pub(crate) fn eig_for_outcomes(b: &Belief, outcomes: &[Outcome]) -> f64 {
    let prior = entropy(b);
    let mut expected_posterior = 0.0;
    for o in outcomes {
        let joint: Vec<f64> = b
            .probs
            .iter()
            .map(|(h, p)| p * o.likelihoods.get(h).copied().unwrap_or(0.0))
            .collect();
        let p_o: f64 = joint.iter().sum();
        if p_o > 0.0 {
            expected_posterior += p_o * entropy_of(joint.iter().map(|j| j / p_o));
        }
    }
    prior - expected_posterior
}
