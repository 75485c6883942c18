use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::emr::{EmrRecord, RecordSlot};
use crate::error::{Error, Result};
use crate::model::{ObjectId, SlotId, StateLabel};
use crate::pack::{GoldAudit, GoldItem};
use crate::planner::{ProposedAction, TurnTrace};

/// A count-faithful ratio. Formatting rounds half up on the exact rational,
/// so `num` is always recoverable from the printed figure and `den`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }

    /// `num / den * scale` rounded half up to `decimals` places.
    fn rounded(&self, scale: u64, decimals: u32) -> String {
        if self.den == 0 {
            return "N/A".to_owned();
        }
        let p = 10u128.pow(decimals);
        let scaled = self.num as u128 * scale as u128 * p;
        let den = self.den as u128;
        let mut q = scaled / den;
        if 2 * (scaled % den) >= den {
            q += 1;
        }
        if decimals == 0 {
            return q.to_string();
        }
        format!("{}.{:0width$}", q / p, q % p, width = decimals as usize)
    }

    /// Percentage with one decimal, e.g. `83.3`.
    pub fn percent(&self) -> String {
        self.rounded(100, 1)
    }

    /// Plain fraction with `decimals` places, e.g. `0.870`.
    pub fn fixed(&self, decimals: u32) -> String {
        self.rounded(1, decimals)
    }

}

/// Pooling: numerators and denominators add separately.
impl std::ops::Add for Ratio {
    type Output = Ratio;

    fn add(self, other: Ratio) -> Ratio {
        Ratio::new(self.num + other.num, self.den + other.den)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Gold status -> system statuses accepted for it.
pub fn status_compatible(gold: StateLabel, system: StateLabel) -> bool {
    use StateLabel::*;
    match gold {
        ObservedResult | Confirmed => matches!(system, ObservedResult | Confirmed | Verified),
        Verified => matches!(system, Verified | Confirmed),
        Completed => matches!(system, Completed | Verified),
        other => other == system,
    }
}

/// Value canonicalization shared by all audit metrics.
#[derive(Clone, Copy, Debug)]
pub struct Matcher<'a> {
    pub aliases: &'a BTreeMap<String, String>,
}

impl<'a> Matcher<'a> {
    pub fn new(aliases: &'a BTreeMap<String, String>) -> Self {
        Self { aliases }
    }

    pub fn canon(&self, v: &str) -> String {
        let v = v.trim().to_lowercase();
        self.aliases.get(&v).cloned().unwrap_or(v)
    }

    /// Slot equal, value equal after canonicalization, assertion equal,
    /// status compatible. Temporality is informational only.
    pub fn matches(&self, gold: &GoldItem, slot: &RecordSlot) -> bool {
        gold.slot == slot.slot_id
            && self.canon(&gold.value) == self.canon(&slot.normalized_value)
            && gold.assertion == slot.assertion
            && status_compatible(gold.status, slot.status)
    }

    pub fn covered(&self, gold: &GoldItem, record: &EmrRecord) -> bool {
        record.slot(gold.slot.as_str()).is_some_and(|s| self.matches(gold, s))
    }
}

fn count(items: impl Iterator<Item = bool>) -> Ratio {
    items.fold(Ratio::default(), |r, hit| Ratio::new(r.num + u64::from(hit), r.den + 1))
}

pub fn coverage(gold: &GoldAudit, record: &EmrRecord, m: &Matcher<'_>) -> Result<Ratio> {
    let r = count(gold.items.iter().map(|i| m.covered(i, record)));
    if r.den == 0 {
        return Err(Error::EmptyGold("coverage"));
    }
    Ok(r)
}

/// A risk item is surfaced if it is covered or was the target of a chosen
/// risk-closing action.
pub fn risk_recall(gold: &GoldAudit, record: &EmrRecord, targeted: &BTreeSet<SlotId>, m: &Matcher<'_>) -> Result<Ratio> {
    let r = count(
        gold.risk_items()
            .map(|i| m.covered(i, record) || targeted.contains(&i.slot)),
    );
    if r.den == 0 {
        return Err(Error::EmptyGold("risk recall"));
    }
    Ok(r)
}

pub fn structural_completeness(gold: &GoldAudit, record: &EmrRecord, m: &Matcher<'_>) -> Result<Ratio> {
    let r = count(gold.structural_items().map(|i| m.covered(i, record)));
    if r.den == 0 {
        return Err(Error::EmptyGold("structural completeness"));
    }
    Ok(r)
}

/// Redundant share of proposed actions; `None` when nothing was proposed.
pub fn redundancy(actions: &[ProposedAction]) -> Option<Ratio> {
    (!actions.is_empty()).then(|| count(actions.iter().map(|a| a.redundant)))
}

/// 1-based count of turns up to the first one that met the goal.
pub fn t_goal(traces: &[TurnTrace]) -> Option<u32> {
    traces.iter().position(|t| t.goal_met).map(|i| i as u32 + 1)
}

/// 1-based rank of the first relevant id within the top `k`.
pub fn first_hit_rank(ranked: &[ObjectId], gold: &BTreeSet<ObjectId>, k: usize) -> Option<usize> {
    ranked.iter().take(k).position(|id| gold.contains(id)).map(|i| i + 1)
}

/// Binary-gain nDCG with `log2(i + 1)` discounts; the ideal list puts every
/// relevant item first.
pub fn ndcg(ranked: &[ObjectId], gold: &BTreeSet<ObjectId>, k: usize) -> f64 {
    let disc = |i: usize| 1.0 / ((i + 1) as f64 + 1.0).log2();
    let dcg: f64 = ranked
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, id)| gold.contains(*id))
        .map(|(i, _)| disc(i))
        .sum();
    let ideal: f64 = (0..gold.len().min(k)).map(disc).sum();
    if ideal == 0.0 {
        0.0
    } else {
        dcg / ideal
    }
}

/// One query's ranked output next to its gold labels.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub query_id: String,
    pub ranked: Vec<ObjectId>,
    pub paths: Vec<Vec<ObjectId>>,
    pub gold_objects: Vec<ObjectId>,
    pub gold_paths: Vec<Vec<ObjectId>>,
    pub risk_critical: bool,
}

impl QueryOutcome {
    fn gold_set(&self) -> BTreeSet<ObjectId> {
        self.gold_objects.iter().cloned().collect()
    }
}

pub fn recall_at_k(qs: &[QueryOutcome], k: usize) -> Ratio {
    count(qs.iter().map(|q| first_hit_rank(&q.ranked, &q.gold_set(), k).is_some()))
}

pub fn mrr_at_k(qs: &[QueryOutcome], k: usize) -> f64 {
    if qs.is_empty() {
        return 0.0;
    }
    qs.iter()
        .map(|q| first_hit_rank(&q.ranked, &q.gold_set(), k).map_or(0.0, |r| 1.0 / r as f64))
        .sum::<f64>()
        / qs.len() as f64
}

pub fn ndcg_at_k(qs: &[QueryOutcome], k: usize) -> f64 {
    if qs.is_empty() {
        return 0.0;
    }
    qs.iter().map(|q| ndcg(&q.ranked, &q.gold_set(), k)).sum::<f64>() / qs.len() as f64
}

/// The primary gold object (the first one listed) ranks within `k_hit`.
pub fn object_hit_rate(qs: &[QueryOutcome], k_hit: usize) -> Ratio {
    count(qs.iter().map(|q| {
        q.gold_objects
            .first()
            .is_some_and(|g| q.ranked.iter().take(k_hit).any(|id| id == g))
    }))
}

/// Some returned path contains some gold path as a contiguous run.
pub fn path_hit_rate(qs: &[QueryOutcome]) -> Ratio {
    count(qs.iter().map(|q| {
        q.gold_paths.iter().any(|g| {
            !g.is_empty()
                && q.paths
                    .iter()
                    .any(|p| g.len() <= p.len() && p.windows(g.len()).any(|w| w == g.as_slice()))
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[&str]) -> Vec<ObjectId> {
        xs.iter().map(|s| ObjectId::from(*s)).collect()
    }

    #[test]
    fn half_up_formatting() {
        assert_eq!(Ratio::new(150, 180).percent(), "83.3");
        assert_eq!(Ratio::new(15, 95).percent(), "15.8");
        assert_eq!(Ratio::new(1, 8).percent(), "12.5");
        assert_eq!(Ratio::new(1, 16).fixed(3), "0.063");
        assert_eq!(Ratio::new(1, 1).fixed(2), "1.00");
        assert_eq!(Ratio::new(0, 0).percent(), "N/A");
    }

    #[test]
    fn status_table() {
        assert!(status_compatible(StateLabel::Completed, StateLabel::Verified));
        assert!(!status_compatible(StateLabel::Completed, StateLabel::Recommended));
        assert!(status_compatible(StateLabel::Negated, StateLabel::Negated));
        assert!(!status_compatible(StateLabel::HistoricalResult, StateLabel::ObservedResult));
    }

    #[test]
    fn single_query_rank_metrics() {
        let q = |ranked: &[&str]| QueryOutcome {
            ranked: ids(ranked),
            gold_objects: ids(&["g"]),
            ..Default::default()
        };
        let first = [q(&["g", "a", "b", "c", "d"])];
        assert_eq!(mrr_at_k(&first, 5), 1.0);
        assert_eq!(ndcg_at_k(&first, 5), 1.0);
        let second = [q(&["a", "g", "b", "c", "d"])];
        assert_eq!(mrr_at_k(&second, 5), 0.5);
        // hand computation: (1 / log2 3) / (1 / log2 2)
        assert!((ndcg_at_k(&second, 5) - 0.630_929_753_571_457_5).abs() < 1e-9);
        let miss = [q(&["a", "b", "c", "d", "e", "g"])];
        assert_eq!(recall_at_k(&miss, 5), Ratio::new(0, 1));
        assert_eq!(mrr_at_k(&miss, 5), 0.0);
    }

    #[test]
    fn path_hits_need_a_contiguous_run() {
        let q = QueryOutcome {
            paths: vec![ids(&["a", "b", "c"])],
            gold_paths: vec![ids(&["a", "c"])],
            ..Default::default()
        };
        assert_eq!(path_hit_rate(std::slice::from_ref(&q)).num, 0);
        let q = QueryOutcome {
            gold_paths: vec![ids(&["b", "c"])],
            ..q
        };
        assert_eq!(path_hit_rate(&[q]).num, 1);
        assert_eq!(path_hit_rate(&[QueryOutcome::default()]).num, 0);
    }
}
