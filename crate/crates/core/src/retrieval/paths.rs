use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::kb::KnowledgeBase;
use crate::model::{ObjectId, SlotId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathEdge {
    pub relation: String,
    pub cost: f64,
}

/// `v0 -e1-> v1 ... -eL-> vL`, with `L >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReasoningPath {
    pub nodes: Vec<ObjectId>,
    pub edges: Vec<PathEdge>,
    pub cost: f64,
    pub score: f64,
    /// Slot of the first node after the start that stands for a slot; the
    /// path is blocked while that slot is unresolved.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precondition: Option<SlotId>,
}

impl ReasoningPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_well_formed(&self) -> bool {
        !self.edges.is_empty() && self.nodes.len() == self.edges.len() + 1
    }

    pub fn passes_through(&self, id: &str) -> bool {
        self.nodes.iter().any(|n| n.as_str() == id)
    }

    /// Whether `needle` occurs as a contiguous run of this path's nodes.
    pub fn contains_run(&self, needle: &[ObjectId]) -> bool {
        !needle.is_empty()
            && needle.len() <= self.nodes.len()
            && self.nodes.windows(needle.len()).any(|w| w == needle)
    }

    pub fn nodes_joined(&self) -> String {
        self.nodes
            .iter()
            .map(ObjectId::as_str)
            .collect::<Vec<_>>()
            .join(">")
    }
}

/// Sum of edge costs plus `rho` times the path length.
pub fn path_cost(path: &ReasoningPath, rho: f64) -> f64 {
    path.edges.iter().map(|e| e.cost).sum::<f64>() + rho * path.len() as f64
}

/// Min-max normalize costs into higher-is-better scores; equal costs all
/// score 1.
pub fn path_scores(costs: &[f64]) -> Vec<f64> {
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return vec![1.0; costs.len()];
    }
    costs
        .iter()
        .map(|c| (1.0 - (c - min) / (max - min)).clamp(0.0, 1.0))
        .collect()
}

/// Every simple directed path of length `1..=max_len` from a source to a
/// destination, in lexicographic order of node ids. Cost and score are left
/// at zero.
pub fn enumerate_paths(
    kb: &KnowledgeBase,
    sources: &[ObjectId],
    destinations: &BTreeSet<ObjectId>,
    max_len: usize,
) -> Vec<ReasoningPath> {
    let mut out = Vec::new();
    if max_len == 0 {
        return out;
    }
    let dest: Vec<bool> = kb
        .objects()
        .iter()
        .map(|o| destinations.contains(&o.object_id))
        .collect();
    let mut starts: Vec<usize> = sources.iter().filter_map(|s| kb.position(s.as_str())).collect();
    starts.sort_unstable();
    starts.dedup();

    let mut on_path = vec![false; kb.len()];
    for s in starts {
        let mut nodes = vec![s];
        let mut edges = Vec::new();
        on_path[s] = true;
        dfs(kb, &dest, max_len, &mut nodes, &mut edges, &mut on_path, &mut out);
        on_path[s] = false;
    }
    out.sort_by(|a, b| {
        a.nodes
            .cmp(&b.nodes)
            .then_with(|| {
                let ra = a.edges.iter().map(|e| e.relation.as_str());
                let rb = b.edges.iter().map(|e| e.relation.as_str());
                ra.cmp(rb)
            })
    });
    out
}

fn dfs(
    kb: &KnowledgeBase,
    dest: &[bool],
    max_len: usize,
    nodes: &mut Vec<usize>,
    edges: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<ReasoningPath>,
) {
    let u = *nodes.last().expect("path has a start");
    if !edges.is_empty() && dest[u] {
        out.push(materialize(kb, nodes, edges));
    }
    if edges.len() == max_len {
        return;
    }
    for &ei in kb.outgoing(u) {
        let e = &kb.edges()[ei];
        let v = kb.position(e.dst.as_str()).expect("validated edge");
        if on_path[v] {
            continue;
        }
        on_path[v] = true;
        nodes.push(v);
        edges.push(ei);
        dfs(kb, dest, max_len, nodes, edges, on_path, out);
        edges.pop();
        nodes.pop();
        on_path[v] = false;
    }
}

fn materialize(kb: &KnowledgeBase, nodes: &[usize], edges: &[usize]) -> ReasoningPath {
    let objs = kb.objects();
    ReasoningPath {
        nodes: nodes.iter().map(|&i| objs[i].object_id.clone()).collect(),
        edges: edges
            .iter()
            .map(|&ei| {
                let e = &kb.edges()[ei];
                PathEdge {
                    relation: e.relation.clone(),
                    cost: e.cost,
                }
            })
            .collect(),
        cost: 0.0,
        score: 0.0,
        precondition: nodes[1..].iter().find_map(|&i| objs[i].primary_slot()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::kb::{KbManifest, KnowledgeEdge, KnowledgeObject, ObjectKind};

    fn kb(ids: &[&str], edges: &[(&str, &str, f64)]) -> KnowledgeBase {
        KnowledgeBase::new(
            KbManifest::default(),
            ids.iter()
                .map(|id| KnowledgeObject::new(id, ObjectKind::SymptomUnit, id, &[]))
                .collect(),
            edges
                .iter()
                .map(|(s, d, c)| KnowledgeEdge {
                    src: (*s).into(),
                    dst: (*d).into(),
                    relation: "r".into(),
                    cost: *c,
                })
                .collect(),
        )
        .unwrap()
    }

    fn dests(ids: &[&str]) -> BTreeSet<ObjectId> {
        ids.iter().map(|s| ObjectId::from(*s)).collect()
    }

    fn path(costs: &[f64]) -> ReasoningPath {
        ReasoningPath {
            nodes: (0..=costs.len()).map(|i| ObjectId::new(format!("n{i}"))).collect(),
            edges: costs.iter().map(|c| PathEdge { relation: "r".into(), cost: *c }).collect(),
            cost: 0.0,
            score: 0.0,
            precondition: None,
        }
    }

    #[test]
    fn cost_is_edge_sum_plus_length_penalty() {
        assert_eq!(path_cost(&path(&[1.0, 2.0]), 0.0), 3.0);
        assert_eq!(path_cost(&path(&[1.0, 2.0]), 0.5), 4.0);
        assert_eq!(path_cost(&path(&[1.7]), 0.0), 1.7);
    }

    #[test]
    fn min_max_scores() {
        assert_eq!(path_scores(&[3.0, 4.0, 5.0]), vec![1.0, 0.5, 0.0]);
        assert_eq!(path_scores(&[2.5]), vec![1.0]);
        assert_eq!(path_scores(&[2.0, 2.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn disconnected_gives_nothing_single_edge_gives_one_path() {
        let g = kb(&["a", "b", "c"], &[("a", "b", 1.0)]);
        assert!(enumerate_paths(&g, &["a".into()], &dests(&["c"]), 4).is_empty());
        let p = enumerate_paths(&g, &["a".into()], &dests(&["b"]), 4);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].len(), 1);
        assert!(p[0].is_well_formed());
    }

    #[test]
    fn diamond_has_two_routes_in_lexicographic_order() {
        // s -> x -> t and s -> y -> t, declared in reverse to check ordering
        let g = kb(&["s", "t", "x", "y"], &[("s", "y", 1.0), ("y", "t", 1.0), ("s", "x", 1.0), ("x", "t", 1.0)]);
        let p = enumerate_paths(&g, &["s".into()], &dests(&["t"]), 4);
        let seqs: Vec<String> = p.iter().map(ReasoningPath::nodes_joined).collect();
        assert_eq!(seqs, ["s>x>t", "s>y>t"]);
    }

    #[test]
    fn max_len_and_cycles_are_respected() {
        let g = kb(&["a", "b", "c"], &[("a", "b", 1.0), ("b", "a", 1.0), ("b", "c", 1.0)]);
        assert!(enumerate_paths(&g, &["a".into()], &dests(&["c"]), 1).is_empty());
        let p = enumerate_paths(&g, &["a".into()], &dests(&["a", "b", "c"]), 4);
        let seqs: Vec<String> = p.iter().map(ReasoningPath::nodes_joined).collect();
        assert_eq!(seqs, ["a>b", "a>b>c"]);
    }

    #[test]
    fn contiguous_run_matching() {
        let p = path(&[1.0, 1.0, 1.0]);
        let run = |ids: &[&str]| ids.iter().map(|s| ObjectId::from(*s)).collect::<Vec<_>>();
        assert!(p.contains_run(&run(&["n1", "n2"])));
        assert!(!p.contains_run(&run(&["n0", "n2"])));
        assert!(!p.contains_run(&[]));
    }
}
