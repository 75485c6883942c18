use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::embed::{self, tokenize};
use super::weights::{FusionWeights, RerankWeights};
use crate::error::{Error, Result};
use crate::io;
use crate::model::{ObjectId, SlotId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    SymptomUnit,
    DiagnosisUnit,
    ExamUnit,
    RiskRuleUnit,
    CaseSummary,
}

/// One objectified unit of knowledge. Well-known field keys:
/// `slot` / `slots` (addressed slots), `value`, `section`, `hypothesis`,
/// `rule`, `discharges` (rule ids), `requires` (slots), `action`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeObject {
    pub object_id: ObjectId,
    pub kind: ObjectKind,
    #[serde(default)]
    pub fields: BTreeMap<String, String>,
    pub text: String,
    /// Hybrid embedding over text and field values; derived at load time.
    #[serde(skip)]
    pub embedding: Vec<f64>,
    /// Text-only embedding used by the chunk baseline.
    #[serde(skip)]
    pub text_embedding: Vec<f64>,
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl KnowledgeObject {
    pub fn new(id: &str, kind: ObjectKind, text: &str, fields: &[(&str, &str)]) -> Self {
        Self {
            object_id: id.into(),
            kind,
            fields: fields
                .iter()
                .map(|(k, v)| ((*k).to_owned(), (*v).to_owned()))
                .collect(),
            text: text.to_owned(),
            embedding: Vec::new(),
            text_embedding: Vec::new(),
        }
    }

    pub fn field(&self, key: &str) -> Option<&str> {
        self.fields.get(key).map(String::as_str)
    }

    pub fn field_list(&self, key: &str) -> Vec<&str> {
        self.field(key).map(|v| split_list(v).collect()).unwrap_or_default()
    }

    pub fn addressed_slots(&self) -> BTreeSet<SlotId> {
        self.field_list("slot")
            .into_iter()
            .chain(self.field_list("slots"))
            .map(SlotId::from)
            .collect()
    }

    /// Slot whose resolution this object stands for when it sits on a path.
    pub fn primary_slot(&self) -> Option<SlotId> {
        self.field_list("slot").first().map(|s| SlotId::from(*s))
    }

    pub fn token_bag(&self) -> Vec<String> {
        let mut bag = tokenize(&self.text);
        for v in self.fields.values() {
            bag.extend(tokenize(v));
        }
        bag
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeEdge {
    pub src: ObjectId,
    pub dst: ObjectId,
    pub relation: String,
    pub cost: f64,
}

fn default_coarse_k() -> usize {
    20
}
fn default_max_path_len() -> usize {
    4
}
fn default_paths_per_object() -> usize {
    3
}
fn default_rho() -> f64 {
    0.25
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KbManifest {
    pub v: u32,
    pub kb_id: String,
    pub dim: usize,
    pub hash: String,
    pub seed: u64,
    #[serde(default)]
    pub alpha: RerankWeights,
    #[serde(default)]
    pub beta: FusionWeights,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_coarse_k")]
    pub coarse_k: usize,
    #[serde(default = "default_max_path_len")]
    pub max_path_len: usize,
    #[serde(default = "default_paths_per_object")]
    pub paths_per_object: usize,
}

impl Default for KbManifest {
    fn default() -> Self {
        Self {
            v: 1,
            kb_id: "kb".to_owned(),
            dim: embed::DEFAULT_DIM,
            hash: embed::HASH_NAME.to_owned(),
            seed: embed::DEFAULT_SEED,
            alpha: RerankWeights::default(),
            beta: FusionWeights::default(),
            rho: default_rho(),
            coarse_k: default_coarse_k(),
            max_path_len: default_max_path_len(),
            paths_per_object: default_paths_per_object(),
        }
    }
}

/// Immutable after construction; shared read-only across sessions.
#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    pub manifest: KbManifest,
    objects: Vec<KnowledgeObject>,
    edges: Vec<KnowledgeEdge>,
    index: HashMap<ObjectId, usize>,
    /// Outgoing edge indices per object, sorted by (dst, relation).
    outgoing: Vec<Vec<usize>>,
    /// Undirected neighbours, sorted and deduplicated.
    neighbours: Vec<Vec<usize>>,
}

impl KnowledgeBase {
    pub fn new(
        mut manifest: KbManifest,
        mut objects: Vec<KnowledgeObject>,
        edges: Vec<KnowledgeEdge>,
    ) -> Result<Self> {
        if manifest.hash != embed::HASH_NAME {
            return Err(Error::KbInvalid(format!(
                "unsupported hash `{}` (expected {})",
                manifest.hash,
                embed::HASH_NAME
            )));
        }
        if manifest.dim == 0 {
            return Err(Error::KbInvalid("dim must be positive".into()));
        }
        manifest.alpha = manifest.alpha.normalized()?;
        manifest.beta = manifest.beta.normalized()?;
        objects.sort_by(|a, b| a.object_id.cmp(&b.object_id));
        let mut index = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if index.insert(o.object_id.clone(), i).is_some() {
                return Err(Error::KbInvalid(format!("duplicate object {}", o.object_id)));
            }
        }
        for o in objects.iter_mut() {
            o.embedding = embed::embed(&o.token_bag(), manifest.dim, manifest.seed)
                .map_err(|e| Error::KbInvalid(format!("object {}: {e}", o.object_id)))?;
            o.text_embedding = embed::embed(&tokenize(&o.text), manifest.dim, manifest.seed)
                .map_err(|e| Error::KbInvalid(format!("object {} text: {e}", o.object_id)))?;
        }
        let mut outgoing = vec![Vec::new(); objects.len()];
        let mut neighbours = vec![Vec::new(); objects.len()];
        for (ei, e) in edges.iter().enumerate() {
            let (Some(&s), Some(&d)) = (index.get(&e.src), index.get(&e.dst)) else {
                return Err(Error::KbInvalid(format!(
                    "edge {} -> {} references an unknown object",
                    e.src, e.dst
                )));
            };
            if !(e.cost > 0.0) || !e.cost.is_finite() {
                return Err(Error::KbInvalid(format!(
                    "edge {} -> {} has non-positive cost {}",
                    e.src, e.dst, e.cost
                )));
            }
            outgoing[s].push(ei);
            neighbours[s].push(d);
            neighbours[d].push(s);
        }
        for out in outgoing.iter_mut() {
            out.sort_by(|&a, &b| {
                (&edges[a].dst, &edges[a].relation, a).cmp(&(&edges[b].dst, &edges[b].relation, b))
            });
        }
        for n in neighbours.iter_mut() {
            n.sort_unstable();
            n.dedup();
        }
        Ok(Self {
            manifest,
            objects,
            edges,
            index,
            outgoing,
            neighbours,
        })
    }

    /// Load `manifest.json`, `objects.jsonl` and `edges.jsonl` from a directory.
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: KbManifest = io::read_json(&dir.join("manifest.json"))?;
        let objects = io::read_jsonl(&dir.join("objects.jsonl"))?;
        let edges = io::read_jsonl(&dir.join("edges.jsonl"))?;
        Self::new(manifest, objects, edges)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        io::write_file(&dir.join("manifest.json"), &io::to_json_pretty(&self.manifest))?;
        io::write_file(&dir.join("objects.jsonl"), &io::to_jsonl(&self.objects))?;
        io::write_file(&dir.join("edges.jsonl"), &io::to_jsonl(&self.edges))
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Objects in ascending id order.
    pub fn objects(&self) -> &[KnowledgeObject] {
        &self.objects
    }

    pub fn edges(&self) -> &[KnowledgeEdge] {
        &self.edges
    }

    pub fn get(&self, id: &str) -> Option<&KnowledgeObject> {
        self.index.get(id).map(|&i| &self.objects[i])
    }

    pub(crate) fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn outgoing(&self, node: usize) -> &[usize] {
        &self.outgoing[node]
    }

    /// Undirected hop distance from the nearest source, `None` if unreachable.
    pub fn hop_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.objects.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].expect("queued nodes have a distance");
            for &v in &self.neighbours[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(s: &str, d: &str, c: f64) -> KnowledgeEdge {
        KnowledgeEdge {
            src: s.into(),
            dst: d.into(),
            relation: "r".into(),
            cost: c,
        }
    }

    fn obj(id: &str) -> KnowledgeObject {
        KnowledgeObject::new(id, ObjectKind::SymptomUnit, id, &[])
    }

    #[test]
    fn rejects_dangling_and_non_positive_edges() {
        let m = KbManifest::default;
        assert!(KnowledgeBase::new(m(), vec![obj("a")], vec![edge("a", "b", 1.0)]).is_err());
        assert!(KnowledgeBase::new(m(), vec![obj("a"), obj("b")], vec![edge("a", "b", 0.0)]).is_err());
        assert!(KnowledgeBase::new(m(), vec![obj("a"), obj("a")], vec![]).is_err());
    }

    #[test]
    fn embeddings_are_unit_vectors() {
        let kb = KnowledgeBase::new(KbManifest::default(), vec![obj("alpha"), obj("beta")], vec![]).unwrap();
        for o in kb.objects() {
            let n: f64 = o.embedding.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hop_distances_ignore_direction() {
        let kb = KnowledgeBase::new(
            KbManifest::default(),
            vec![obj("a"), obj("b"), obj("c"), obj("d")],
            vec![edge("b", "a", 1.0), edge("b", "c", 1.0)],
        )
        .unwrap();
        let d = kb.hop_distances(&[kb.position("a").unwrap()]);
        assert_eq!(d, vec![Some(0), Some(1), Some(2), None]);
    }

    #[test]
    fn field_lists_are_trimmed() {
        let o = KnowledgeObject::new("x", ObjectKind::ExamUnit, "t", &[("slots", "ecg, troponin"), ("slot", "ecg")]);
        let s: Vec<_> = o.addressed_slots().into_iter().map(|s| s.0).collect();
        assert_eq!(s, ["ecg", "troponin"]);
        assert_eq!(o.primary_slot().unwrap().as_str(), "ecg");
    }
}
