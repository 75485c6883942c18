use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights of the seven object-level sub-scores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RerankWeights {
    pub field: f64,
    pub structural: f64,
    pub graph: f64,
    pub goal: f64,
    pub risk: f64,
    pub path: f64,
    pub state: f64,
}

impl Default for RerankWeights {
    fn default() -> Self {
        Self {
            field: 0.20,
            structural: 0.10,
            graph: 0.10,
            goal: 0.20,
            risk: 0.20,
            path: 0.10,
            state: 0.10,
        }
    }
}

impl RerankWeights {
    pub fn from_array(a: [f64; 7]) -> Self {
        Self {
            field: a[0],
            structural: a[1],
            graph: a[2],
            goal: a[3],
            risk: a[4],
            path: a[5],
            state: a[6],
        }
    }

    pub fn as_array(&self) -> [f64; 7] {
        [
            self.field,
            self.structural,
            self.graph,
            self.goal,
            self.risk,
            self.path,
            self.state,
        ]
    }

    pub fn normalized(&self) -> Result<Self> {
        Ok(Self::from_array(normalize(self.as_array(), "rerank")?))
    }
}

/// Weights of the vector, object and path stages in the fused score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionWeights {
    pub vector: f64,
    pub object: f64,
    pub path: f64,
}

impl Default for FusionWeights {
    fn default() -> Self {
        Self {
            vector: 0.3,
            object: 0.4,
            path: 0.3,
        }
    }
}

impl FusionWeights {
    pub const VECTOR_ONLY: FusionWeights = FusionWeights {
        vector: 1.0,
        object: 0.0,
        path: 0.0,
    };

    pub fn normalized(&self) -> Result<Self> {
        let [vector, object, path] = normalize([self.vector, self.object, self.path], "fusion")?;
        Ok(Self {
            vector,
            object,
            path,
        })
    }

    pub fn fuse(&self, vector: f64, object: f64, path: f64) -> f64 {
        self.vector * vector + self.object * object + self.path * path
    }
}

fn normalize<const N: usize>(mut w: [f64; N], what: &str) -> Result<[f64; N]> {
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::KbInvalid(format!("{what} weights must be finite and non-negative")));
    }
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::KbInvalid(format!("{what} weights sum to zero")));
    }
    w.iter_mut().for_each(|x| *x /= total);
    Ok(w)
}

/// The seven object-level sub-scores, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SubScores {
    pub field: f64,
    pub structural: f64,
    pub graph: f64,
    pub goal: f64,
    pub risk: f64,
    pub path: f64,
    pub state: f64,
}

impl SubScores {
    pub fn as_array(&self) -> [f64; 7] {
        [
            self.field,
            self.structural,
            self.graph,
            self.goal,
            self.risk,
            self.path,
            self.state,
        ]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Self {
            field: a[0],
            structural: a[1],
            graph: a[2],
            goal: a[3],
            risk: a[4],
            path: a[5],
            state: a[6],
        }
    }

    pub fn combine(&self, w: &RerankWeights) -> f64 {
        self.as_array()
            .iter()
            .zip(w.as_array())
            .map(|(s, a)| s * a)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_already_normalized() {
        let a = RerankWeights::default();
        assert!((a.as_array().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let b = FusionWeights::default();
        assert!((b.vector + b.object + b.path - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convex_combination_edge_cases() {
        let w = RerankWeights::default();
        assert!((SubScores::from_array([1.0; 7]).combine(&w) - 1.0).abs() < 1e-12);
        assert_eq!(SubScores::default().combine(&w), 0.0);
        let only_field = RerankWeights::from_array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let s = SubScores { field: 0.4, ..SubScores::from_array([0.9; 7]) };
        assert_eq!(s.combine(&only_field), 0.4);
    }

    #[test]
    fn normalization_rescales_and_rejects_bad_input() {
        let w = RerankWeights::from_array([2.0; 7]).normalized().unwrap();
        assert!((w.field - 1.0 / 7.0).abs() < 1e-15);
        assert!(RerankWeights::from_array([0.0; 7]).normalized().is_err());
        assert!(FusionWeights { vector: -1.0, object: 1.0, path: 1.0 }.normalized().is_err());
    }
}
