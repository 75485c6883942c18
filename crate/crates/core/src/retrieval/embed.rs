//! Feature-hashed bag-of-tokens embeddings.
//!
//! Each token is hashed with seeded XXH64; the low bits pick a bucket in
//! `[0, dim)` and the top bit picks the sign. The accumulated vector is
//! L2-normalized.

use std::hash::Hasher;

use twox_hash::XxHash64;

use crate::error::{Error, Result};

pub const HASH_NAME: &str = "xxh64";
pub const DEFAULT_DIM: usize = 256;
pub const DEFAULT_SEED: u64 = 0x5eed_1a7e_2026_0001;

/// Lowercase alphanumeric runs; underscores and punctuation separate tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn token_hash(token: &str, seed: u64) -> u64 {
    let mut h = XxHash64::with_seed(seed);
    h.write(token.as_bytes());
    h.finish()
}

/// Bucket and sign a token lands on.
pub fn token_slot(token: &str, dim: usize, seed: u64) -> (usize, f64) {
    let h = token_hash(token, seed);
    let idx = (h % dim as u64) as usize;
    let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
    (idx, sign)
}

pub fn embed<S: AsRef<str>>(bag: &[S], dim: usize, seed: u64) -> Result<Vec<f64>> {
    if bag.is_empty() || dim == 0 {
        return Err(Error::EmptyInput);
    }
    let mut v = vec![0.0; dim];
    for t in bag {
        let (i, s) = token_slot(t.as_ref(), dim, seed);
        v[i] += s;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(v)
}

pub fn cosine(q: &[f64], e: &[f64]) -> Result<f64> {
    if q.len() != e.len() {
        return Err(Error::DimensionMismatch {
            left: q.len(),
            right: e.len(),
        });
    }
    let nq = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let ne = e.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nq == 0.0 || ne == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dot: f64 = q.iter().zip(e).map(|(a, b)| a * b).sum();
    Ok((dot / (nq * ne)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_splits_snake_case_and_lowercases() {
        assert_eq!(tokenize("Chest_pain, ECG-normal!"), ["chest", "pain", "ecg", "normal"]);
        assert!(tokenize("  --  ").is_empty());
    }

    #[test]
    fn embedding_is_deterministic_and_unit_length() {
        let a = embed(&["chest", "pain"], DEFAULT_DIM, DEFAULT_SEED).unwrap();
        let b = embed(&["chest", "pain"], DEFAULT_DIM, DEFAULT_SEED).unwrap();
        assert_eq!(a, b);
        let n: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_token_keeps_direction() {
        let a = embed(&["ecg"], DEFAULT_DIM, DEFAULT_SEED).unwrap();
        let b = embed(&["ecg", "ecg"], DEFAULT_DIM, DEFAULT_SEED).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn disjoint_tokens_on_distinct_buckets_are_orthogonal() {
        let (ia, _) = token_slot("troponin", DEFAULT_DIM, DEFAULT_SEED);
        let (ib, _) = token_slot("cough", DEFAULT_DIM, DEFAULT_SEED);
        // oracle: the chosen pair must not collide under the pinned seed
        assert_ne!(ia, ib);
        let a = embed(&["troponin"], DEFAULT_DIM, DEFAULT_SEED).unwrap();
        let b = embed(&["cough"], DEFAULT_DIM, DEFAULT_SEED).unwrap();
        assert_eq!(cosine(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn empty_bag_is_rejected() {
        assert!(matches!(embed::<&str>(&[], 8, 1), Err(Error::EmptyInput)));
    }

    #[test]
    fn cosine_reference_cases() {
        let v = [0.3, -1.2, 2.0];
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        assert!((cosine(&v, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 2.0]).unwrap(), 0.0);
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroVector)));
        assert!(cosine(&[1.0], &[1.0, 0.0]).is_err());
    }
}
