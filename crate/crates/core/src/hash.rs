//! Content digests for traces and state snapshots.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the value's compact JSON encoding. Maps in the domain
/// types are ordered, so equal values always encode to equal bytes.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable value");
    hex::encode(Sha256::digest(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_vector() {
        // sha256 of the three bytes `"a"`
        assert_eq!(
            digest("a"),
            "ac8d8342bbb2362d13f0a559a3621bb407011368895164b628a54f7fc33fc43c"
        );
    }
}
