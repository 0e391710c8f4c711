//! Content digests over canonical JSON serializations.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::env::{Observation, WorldState};

/// Identifies the code/format generation that wrote a run.
pub const CODE_VERSION: &str = concat!("planex/", env!("CARGO_PKG_VERSION"), "/fmt1");

/// Hex SHA-256 of the value's JSON serialization. Struct field order and
/// BTreeMap keys make the serialization canonical.
pub fn digest_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable value");
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_state(state: &WorldState) -> String {
    digest_json(state)
}

pub fn digest_observation(obs: &Observation) -> String {
    digest_json(obs)
}

/// First 8 bytes of the digest as a seed-mixing key.
pub fn digest_key64<T: Serialize>(value: &T) -> u64 {
    let hex = digest_json(value);
    u64::from_str_radix(&hex[..16], 16).expect("hex digest")
}
