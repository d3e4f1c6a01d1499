//! Common result carrier for Monte Carlo estimates.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Where a result came from: a short hash of the canonical experiment
/// description, the base seed, and the crate version that produced it.
/// Every emitted output row carries `config_hash` so results on disk can
/// always be traced back to the exact run that wrote them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    /// Build provenance from a canonical textual description of the
    /// experiment (spec rendering plus replicate count) and the base seed.
    pub fn new(canonical: &str, seed: u64) -> Self {
        Provenance {
            config_hash: short_hash(canonical),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// First 16 hex characters of SHA-256 over the canonical text.
pub fn short_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// A Monte Carlo estimate with its uncertainty.
///
/// `wilson` is populated for proportion-valued estimates (coverage
/// indicator experiments) and absent for continuous means, where
/// `std_error` is the right uncertainty measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub estimate: f64,
    pub std_error: f64,
    pub wilson: Option<(f64, f64)>,
    pub replicates: u64,
    pub provenance: Provenance,
}
