use sha2::{Digest, Sha256};

use super::{ScoreRecord, ScoreTable};
use crate::corpus::BiasSample;

/// Maps (seed, sample id) to [0, 1) through SHA-256; identical on every
/// platform.
pub fn mock_probability(seed: u64, sample_id: &str) -> f64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(sample_id.as_bytes());
    let digest = hasher.finalize();
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    // top 53 bits -> exactly representable double in [0, 1)
    (u64::from_le_bytes(word) >> 11) as f64 / (1u64 << 53) as f64
}

pub fn mock_score(samples: &[BiasSample], seed: u64) -> ScoreTable {
    let mut table = ScoreTable::default();
    for s in samples {
        if table.contains(&s.sample_id) {
            continue;
        }
        table
            .insert(ScoreRecord::new(
                s.sample_id.clone(),
                mock_probability(seed, &s.sample_id),
            ))
            .expect("mock probabilities lie in [0, 1)");
    }
    table
}
