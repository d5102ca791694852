use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every replica.
pub type ReplicaRng = ChaCha8Rng;

/// Substream `replica` of `master_seed`.
///
/// ChaCha keys the stream from the seed and selects one of 2⁶⁴ independent
/// streams by index, so replica streams never overlap.
pub fn replica_rng(master_seed: u64, replica: u64) -> ReplicaRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replica);
    rng
}
