use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-based generator; one per worker, never shared.
pub type RngStream = ChaCha8Rng;

/// Stream `stream_id` of the family keyed by `seed`.
///
/// Streams share the key and differ in the ChaCha stream word, so they do not
/// overlap for any realistic draw count.
pub fn rng_stream(seed: u64, stream_id: u64) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}
