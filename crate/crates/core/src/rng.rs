//! Reproducible random streams.
//!
//! A [`RandomSource`] names a `(seed, stream)` pair. Each pair maps to one
//! ChaCha12 keystream (`rand_chacha` 0.3): the key is expanded from the seed
//! with `SeedableRng::seed_from_u64` and the stream id selects the ChaCha
//! nonce. Child streams are derived by mixing a tag into the stream id with
//! the SplitMix64 finalizer, so trials and cells fan out deterministically
//! without sharing any generator state.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Generator family backing every [`RandomSource`].
pub type StreamRng = ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Derive an independent stream identified by `tag`.
    pub fn child(&self, tag: u64) -> RandomSource {
        let mixed = splitmix64(self.stream ^ splitmix64(tag.wrapping_add(0x9E37_79B9_7F4A_7C15)));
        RandomSource::new(self.seed, mixed)
    }

    /// Convenience for `child` keyed by a string label.
    pub fn named(&self, label: &str) -> RandomSource {
        self.child(fnv1a64(label.as_bytes()))
    }
}

/// A uniform threshold in `(0, 1]`, so that `r ≤ 0` never fires.
pub fn threshold(source: &RandomSource) -> f64 {
    use rand::Rng;
    1.0 - source.rng().gen::<f64>()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a. Stable across platforms and toolchains, unlike `DefaultHasher`.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
