//! Counter-based random stream derivation.
//!
//! Every random quantity in a run is drawn from a stream identified by a
//! chain of labels hashed into the master seed (e.g. seed → n → trial →
//! purpose). Streams never depend on execution order, so trials can run on
//! any number of workers and still reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The concrete generator behind every stream.
pub type StreamRng = ChaCha8Rng;

/// Identity of a random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey(u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey(splitmix64(seed))
    }

    /// Derive a child key. Distinct labels give unrelated streams.
    pub fn child(self, label: u64) -> Self {
        StreamKey(splitmix64(
            self.0 ^ splitmix64(label.wrapping_add(0x5851_F42D_4C95_7F2D)),
        ))
    }

    /// Open the stream for `purpose` under this key.
    pub fn rng(self, purpose: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(purpose);
        rng
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}
