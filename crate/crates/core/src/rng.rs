//! Reproducible random streams.
//!
//! A stream is a ChaCha8 generator keyed by a 64-bit seed with a separate
//! 64-bit stream id. Batches give every draw its own stream, so results do
//! not depend on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    #[serde(rename = "streamId")]
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Stream for draw `index` of a batch rooted at this stream.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream {
            seed: mix(self.seed ^ mix(self.stream_id.wrapping_add(0x9E37_79B9_7F4A_7C15))),
            stream_id: index,
        }
    }

    /// Independent child stream for a named experiment or shard.
    pub fn derive(&self, label: &str) -> RngStream {
        let h = label
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        RngStream {
            seed: mix(self.seed ^ mix(h)),
            stream_id: self.stream_id,
        }
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
