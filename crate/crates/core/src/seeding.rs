//! Deterministic random substreams keyed by experiment coordinates.
//!
//! Each independent unit of work (one allocation, one block of symbols)
//! gets its own generator seeded from the master seed and a tuple of tags,
//! so results never depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::array::{draw_allocation, ArrayGeometry, FrequencyAllocation};

pub(crate) const TAG_ALLOCATION: u64 = 0xA110C;
pub(crate) const TAG_SYMBOLS: u64 = 0x5E3B015;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `tags` into `master`; distinct tag tuples give unrelated seeds.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn substream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tags))
}

/// Where the per-draw subcarrier allocations come from.
#[derive(Debug, Clone, PartialEq)]
pub enum AllocationSource {
    /// Fresh uniform draw for every index, keyed by the master seed.
    Seeded(u64),
    /// The same user-supplied allocation for every index.
    Fixed(FrequencyAllocation),
}

impl AllocationSource {
    pub fn allocation(&self, geom: &ArrayGeometry, index: u64) -> FrequencyAllocation {
        match self {
            AllocationSource::Seeded(master) => {
                draw_allocation(geom, &mut substream(*master, &[TAG_ALLOCATION, index]))
            }
            AllocationSource::Fixed(alloc) => alloc.clone(),
        }
    }
}
