//! Stable seed derivation.
//!
//! Parallel workers each get their own RNG stream, derived from the master
//! seed and string labels, so results never depend on scheduling order.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with any number of labels into a new seed.
///
/// Labels are length-prefixed, so `["ab", "c"]` and `["a", "bc"]` differ.
pub fn derive_seed(master: u64, labels: &[&str]) -> u64 {
    let mut h = FNV_OFFSET ^ splitmix64(master);
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
    };
    for label in labels {
        feed(&(label.len() as u64).to_le_bytes());
        feed(label.as_bytes());
    }
    splitmix64(h)
}
