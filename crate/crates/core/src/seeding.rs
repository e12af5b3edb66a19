//! Seed derivation for independent deterministic RNG streams.

/// Mixes a base seed with a salt (splitmix64 finalizer). Every consumer that
/// needs its own stream derives one here so streams stay independent while
/// the whole run remains a pure function of the master seed.
pub fn mix(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
