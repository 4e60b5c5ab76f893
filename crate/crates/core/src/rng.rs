//! Deterministic PRNG primitives shared by subset sampling and run simulation.
//!
//! Reproducibility across runs, platforms, and reimplementations in other
//! languages is a hard requirement for the experiment plans this toolkit
//! emits, so the generator and every derived draw rule are pinned here:
//!
//! * `SplitMix64` with the usual golden-gamma increment and 64-bit finalizer.
//! * `next_f64` maps the high 53 bits to `(0, 1]`.
//! * `partial_shuffle` is a partial Fisher–Yates over the input order using a
//!   modulo draw `j = i + next_u64() % (len - i)`.
//! * `derive_seed` combines a seed with a tag via
//!   `mix64(seed ^ tag * GOLDEN_GAMMA)`.
//! * `normal` draws one Box–Muller deviate (cosine branch) per call.
//!
//! None of these may change without versioning every emitted artifact.

/// Weyl-sequence increment used by SplitMix64.
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: avalanche mix of a 64-bit word.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a stream seed from a base seed and a tag (domain, index, repeat).
///
/// Chained application gives hierarchical streams:
/// `derive_seed(derive_seed(seed, i), j)`.
#[inline]
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    mix64(seed ^ tag.wrapping_mul(GOLDEN_GAMMA))
}

/// Minimal SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw in `(0, 1]` using the high 53 bits.
    ///
    /// The `+1` keeps the value strictly positive so it is safe under `ln`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `[0, bound)` via modulo draw.
    ///
    /// The modulo bias is below 2^-50 for any realistic dataset size and the
    /// rule is trivial to replicate in other languages, which is the point.
    #[inline]
    pub fn next_index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        (self.next_u64() % bound as u64) as usize
    }

    /// One standard normal deviate via Box–Muller (cosine branch).
    ///
    /// Consumes exactly two uniforms; the sine companion is discarded so the
    /// draw count per record stays fixed.
    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_f64();
        let u2 = self.next_f64();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        r * libm::cos(2.0 * core::f64::consts::PI * u2)
    }
}

/// Partial Fisher–Yates: permute `items` so its first `n` slots hold the draw.
///
/// Only the first `n` positions are defined output; callers truncate.
pub fn partial_shuffle<T>(rng: &mut SplitMix64, items: &mut [T], n: usize) {
    debug_assert!(n <= items.len());
    for i in 0..n {
        let j = i + rng.next_index(items.len() - i);
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference stream values frozen from an independent implementation of
    // the SplitMix64 rules above.
    #[test]
    fn splitmix64_reference_stream() {
        let mut rng = SplitMix64::new(42);
        assert_eq!(rng.next_u64(), 0xbdd732262feb6e95);
        assert_eq!(rng.next_u64(), 0x28efe333b266f103);
        assert_eq!(rng.next_u64(), 0x47526757130f9f52);
        assert_eq!(rng.next_u64(), 0x581ce1ff0e4ae394);
    }

    #[test]
    fn next_f64_reference_stream() {
        let mut rng = SplitMix64::new(7);
        assert_eq!(rng.next_f64(), 0.3898297483912716);
        assert_eq!(rng.next_f64(), 0.016788294528156222);
        assert_eq!(rng.next_f64(), 0.9007606806068835);
    }

    #[test]
    fn next_f64_stays_in_unit_interval() {
        let mut rng = SplitMix64::new(0xDEAD_BEEF);
        for _ in 0..10_000 {
            let x = rng.next_f64();
            assert!(x > 0.0 && x <= 1.0);
        }
    }

    #[test]
    fn box_muller_reference_values() {
        let mut rng = SplitMix64::new(7);
        assert_eq!(rng.next_normal(), 1.364992297457228);
        assert_eq!(rng.next_normal(), -0.3965239752538177);
    }

    #[test]
    fn derive_seed_reference_values() {
        assert_eq!(derive_seed(1, 0), 0x5692161d100b05e5);
        assert_eq!(
            derive_seed(derive_seed(derive_seed(9, 2), 3), 4),
            0x2da2f56345d14703
        );
    }

    #[test]
    fn partial_shuffle_draws_prefix() {
        let mut rng = SplitMix64::new(42);
        let mut items: Vec<u32> = (0..10).collect();
        partial_shuffle(&mut rng, &mut items, 10);
        let mut sorted = items.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
    }
}
