//! Counter-seeded pseudo-random streams.
//!
//! Every trial draws from its own [`SplitMix64`] stream whose seed is a
//! pure function of `(root seed, stream id, trial index)` via
//! [`derive_seed`]. This makes each trial reproducible in isolation and
//! lets any number of workers execute disjoint trial ranges while
//! producing bit-identical aggregates.
//!
//! The generator is the standard SplitMix64 sequence (Steele, Lea &
//! Flood): state advances by the 64-bit golden-ratio constant and outputs
//! pass through the variant-13 finalizer. Test vectors are pinned in the
//! unit tests so the stream can be reproduced in any language.

use libm::{log, sqrt};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xA076_1D64_78BD_642F;
const INDEX_SALT: u64 = 0xE703_7ED1_A0B4_28DB;

/// SplitMix64 finalizer (mix13 constants).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of stream `stream` at counter `index` from the root
/// seed. Defined as
/// `mix64(mix64(root ^ SSALT*(stream+1)) ^ ISALT*(index+1))` with
/// `SSALT = 0xA0761D6478BD642F`, `ISALT = 0xE7037ED1A0B428DB`.
#[inline]
pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    let h = mix64(root ^ STREAM_SALT.wrapping_mul(stream.wrapping_add(1)));
    mix64(h ^ INDEX_SALT.wrapping_mul(index.wrapping_add(1)))
}

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Stream for one trial: `derive_seed(root, stream, index)`.
    pub fn for_trial(root: u64, stream: u64, index: u64) -> Self {
        Self::new(derive_seed(root, stream, index))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`; safe to pass to `log`.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Poisson count with the given mean.
    ///
    /// Knuth's product method, chunked via Poisson additivity so the
    /// running product never underflows for large means.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        debug_assert!(mean >= 0.0 && mean.is_finite());
        let mut remaining = mean;
        let mut total = 0u64;
        while remaining > 0.0 {
            let chunk = if remaining > 32.0 { 32.0 } else { remaining };
            remaining -= chunk;
            let limit = libm::exp(-chunk);
            let mut p = 1.0;
            loop {
                p *= self.uniform_open();
                if p <= limit {
                    break;
                }
                total += 1;
            }
        }
        total
    }

    /// Nearest-BS link distance: `Pr(L >= tau) = exp(-pi*lambda*tau^2)`,
    /// i.e. `L^2` is exponential with rate `pi*lambda`.
    #[inline]
    pub fn rayleigh_link(&mut self, lambda: f64) -> f64 {
        sqrt(-log(self.uniform_open()) / (core::f64::consts::PI * lambda))
    }
}
