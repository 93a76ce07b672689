//! Seeded per-replica random streams.
//!
//! Each replica owns an independent xoshiro256++ generator. Its 256-bit
//! state is derived from `(master_seed, stream_index)` with splitmix64:
//! the master seed is mixed once, xored with `stream_index * φ64` (a
//! bijection in the index), and the result seeds a splitmix64 sequence
//! whose first four outputs form the xoshiro state.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

pub const ALGORITHM_ID: &str = "xoshiro256++/splitmix64-v1";

const PHI64: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let key = SplitMix64::seed_from_u64(master_seed).next_u64();
        let mut sm = SplitMix64::seed_from_u64(key ^ stream_index.wrapping_mul(PHI64));
        let mut seed = [0u8; 32];
        sm.fill_bytes(&mut seed);
        RngStream {
            master_seed,
            stream_index,
            inner: Xoshiro256PlusPlus::from_seed(seed),
        }
    }

    pub fn algorithm_id(&self) -> &'static str {
        ALGORITHM_ID
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1)`, for inverse-CDF draws that must avoid 0.
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
