use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_core::{impls, RngCore};

/// SplitMix64: 64-bit state, Weyl increment `0x9e3779b97f4a7c15`, and the
/// variant-13 finalizer. Output is identical on every platform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }
}

impl RngCore for SplitMix64 {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        impls::fill_bytes_via_next(self, dst)
    }
}

/// `n` unit-modulus complex numbers with angles uniform in `[0, 2π)`.
pub fn random_gamma(seed: u64, n: usize) -> Vec<Complex64> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| Complex64::from_polar(1.0, TAU * rng.random::<f64>()))
        .collect()
}
