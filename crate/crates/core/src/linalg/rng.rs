//! Counter-based, splittable 64-bit generator.
//!
//! The stream is fully determined by a 64-bit key:
//!
//! ```text
//! mix(z)   = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!            z ^= z >> 27; z *= 0x94D049BB133111EB;
//!            z ^  z >> 31                              (wrapping u64)
//! word(i)  = mix(key + (i + 1) * 0x9E3779B97F4A7C15)   (i = 0, 1, 2, ...)
//! split(s) = key' = mix(key ^ mix(s * 0x9E3779B97F4A7C15 + 0xD1B54A32D192ED03))
//! uniform  = (word >> 11) * 2^-53                      in [0, 1)
//! gaussian = Box-Muller on u1 = 1 - uniform, u2 = uniform:
//!            r = sqrt(-2 ln u1), (r cos 2πu2, r sin 2πu2)
//! ```
//!
//! A fresh generator from `seed` uses `key = seed`. Every value is a pure
//! function of `(key, counter)`, so any language can reproduce a stream.

use num_complex::Complex64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SPLIT_OFFSET: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { key: seed, counter: 0 }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream; depends only on this key and `stream`, not on the counter.
    pub fn split(&self, stream: u64) -> Self {
        let salt = mix64(stream.wrapping_mul(GOLDEN_GAMMA).wrapping_add(SPLIT_OFFSET));
        Self::new(mix64(self.key ^ salt))
    }

    /// Word at an arbitrary position, without advancing.
    pub fn word_at(&self, index: u64) -> u64 {
        mix64(self.key.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = self.word_at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        w
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Integer in `[lo, hi)`; `hi > lo`.
    pub fn index_range(&mut self, lo: usize, hi: usize) -> usize {
        assert!(hi > lo, "empty range");
        lo + (self.uniform() * (hi - lo) as f64) as usize
    }

    /// Two independent standard normals (Box-Muller).
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        (r * t.cos(), r * t.sin())
    }

    /// Complex standard normal: `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let (a, b) = self.gaussian_pair();
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }
}
