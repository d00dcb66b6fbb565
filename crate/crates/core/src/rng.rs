//! Deterministic counter-mode random source.
//!
//! Every output is a pure function of (seed, stream, draw index), so trial
//! streams can be evaluated in any order — or partitioned across threads —
//! with results identical to a sequential run.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed for the deterministic generators. Any value is valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

/// SplitMix64 finalizer.
fn mix(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// One independent stream of a seed (a trial, an instance draw, ...).
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    draw: u64,
}

impl CounterRng {
    /// Stream `stream` of `seed`. Draws are indexed from zero.
    pub fn new(seed: Seed, stream: u64) -> Self {
        let key = mix(seed.0 ^ mix(stream.wrapping_add(GOLDEN_GAMMA)));
        CounterRng { key, draw: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.draw = self.draw.wrapping_add(1);
        mix(self.key.wrapping_add(self.draw.wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform draw in [0, 1) with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform index in 0..n via rejection sampling.
    ///
    /// Panics if `n == 0`.
    pub fn uniform_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "uniform_index needs a nonempty range");
        let n = n as u64;
        let limit = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < limit {
                return (v % n) as usize;
            }
        }
    }

    /// Standard normal deviate by the Box-Muller transform (two uniforms per
    /// deviate; the sine partner is discarded to keep the draw count fixed).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
