//! Counter-based deterministic random number generator.
//!
//! Every draw is a pure function of (seed, counter), so streams are
//! platform-independent and can be restarted from any counter position.
//! Used only for optional stochastic stimulus generation; core dynamics
//! are noise-free.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stateless mixing function: value of draw `counter` for a given seed.
/// SplitMix64 finalizer applied to a counter-indexed state.
pub fn draw(seed: u64, counter: u64) -> u64 {
    let mut z = seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic stream over [`draw`]. Cloning or rebuilding from
/// `(seed, counter)` continues the exact same sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed, counter: 0 }
    }

    /// Resume a stream at an arbitrary counter position.
    pub fn at(seed: u64, counter: u64) -> Self {
        CounterRng { seed, counter }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = draw(self.seed, self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
