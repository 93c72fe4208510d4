//! SplitMix64 input generation.
//!
//! Every benchmark input is drawn from this generator so that independently
//! built components see bit-identical data for the same seed. The float
//! mapping is part of the contract: change it and the golden fixtures break.

/// Golden-ratio increment added to the state on every draw.
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

const MIX_MUL_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_MUL_2: u64 = 0x94D0_49BB_1331_11EB;

/// Lower bound of generated values (inclusive).
pub const VALUE_MIN: f64 = 1.0;
/// Width of the generated value range; values lie in `[1.0, 65536.0)`.
pub const VALUE_SPAN: f64 = 65535.0;

/// The SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_MUL_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_MUL_2);
    z ^ (z >> 31)
}

/// Maps a raw 64-bit draw onto `[1.0, 65536.0)` using its top 53 bits.
#[inline]
pub fn value_from_bits(raw: u64) -> f64 {
    // 2^-53 as an exact power of two.
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    VALUE_MIN + ((raw >> 11) as f64 * SCALE) * VALUE_SPAN
}

/// A SplitMix64 stream. Not shareable across threads; give each task its
/// own seed instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    seed: u64,
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { seed, state: seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    #[inline]
    pub fn next_value_f64(&mut self) -> f64 {
        value_from_bits(self.next_u64())
    }

    /// `n` consecutive values, in draw order.
    pub fn make_sort_vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_value_f64()).collect()
    }

    /// All `n` keys are drawn before any of the `n` values.
    pub fn make_kv_workload(&mut self, n: usize) -> KeyValueWorkload {
        let keys = (0..n).map(|_| self.next_u64()).collect();
        let values = (0..n).map(|_| self.next_value_f64()).collect();
        KeyValueWorkload { keys, values }
    }
}

/// Paired key and value vectors for the dictionary benchmarks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KeyValueWorkload {
    keys: Vec<u64>,
    values: Vec<f64>,
}

impl KeyValueWorkload {
    /// Returns `None` when the vectors differ in length.
    pub fn new(keys: Vec<u64>, values: Vec<f64>) -> Option<Self> {
        (keys.len() == values.len()).then_some(Self { keys, values })
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.keys.iter().copied().zip(self.values.iter().copied())
    }
}

/// XOR of the IEEE-754 bit patterns, used to compare inputs across components.
pub fn f64_checksum(values: &[f64]) -> u64 {
    values.iter().fold(0, |acc, v| acc ^ v.to_bits())
}

pub fn u64_checksum(values: &[u64]) -> u64 {
    values.iter().fold(0, |acc, v| acc ^ v)
}
