//! Insertion sort, top-down merge sort, and the merge/insertion hybrid.
//!
//! All three are written against `PartialOrd + Copy` so the stability tests
//! can sort tagged pairs; the benchmarks only ever sort `f64`.

use std::fmt;
use std::num::NonZeroUsize;

use crate::error::{Error, Result};

/// The sweep used by the hybrid-sort experiment.
pub const DEFAULT_THRESHOLDS: [usize; 6] = [16, 32, 64, 128, 256, 512];

/// Partitions of at most `threshold` elements are handed to insertion sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HybridConfig {
    threshold: NonZeroUsize,
}

impl HybridConfig {
    pub fn new(threshold: usize) -> Result<Self> {
        NonZeroUsize::new(threshold)
            .map(|threshold| Self { threshold })
            .ok_or_else(|| Error::Config("hybrid threshold must be at least 1".into()))
    }

    pub fn threshold(self) -> usize {
        self.threshold.get()
    }
}

impl fmt::Display for HybridConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K={}", self.threshold)
    }
}

/// Shift-based insertion sort of `v[lo..hi]`. Stable.
///
/// Panics if the range is out of bounds.
pub fn insertion_sort_range<T: PartialOrd + Copy>(v: &mut [T], lo: usize, hi: usize) {
    assert!(lo <= hi && hi <= v.len(), "range {lo}..{hi} out of bounds");
    for i in lo + 1..hi {
        let item = v[i];
        let mut j = i;
        while j > lo && item < v[j - 1] {
            v[j] = v[j - 1];
            j -= 1;
        }
        v[j] = item;
    }
}

pub fn insertion_sort<T: PartialOrd + Copy>(v: &mut [T]) {
    insertion_sort_range(v, 0, v.len());
}

/// Merges the sorted runs `v[lo..mid]` and `v[mid..hi]` in place, using
/// `scratch` for a copy of the left run. Ties keep the left element first.
pub fn merge<T: PartialOrd + Copy>(
    v: &mut [T],
    lo: usize,
    mid: usize,
    hi: usize,
    scratch: &mut Vec<T>,
) {
    debug_assert!(lo <= mid && mid <= hi && hi <= v.len());
    scratch.clear();
    scratch.extend_from_slice(&v[lo..mid]);

    let (mut left, mut right, mut out) = (0, mid, lo);
    while left < scratch.len() && right < hi {
        if v[right] < scratch[left] {
            v[out] = v[right];
            right += 1;
        } else {
            v[out] = scratch[left];
            left += 1;
        }
        out += 1;
    }
    // Whatever remains of the right run is already in place.
    let rest = scratch.len() - left;
    v[out..out + rest].copy_from_slice(&scratch[left..]);
}

/// Top-down merge sort. The scratch buffer is allocated once per call.
pub fn merge_sort<T: PartialOrd + Copy>(v: &mut [T]) {
    let mut scratch = Vec::with_capacity(v.len() / 2 + 1);
    sort_recursive(v, 0, v.len(), 1, &mut scratch);
}

/// Merge sort that switches to insertion sort on partitions of size `<= K`.
pub fn hybrid_sort<T: PartialOrd + Copy>(v: &mut [T], cfg: HybridConfig) {
    let mut scratch = Vec::with_capacity(v.len() / 2 + 1);
    sort_recursive(v, 0, v.len(), cfg.threshold(), &mut scratch);
}

fn sort_recursive<T: PartialOrd + Copy>(
    v: &mut [T],
    lo: usize,
    hi: usize,
    cutoff: usize,
    scratch: &mut Vec<T>,
) {
    let len = hi - lo;
    if len <= 1 {
        return;
    }
    if len <= cutoff {
        insertion_sort_range(v, lo, hi);
        return;
    }
    let mid = lo + len / 2;
    sort_recursive(v, lo, mid, cutoff, scratch);
    sort_recursive(v, mid, hi, cutoff, scratch);
    merge(v, lo, mid, hi, scratch);
}
