//! Shared fixtures for the criterion benchmarks.

use hstiefel::{random_point, StiefelPoint};

/// Deterministic sample points over the `(n, k)` grid used by the benches.
pub fn sample_points(n: usize, k: usize, count: u64) -> Vec<StiefelPoint> {
    (0..count)
        .map(|seed| random_point(n, k, seed).expect("valid dimensions"))
        .collect()
}
