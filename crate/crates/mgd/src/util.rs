//! Small numeric and formatting helpers shared across modules.

/// Number of unordered pairs {i, j}, i < j, drawn from `n` items.
pub fn binom2(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Deterministic cascade summation over `xs` in slice order. The result
/// depends only on the contents and order of the slice, never on thread
/// count or chunking, so parallel producers can collect into an indexed
/// buffer and reduce here.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean via pairwise summation.
pub fn mean(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample mean and unbiased sample variance.
pub fn mean_and_var(xs: &[f64]) -> (f64, f64) {
    assert!(xs.len() >= 2, "need at least two samples");
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|&x| (x - m) * (x - m)).collect();
    (m, pairwise_sum(&sq) / (xs.len() - 1) as f64)
}

/// Standard error of the sample mean (0 for a single sample).
pub fn stderr_of_mean(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let (_, var) = mean_and_var(xs);
    (var / xs.len() as f64).sqrt()
}

/// Format a float with 17 significant digits; parsing the result recovers
/// the exact same bits for every finite f64.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// FNV-1a over bytes. Stable across platforms and toolchain releases; used
/// for the config-hash trailer in CSV outputs.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}
