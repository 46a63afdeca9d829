//! Small numeric and seeding helpers shared across modules.

/// Seed for the k-th member of a seed stream. `ChaCha8Rng::seed_from_u64`
/// scrambles the value, so consecutive seeds give independent streams.
pub(crate) fn derive_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

/// Offset separating the generator stream from the surrogate stream inside
/// one replication, so the two never collide for any replication index.
pub(crate) const SEED_STREAM_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

/// Base seed for the surrogate ensemble of replication `rep`. Strided so no
/// two replications share any member seed (members add indices < 2^32).
pub(crate) fn replication_mc_seed(base: u64, rep: u64) -> u64 {
    base.wrapping_add(SEED_STREAM_OFFSET)
        .wrapping_add(rep << 32)
}

/// FNV-1a over a label; used to derive a market seed from (base seed, label)
/// without depending on hash implementations that may change across releases.
pub(crate) fn fnv1a64(data: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in data.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population variance (divides by n).
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

/// Linear-interpolation quantile of pre-sorted data (R type 7).
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
