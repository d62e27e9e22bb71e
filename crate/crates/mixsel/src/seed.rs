//! Deterministic seed derivation for independent random streams.
//!
//! All randomness in the crate flows through explicit `u64` seeds. Whenever a
//! routine needs several independent streams (replications of an experiment,
//! weight draws per model, simulator restarts), it derives one child seed per
//! stream from its master seed with [`derive_seed`]. The derivation is a pure
//! function, so results are reproducible regardless of evaluation order or
//! thread count.

/// Distinct purposes for derived streams, kept apart so that e.g. replication
/// 3 of the simulator never shares a stream with replication 3 of the weight
/// draws.
pub mod tag {
    pub const PROCESS: u64 = 1;
    pub const WEIGHTS: u64 = 2;
    pub const DAM_BLOCK: u64 = 3;
    pub const REPLICATION: u64 = 4;
}

/// Derives a child seed from `(master, stream, tag)` via SplitMix64 mixing.
pub fn derive_seed(master: u64, stream: u64, tag: u64) -> u64 {
    let mut z = master;
    z = mix(z.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    z = mix(z.wrapping_add(tag.wrapping_mul(0xBF58_476D_1CE4_E5B9)));
    mix(z)
}

// The SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
