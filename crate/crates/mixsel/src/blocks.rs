//! The odd-block device for dependent samples.
//!
//! A sample `X_1, …, X_n` (1-based) is cut into `p` blocks of `q` consecutive
//! observations separated by gaps of the same length: block `k` is
//! `I_k = {2kq + 1, …, (2k+1)q}` for `k = 0, …, p−1`. Only the observations
//! inside the blocks — half the data — enter any statistic; the gaps exist so
//! that, for mixing processes, the blocks behave almost like independent
//! draws. Empirical quantities are built from block means:
//! `L_q t(A_k)` is the mean of `t` over block `k`, and the blocked empirical
//! measure is `P_A t = (1/p) Σ_k L_q t(A_k)`.

use serde::Serialize;

use crate::basis::{BasisLabel, Model};
use crate::error::{Error, Result};

/// How the theoretically recommended asymptotic range for the number of
/// blocks, `½√n (ln n)² ≤ p ≤ √n (ln n)²`, relates to what is achievable
/// at this `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRange {
    pub lo: f64,
    pub hi: f64,
    /// Whether any admissible `(p, q)` pair lands inside the range. At small
    /// `n` the lower end exceeds the hard ceiling `p ≤ n/2`, so the range is
    /// empty in practice.
    pub satisfiable: bool,
    /// Whether the constructed scheme's `p` is inside the range.
    pub p_in_range: bool,
}

/// A block layout: `p` blocks of length `q` inside a sample of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockScheme {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// Trailing observations beyond position `2pq` that no block or gap uses.
    pub discarded: usize,
    pub asymptotic_range: AsymptoticRange,
}

/// Builds the default block layout for a sample of size `n`.
///
/// The block length defaults to `q = max(1, ⌊√n / (2 (ln n)²)⌋)` — which is 1
/// for every desk-scale `n` — and `p = ⌊n / (2q)⌋`. An explicit `q_override`
/// must leave at least two blocks, i.e. `q < n/4`.
pub fn make_blocks(n: usize, q_override: Option<usize>) -> Result<BlockScheme> {
    if n < 8 {
        return Err(Error::SampleTooSmall { n, what: "block construction", min: 8 });
    }
    let q = match q_override {
        Some(q) => {
            if q == 0 || 4 * q >= n {
                return Err(Error::BlockLengthTooLarge { q, n });
            }
            q
        }
        None => {
            let nf = n as f64;
            let formula = (nf.sqrt() / (2.0 * nf.ln().powi(2))).floor() as usize;
            formula.max(1)
        }
    };
    let p = n / (2 * q);
    BlockScheme::explicit(n, p, q)
}

impl BlockScheme {
    /// Builds a layout with explicit `p` and `q` (mostly useful for small
    /// hand-checked fixtures; [`make_blocks`] is the standard route).
    pub fn explicit(n: usize, p: usize, q: usize) -> Result<BlockScheme> {
        if p < 2 || q < 1 || 2 * p * q > n {
            return Err(Error::InvalidBlockLayout { n, p, q });
        }
        let nf = n as f64;
        let lo = 0.5 * nf.sqrt() * nf.ln().powi(2);
        let hi = 2.0 * lo;
        let mut satisfiable = false;
        let mut q_scan = 1usize;
        loop {
            let p_scan = n / (2 * q_scan);
            if (p_scan as f64) < lo || p_scan < 2 {
                break;
            }
            if (p_scan as f64) <= hi {
                satisfiable = true;
                break;
            }
            q_scan += 1;
        }
        let pf = p as f64;
        let asymptotic_range =
            AsymptoticRange { lo, hi, satisfiable, p_in_range: pf >= lo && pf <= hi };
        Ok(BlockScheme { n, p, q, discarded: n - 2 * p * q, asymptotic_range })
    }

    /// 0-based index range of block `k` in the data vector.
    pub fn block_range(&self, k: usize) -> std::ops::Range<usize> {
        debug_assert!(k < self.p);
        let start = 2 * k * self.q;
        start..start + self.q
    }

    /// Number of observations that actually enter statistics (`pq`).
    pub fn used_len(&self) -> usize {
        self.p * self.q
    }
}

/// A sample of points in [0, 1) together with its block layout.
#[derive(Debug, Clone)]
pub struct BlockedSample {
    data: Vec<f64>,
    scheme: BlockScheme,
}

impl BlockedSample {
    /// Wraps raw data under a layout, validating the domain: every
    /// observation must lie in [0, 1).
    pub fn new(data: Vec<f64>, scheme: BlockScheme) -> Result<BlockedSample> {
        if data.len() != scheme.n {
            return Err(Error::InvalidBlockLayout {
                n: data.len(),
                p: scheme.p,
                q: scheme.q,
            });
        }
        for (index, &value) in data.iter().enumerate() {
            if !(0.0..1.0).contains(&value) {
                return Err(Error::DataOutOfDomain { index, value });
            }
        }
        Ok(BlockedSample { data, scheme })
    }

    /// Builds a sample directly from the concatenated block contents
    /// (`used.len() = pq`), synthesizing the never-read gap positions.
    ///
    /// Convenient for fixtures where only the block data is specified.
    pub fn from_odd_blocks(used: &[f64], q: usize) -> Result<BlockedSample> {
        if q == 0 || used.len() % q != 0 {
            return Err(Error::InvalidBlockLayout { n: used.len(), p: 0, q });
        }
        let p = used.len() / q;
        let scheme = BlockScheme::explicit(2 * p * q, p, q)?;
        let mut data = vec![0.0; scheme.n];
        for k in 0..p {
            data[scheme.block_range(k)].copy_from_slice(&used[k * q..(k + 1) * q]);
        }
        BlockedSample::new(data, scheme)
    }

    pub fn scheme(&self) -> &BlockScheme {
        &self.scheme
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// The observations of block `k`.
    pub fn block(&self, k: usize) -> &[f64] {
        &self.data[self.scheme.block_range(k)]
    }
}

/// The block means `L_q ψ_λ(A_k)`, `k = 0, …, p−1`.
pub fn block_means(sample: &BlockedSample, model: &Model, label: BasisLabel) -> Result<Vec<f64>> {
    let f = model.function(label)?;
    let scheme = sample.scheme();
    let mut means = Vec::with_capacity(scheme.p);
    for k in 0..scheme.p {
        let block = sample.block(k);
        let sum: f64 = block.iter().map(|&x| f.eval(x)).sum();
        means.push(sum / scheme.q as f64);
    }
    Ok(means)
}

/// The blocked empirical coefficient `P_A ψ_λ`, the mean of the block means.
pub fn block_empirical(sample: &BlockedSample, model: &Model, label: BasisLabel) -> Result<f64> {
    let means = block_means(sample, model, label)?;
    Ok(means.iter().sum::<f64>() / means.len() as f64)
}

/// First two block-mean moments for every λ of a model, accumulated in one
/// pass over the blocks.
///
/// `coeffs[slot]` is `P_A ψ_λ` and `mean_sq_sums[slot]` is `Σ_k L_q ψ_λ(A_k)²`
/// — everything the contrast, the resampling penalty and the risk need.
#[derive(Debug, Clone)]
pub struct ModelBlockStats {
    pub coeffs: Vec<f64>,
    pub mean_sq_sums: Vec<f64>,
    pub p: usize,
}

pub fn model_block_stats(sample: &BlockedSample, model: &Model) -> ModelBlockStats {
    let scheme = sample.scheme();
    let dim = model.dim();
    let qf = scheme.q as f64;
    let mut sums = vec![0.0; dim];
    let mut sq_sums = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    let mut touched = Vec::with_capacity(scheme.q * 16);
    for k in 0..scheme.p {
        touched.clear();
        for &x in sample.block(k) {
            model.for_each_nonzero(x, |slot, v| {
                if scratch[slot] == 0.0 {
                    touched.push(slot);
                }
                scratch[slot] += v;
            });
        }
        for &slot in &touched {
            let mean = scratch[slot] / qf;
            sums[slot] += mean;
            sq_sums[slot] += mean * mean;
            scratch[slot] = 0.0;
        }
    }
    let pf = scheme.p as f64;
    for s in &mut sums {
        *s /= pf;
    }
    ModelBlockStats { coeffs: sums, mean_sq_sums: sq_sums, p: scheme.p }
}

/// The full block-mean matrix, row-major `[slot * p + k]`.
///
/// Only the Monte-Carlo penalty needs it; everything else gets by with the
/// two moments from [`model_block_stats`].
pub fn block_mean_matrix(sample: &BlockedSample, model: &Model) -> Vec<f64> {
    let scheme = sample.scheme();
    let dim = model.dim();
    let qf = scheme.q as f64;
    let mut matrix = vec![0.0; dim * scheme.p];
    for k in 0..scheme.p {
        for &x in sample.block(k) {
            model.for_each_nonzero(x, |slot, v| matrix[slot * scheme.p + k] += v);
        }
    }
    for entry in &mut matrix {
        *entry /= qf;
    }
    matrix
}
