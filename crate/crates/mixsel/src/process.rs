//! Stationary simulators with analytically known marginals.
//!
//! Dependence is injected only through a latent uniform chain; the marginal
//! is then controlled by warping each point through the target's inverse
//! CDF. Monotone warps preserve the dependence structure, so the mixing
//! behavior of the latent chain carries over while `⟨s, ψ_λ⟩` stays exact.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::basis::Model;
use crate::density::{DensitySpec, TrueDensity, MAX_OPEN};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, tag};

/// Minimum admissible burn-in length.
pub const MIN_BURN_IN: usize = 64;

/// Default burn-in. The latent chains forget their start geometrically
/// (rate 1/2 for the Bernoulli autoregression), so 1024 steps are far past
/// machine precision.
pub const DEFAULT_BURN_IN: usize = 1024;

/// The latent dependence mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProcessKind {
    /// Independent draws.
    Iid,
    /// `X_t = (X_{t−1} + ξ_t)/2` with `ξ_t ~ Bernoulli(1/2)`: stationary and
    /// exactly uniform on [0, 1), with autocovariances decaying like 2^{−k}.
    ArBernoulli,
    /// Gaussian AR(1) `Z_t = a Z_{t−1} + ε_t`, standardized to unit
    /// stationary variance and pushed through Φ to a uniform.
    GaussianAr1 { a: f64 },
}

/// A stationary process with a prescribed marginal density on [0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    #[serde(flatten)]
    pub kind: ProcessKind,
    pub target: DensitySpec,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

impl ProcessSpec {
    /// A spec with the default burn-in.
    pub fn new(kind: ProcessKind, target: DensitySpec, seed: u64) -> ProcessSpec {
        ProcessSpec { kind, target, burn_in: DEFAULT_BURN_IN, seed }
    }

    /// Checks the parameters without drawing anything; [`simulate`] calls
    /// this internally, but harnesses can use it to fail fast on bad input.
    pub fn validate(&self) -> Result<()> {
        if let ProcessKind::GaussianAr1 { a } = self.kind {
            if !a.is_finite() || a.abs() >= 1.0 {
                return Err(Error::InvalidArCoefficient(a));
            }
        }
        if self.burn_in < MIN_BURN_IN {
            return Err(Error::BurnInTooShort { given: self.burn_in, min: MIN_BURN_IN });
        }
        Ok(())
    }
}

fn ar_bernoulli_step(x: f64, xi: f64) -> f64 {
    0.5 * (x + xi)
}

/// Draws `n` consecutive observations of the stationary process.
///
/// The latent chain starts from an exact stationary draw and additionally
/// discards `burn_in` steps, then each point is warped through the target's
/// inverse CDF.
pub fn simulate(spec: &ProcessSpec, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::SampleTooSmall { n, what: "a simulated sample", min: 1 });
    }
    spec.validate()?;
    let density = TrueDensity::new(&spec.target)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 0, tag::PROCESS));

    let uniforms: Vec<f64> = match spec.kind {
        ProcessKind::Iid => (0..n).map(|_| rng.gen::<f64>()).collect(),
        ProcessKind::ArBernoulli => {
            let mut x: f64 = rng.gen();
            let bit = |rng: &mut ChaCha8Rng| if rng.gen::<bool>() { 1.0 } else { 0.0 };
            for _ in 0..spec.burn_in {
                x = ar_bernoulli_step(x, bit(&mut rng));
            }
            (0..n)
                .map(|_| {
                    x = ar_bernoulli_step(x, bit(&mut rng));
                    x
                })
                .collect()
        }
        ProcessKind::GaussianAr1 { a } => {
            let scale = (1.0 - a * a).sqrt();
            let phi = Normal::new(0.0, 1.0).expect("standard normal");
            // Exact stationary start: Z_0 ~ N(0, 1/(1 − a²)).
            let mut z: f64 = rng.sample::<f64, _>(StandardNormal) / scale;
            for _ in 0..spec.burn_in {
                z = a * z + rng.sample::<f64, _>(StandardNormal);
            }
            (0..n)
                .map(|_| {
                    z = a * z + rng.sample::<f64, _>(StandardNormal);
                    phi.cdf(z * scale).min(MAX_OPEN)
                })
                .collect()
        }
    };

    Ok(uniforms.into_iter().map(|u| density.inverse_cdf(u)).collect())
}

/// Monte-Carlo estimate of `D_{A,m} = q Σ_λ Var(L_q ψ_λ(A_0))` from `r`
/// independent stationary blocks of length `q`.
pub fn estimate_dam(
    spec: &ProcessSpec,
    model: &Model,
    q: usize,
    replications: usize,
    seed: u64,
) -> Result<f64> {
    if q == 0 {
        return Err(Error::SampleTooSmall { n: q, what: "a stationary block", min: 1 });
    }
    if replications < 100 {
        return Err(Error::TooFewReplications {
            what: "D_{A,m} estimation",
            given: replications,
            min: 100,
        });
    }
    let dim = model.dim();
    let mut sum = vec![0.0f64; dim];
    let mut sum_sq = vec![0.0f64; dim];
    let mut block_mean = vec![0.0f64; dim];
    for r in 0..replications {
        let child = ProcessSpec {
            seed: derive_seed(seed, r as u64, tag::DAM_BLOCK),
            ..spec.clone()
        };
        let block = simulate(&child, q)?;
        block_mean.iter_mut().for_each(|v| *v = 0.0);
        for &x in &block {
            model.for_each_nonzero(x, |slot, value| block_mean[slot] += value);
        }
        for (slot, &m) in block_mean.iter().enumerate() {
            let mean = m / q as f64;
            sum[slot] += mean;
            sum_sq[slot] += mean * mean;
        }
    }
    let r = replications as f64;
    let mut total_var = 0.0;
    for slot in 0..dim {
        total_var += ((sum_sq[slot] - sum[slot] * sum[slot] / r) / (r - 1.0)).max(0.0);
    }
    Ok(q as f64 * total_var)
}

/// The scaled oracle risk index `R̂_{A,m} = n·bias + 2·D̂_{A,m}`, clipped at
/// zero against rounding.
pub fn r_am(n: usize, bias: f64, dam: f64) -> f64 {
    (n as f64 * bias + 2.0 * dam).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use statrs::distribution::ChiSquared;

    fn uniform_spec(kind: ProcessKind, seed: u64) -> ProcessSpec {
        ProcessSpec::new(kind, DensitySpec::Uniform, seed)
    }

    #[test]
    fn bernoulli_recursion_matches_hand_arithmetic() {
        let mut x = 0.0;
        let mut seen = Vec::new();
        for xi in [1.0, 0.0, 1.0] {
            x = ar_bernoulli_step(x, xi);
            seen.push(x);
        }
        assert_eq!(seen, vec![0.5, 0.25, 0.625]);
    }

    #[test]
    fn warp_through_linear_density_takes_square_roots() {
        let density = TrueDensity::new(&DensitySpec::Linear).unwrap();
        assert_abs_diff_eq!(density.inverse_cdf(0.25), 0.5, epsilon = 1e-10);
    }

    #[test]
    fn simulation_is_deterministic_in_the_seed() {
        let spec = uniform_spec(ProcessKind::ArBernoulli, 7);
        let a = simulate(&spec, 200).unwrap();
        let b = simulate(&spec, 200).unwrap();
        assert_eq!(a, b);
        let c = simulate(&uniform_spec(ProcessKind::ArBernoulli, 8), 200).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let spec = uniform_spec(ProcessKind::GaussianAr1 { a: 1.0 }, 0);
        assert_eq!(simulate(&spec, 10).unwrap_err(), Error::InvalidArCoefficient(1.0));
        let spec = uniform_spec(ProcessKind::GaussianAr1 { a: f64::NAN }, 0);
        assert!(matches!(simulate(&spec, 10), Err(Error::InvalidArCoefficient(_))));

        let mut spec = uniform_spec(ProcessKind::Iid, 0);
        spec.burn_in = 10;
        assert_eq!(
            simulate(&spec, 10).unwrap_err(),
            Error::BurnInTooShort { given: 10, min: 64 }
        );

        let spec = uniform_spec(ProcessKind::Iid, 0);
        assert!(matches!(simulate(&spec, 0), Err(Error::SampleTooSmall { .. })));
    }

    #[test]
    fn samples_stay_in_the_unit_interval() {
        for kind in [
            ProcessKind::Iid,
            ProcessKind::ArBernoulli,
            ProcessKind::GaussianAr1 { a: 0.9 },
        ] {
            let spec = ProcessSpec::new(kind, DensitySpec::Linear, 3);
            let data = simulate(&spec, 5000).unwrap();
            assert!(data.iter().all(|&x| (0.0..1.0).contains(&x)), "{kind:?}");
        }
    }

    #[test]
    fn bernoulli_chain_mean_sees_the_long_run_variance() {
        // Pre-warp mean of the uniform chain is 1/2; the autocovariances sum
        // to Var·(1 + 2 Σ 2^{−k}) = 3·Var, so the standard error of the mean
        // is √3·σ/√n = 0.5/√n.
        let n = 40_000;
        let spec = uniform_spec(ProcessKind::ArBernoulli, 11);
        let data = simulate(&spec, n).unwrap();
        let mean = data.iter().sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 3.0 * 0.5 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn gaussian_chain_mean_is_centered() {
        let n = 40_000;
        let a: f64 = 0.5;
        let spec = uniform_spec(ProcessKind::GaussianAr1 { a }, 13);
        let data = simulate(&spec, n).unwrap();
        let mean = data.iter().sum::<f64>() / n as f64;
        // Autocorrelations of the warped chain are bounded by those of the
        // latent one, whose sum is a/(1−a) = 1, so reuse the factor-3 bound.
        let sd = (3.0f64 / 12.0).sqrt() / (n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn halves_of_a_long_run_have_matching_histograms() {
        // Two-sample chi-square on 10 bins, halves of one chain, thinned by
        // 8 so the retained points are effectively independent (the latent
        // autocorrelation at lag 8 is below 0.02 for every kind used here).
        let critical = ChiSquared::new(9.0).unwrap().inverse_cdf(0.99);
        for (kind, seed) in [
            (ProcessKind::Iid, 17),
            (ProcessKind::ArBernoulli, 19),
            (ProcessKind::GaussianAr1 { a: 0.6 }, 23),
        ] {
            let spec = uniform_spec(kind, seed);
            let data = simulate(&spec, 200_000).unwrap();
            let thinned: Vec<f64> = data.iter().copied().step_by(8).collect();
            let half = thinned.len() / 2;
            let mut first = [0.0f64; 10];
            let mut second = [0.0f64; 10];
            for (t, &x) in thinned[..2 * half].iter().enumerate() {
                let bin = ((x * 10.0) as usize).min(9);
                if t < half {
                    first[bin] += 1.0;
                } else {
                    second[bin] += 1.0;
                }
            }
            let stat: f64 = first
                .iter()
                .zip(&second)
                .map(|(&o1, &o2)| (o1 - o2).powi(2) / (o1 + o2))
                .sum();
            assert!(stat < critical, "{kind:?}: chi-square {stat} >= {critical}");
        }
    }

    #[test]
    fn dam_estimate_matches_the_population_variance() {
        // iid uniform, q = 1, histogram d = 2: each ψ has Pψ² = 1 and
        // (Pψ)² = 1/2, so D = 2·(1 − 1/2) = 1.
        let spec = uniform_spec(ProcessKind::Iid, 29);
        let model = Model::histogram(1, 2);
        let dam = estimate_dam(&spec, &model, 1, 10_000, 101).unwrap();
        assert_abs_diff_eq!(dam, 1.0, epsilon = 0.01);

        // d = 1 is the constant function: every block mean is 1 exactly.
        let model = Model::histogram(0, 1);
        let dam = estimate_dam(&spec, &model, 1, 200, 102).unwrap();
        assert_abs_diff_eq!(dam, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn dam_estimate_agrees_with_a_brute_force_block_scan() {
        // ar-bernoulli pre-warp blocks of length 4 against non-overlapping
        // windows of one long stationary run.
        let q = 4;
        let spec = uniform_spec(ProcessKind::ArBernoulli, 31);
        let model = Model::histogram(1, 2);
        let dam = estimate_dam(&spec, &model, q, 4000, 103).unwrap();

        let windows = 100_000;
        let long = simulate(&uniform_spec(ProcessKind::ArBernoulli, 37), windows * q).unwrap();
        let mut sum = [0.0f64; 2];
        let mut sum_sq = [0.0f64; 2];
        for w in 0..windows {
            let mut means = [0.0f64; 2];
            for &x in &long[w * q..(w + 1) * q] {
                model.for_each_nonzero(x, |slot, value| means[slot] += value);
            }
            for slot in 0..2 {
                let m = means[slot] / q as f64;
                sum[slot] += m;
                sum_sq[slot] += m * m;
            }
        }
        let r = windows as f64;
        let brute: f64 = (0..2)
            .map(|s| q as f64 * (sum_sq[s] - sum[s] * sum[s] / r) / (r - 1.0))
            .sum();
        assert!(
            (dam - brute).abs() < 0.1 * brute.max(0.02),
            "estimate {dam} vs brute force {brute}"
        );
    }

    #[test]
    fn dam_estimate_enforces_preconditions() {
        let spec = uniform_spec(ProcessKind::Iid, 0);
        let model = Model::histogram(1, 2);
        assert!(matches!(
            estimate_dam(&spec, &model, 0, 1000, 0),
            Err(Error::SampleTooSmall { .. })
        ));
        assert_eq!(
            estimate_dam(&spec, &model, 1, 99, 0).unwrap_err(),
            Error::TooFewReplications { what: "D_{A,m} estimation", given: 99, min: 100 }
        );
    }

    #[test]
    fn scaled_risk_index_combines_bias_and_dam() {
        assert_abs_diff_eq!(r_am(100, 0.02, 1.0), 4.0, epsilon = 1e-12);
        assert_eq!(r_am(10, -1e-16, 0.0), 0.0);
    }

    #[test]
    fn process_spec_round_trips_through_json() {
        let spec = ProcessSpec {
            kind: ProcessKind::GaussianAr1 { a: 0.6 },
            target: DensitySpec::Linear,
            burn_in: 2048,
            seed: 42,
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: ProcessSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);

        // The config shape is flat: kind and its parameter sit beside the
        // other fields, and burn_in/seed may be omitted.
        let literal = r#"{"kind":"ar-bernoulli","target":{"kind":"uniform"}}"#;
        let parsed: ProcessSpec = serde_json::from_str(literal).unwrap();
        assert_eq!(parsed.kind, ProcessKind::ArBernoulli);
        assert_eq!(parsed.burn_in, DEFAULT_BURN_IN);
        assert_eq!(parsed.seed, 0);
    }
}
