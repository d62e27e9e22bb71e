//! Block-resampling penalties.
//!
//! Exchangeable weights `(W_1, …, W_p)` resample the block empirical measure:
//! `P_A^W t = (1/p) Σ_k W_k L_q t(A_k)`. The penalty attached to a model is
//!
//! `pen(m, C) = C · E_W[ 2 (P_A^W − W̄ P_A)(ŝ^W_m) ]`,
//!
//! which has a closed form: writing `p_w(m) = (1/(p(p−1))) Σ_λ Σ_k
//! (L_q ψ_λ(A_k) − P_A ψ_λ)²` — the between-block scatter of the
//! coefficients, the same for every weight law — the penalty is
//! `pen(m, C) = 2C · p_w(m) / C̃_W` with the law's resampling constant
//! `C̃_W = Var(W_1 − W̄)⁻¹`. A Monte-Carlo evaluation over explicit weight
//! draws is provided for validation; production runs use the closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::basis::Model;
use crate::blocks::{block_mean_matrix, model_block_stats, BlockedSample, ModelBlockStats};
use crate::density::TrueDensity;
use crate::error::{Error, Result};
use crate::estimator::ProjectionFit;

/// The distribution of the exchangeable weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightKind {
    /// The block bootstrap: `(W_1, …, W_p) ~ Multinomial(p; 1/p, …, 1/p)`.
    MultinomialBlockBootstrap,
    /// i.i.d. Poisson weights.
    Poisson { mean: f64 },
    /// i.i.d. exponential weights.
    Exponential { mean: f64 },
    /// Deterministic weights `W_i ≡ value`; degenerate, rejected wherever a
    /// resampling constant is required.
    Constant { value: f64 },
}

/// A weight law bound to a block count `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightLaw {
    pub kind: WeightKind,
    pub p: usize,
}

impl WeightLaw {
    pub fn new(kind: WeightKind, p: usize) -> Result<WeightLaw> {
        if p < 2 {
            return Err(Error::InvalidWeightParameter(format!("p = {p} (need p >= 2)")));
        }
        match kind {
            WeightKind::Poisson { mean } | WeightKind::Exponential { mean } => {
                if !(mean > 0.0) || !mean.is_finite() {
                    return Err(Error::InvalidWeightParameter(format!("mean = {mean}")));
                }
            }
            WeightKind::Constant { value } => {
                if !(value >= 0.0) || !value.is_finite() {
                    return Err(Error::InvalidWeightParameter(format!("value = {value}")));
                }
            }
            WeightKind::MultinomialBlockBootstrap => {}
        }
        Ok(WeightLaw { kind, p })
    }

    pub fn multinomial(p: usize) -> Result<WeightLaw> {
        WeightLaw::new(WeightKind::MultinomialBlockBootstrap, p)
    }

    /// The resampling constant `C̃_W = Var(W_1 − W̄)⁻¹`:
    /// `p/(p−1)` for the multinomial bootstrap and `(σ² (1 − 1/p))⁻¹` for
    /// i.i.d. weights with variance σ².
    ///
    /// Errors on degenerate laws (`Var(W_1 − W̄) = 0`).
    pub fn c_tilde_w(&self) -> Result<f64> {
        let p = self.p as f64;
        match self.kind {
            WeightKind::MultinomialBlockBootstrap => Ok(p / (p - 1.0)),
            _ => {
                let sigma_sq = self.iid_variance();
                if sigma_sq == 0.0 {
                    return Err(Error::DegenerateWeights);
                }
                Ok(p / (sigma_sq * (p - 1.0)))
            }
        }
    }

    fn iid_variance(&self) -> f64 {
        match self.kind {
            WeightKind::MultinomialBlockBootstrap => unreachable!(),
            WeightKind::Poisson { mean } => mean,
            WeightKind::Exponential { mean } => mean * mean,
            WeightKind::Constant { .. } => 0.0,
        }
    }

    /// Draws one weight vector.
    ///
    /// Multinomial counts are generated by sequential binomial thinning
    /// (cell `i` receives `Binomial(remaining, 1/(p−i))` of the remaining
    /// mass), so a fixed seed yields a fixed sequence.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self.kind {
            WeightKind::MultinomialBlockBootstrap => {
                let mut weights = Vec::with_capacity(self.p);
                let mut remaining = self.p as u64;
                for i in 0..self.p {
                    let cells_left = (self.p - i) as f64;
                    let w = if i + 1 == self.p {
                        remaining
                    } else if remaining == 0 {
                        0
                    } else {
                        Binomial::new(remaining, 1.0 / cells_left).unwrap().sample(rng)
                    };
                    weights.push(w as f64);
                    remaining -= w;
                }
                weights
            }
            WeightKind::Poisson { mean } => {
                let dist = Poisson::new(mean).unwrap();
                (0..self.p).map(|_| dist.sample(rng)).collect()
            }
            WeightKind::Exponential { mean } => {
                let dist = Exp::new(1.0 / mean).unwrap();
                (0..self.p).map(|_| dist.sample(rng)).collect()
            }
            WeightKind::Constant { value } => vec![value; self.p],
        }
    }
}

/// How a penalty value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PenaltyMethod {
    ClosedForm,
    MonteCarlo { replicates: usize, seed: u64 },
}

/// A penalty evaluation for one model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenaltyRecord {
    pub model_index: usize,
    /// The law-free between-block scatter `p_w(m)`.
    pub p_w: f64,
    /// `pen(m, C) = 2C · p_w(m) / C̃_W`.
    pub pen: f64,
    pub method: PenaltyMethod,
    /// Monte-Carlo standard error of `pen`; 0 for the closed form.
    pub std_error: f64,
}

fn check_law(sample: &BlockedSample, law: &WeightLaw) -> Result<()> {
    let scheme_p = sample.scheme().p;
    if law.p != scheme_p {
        return Err(Error::WeightCountMismatch { law_p: law.p, scheme_p });
    }
    Ok(())
}

/// The law-free scatter `p_w(m)` computed from per-model block statistics.
pub(crate) fn p_w_from_stats(stats: &ModelBlockStats) -> f64 {
    let p = stats.p as f64;
    let mut scatter = 0.0;
    for (slot, &a) in stats.coeffs.iter().enumerate() {
        // Σ_k (L_q ψ(A_k) − P_A ψ)² = Σ_k L_q ψ(A_k)² − p (P_A ψ)², clipped
        // at zero against cancellation noise.
        scatter += (stats.mean_sq_sums[slot] - p * a * a).max(0.0);
    }
    scatter / (p * (p - 1.0))
}

/// Evaluates the penalty exactly from the between-block coefficient scatter.
pub fn penalty_closed_form(
    sample: &BlockedSample,
    model: &Model,
    law: &WeightLaw,
    c: f64,
) -> Result<PenaltyRecord> {
    check_law(sample, law)?;
    let c_tilde = law.c_tilde_w()?;
    let stats = model_block_stats(sample, model);
    let p_w = p_w_from_stats(&stats);
    Ok(PenaltyRecord {
        model_index: model.index(),
        p_w,
        pen: 2.0 * c * p_w / c_tilde,
        method: PenaltyMethod::ClosedForm,
        std_error: 0.0,
    })
}

/// Estimates the penalty by averaging `2C (P_A^W − W̄ P_A)(ŝ^W_m)` over
/// `replicates` independent weight draws.
pub fn penalty_monte_carlo(
    sample: &BlockedSample,
    model: &Model,
    law: &WeightLaw,
    c: f64,
    replicates: usize,
    seed: u64,
) -> Result<PenaltyRecord> {
    check_law(sample, law)?;
    let c_tilde = law.c_tilde_w()?;
    if replicates < 2 {
        return Err(Error::TooFewReplications {
            what: "Monte-Carlo penalty",
            given: replicates,
            min: 2,
        });
    }
    let matrix = block_mean_matrix(sample, model);
    let p = sample.scheme().p;
    let pf = p as f64;
    let coeffs: Vec<f64> = matrix
        .chunks_exact(p)
        .map(|row| row.iter().sum::<f64>() / pf)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..replicates {
        let weights = law.draw(&mut rng);
        let w_bar = weights.iter().sum::<f64>() / pf;
        let mut acc = 0.0;
        for (row, &a) in matrix.chunks_exact(p).zip(&coeffs) {
            let mut weighted = 0.0;
            for (&w, &mean) in weights.iter().zip(row) {
                weighted += w * mean;
            }
            let p_a_w = weighted / pf;
            acc += (p_a_w - w_bar * a) * p_a_w;
        }
        let value = 2.0 * acc;
        sum += value;
        sum_sq += value * value;
    }
    let b = replicates as f64;
    let mean = sum / b;
    let var = ((sum_sq - b * mean * mean) / (b - 1.0)).max(0.0);
    Ok(PenaltyRecord {
        model_index: model.index(),
        p_w: c_tilde * mean / 2.0,
        pen: c * mean,
        method: PenaltyMethod::MonteCarlo { replicates, seed },
        std_error: c.abs() * (var / b).sqrt(),
    })
}

/// The unobservable ideal penalty `2 (P_A − P)(ŝ_m) = 2 Σ_λ a_λ (a_λ − ⟨s, ψ_λ⟩)`.
pub fn ideal_penalty(fit: &ProjectionFit<'_>, density: &TrueDensity) -> Result<f64> {
    let mut acc = 0.0;
    for (slot, &a) in fit.coefficients().iter().enumerate() {
        let c = density.coefficient(&fit.model().function_at(slot))?;
        acc += a * (a - c);
    }
    Ok(2.0 * acc)
}
