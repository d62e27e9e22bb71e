//! Penalized model selection.
//!
//! For each model the criterion is `γ(ŝ_m) + pen(m, C)`; the selected model
//! minimizes it over the collection. Ties are broken toward the smaller
//! dimension, then the smaller model index, so selection is deterministic.

use serde::Serialize;

use crate::basis::ModelCollection;
use crate::blocks::BlockedSample;
use crate::density::TrueDensity;
use crate::error::{Error, Result};
use crate::estimator::{fit_from_coefficients, project, risk_against};
use crate::penalty::{
    ideal_penalty, p_w_from_stats, penalty_monte_carlo, WeightKind, WeightLaw,
};
use crate::seed::{derive_seed, tag};

/// How the penalty is evaluated for each model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum PenaltyEvaluation {
    /// Exact closed form from the between-block coefficient scatter.
    ClosedForm,
    /// Average over explicit weight draws; mainly for validation.
    MonteCarlo { replicates: usize },
}

/// Penalization settings for a selection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    /// Law of the exchangeable weights.
    pub weight_kind: WeightKind,
    /// Multiplier κ applied to the law's own constant: `C = κ C̃_W`, so the
    /// penalty is `2 κ p_w(m)` whatever the law.
    pub c_multiplier: f64,
    /// Closed form or Monte Carlo.
    pub evaluation: PenaltyEvaluation,
    /// Master seed for Monte-Carlo weight draws (per-model streams are
    /// derived from it; unused by the closed form).
    pub seed: u64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            weight_kind: WeightKind::MultinomialBlockBootstrap,
            c_multiplier: 1.0,
            evaluation: PenaltyEvaluation::ClosedForm,
            seed: 0,
        }
    }
}

/// Everything recorded about one model during a selection run.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionRow {
    pub model_index: usize,
    pub dim: usize,
    /// Empirical contrast `γ(ŝ_m) = −Σ_λ a_λ²`.
    pub contrast: f64,
    /// Law-free scatter `p_w(m)`.
    pub p_w: f64,
    /// Penalty at the configured multiplier.
    pub pen: f64,
    /// Penalty at multiplier 1, i.e. `2 p_w(m)`; the slope path's default
    /// complexity measure.
    pub pen_unit: f64,
    /// Monte-Carlo standard error of `pen` (zero for the closed form).
    pub std_error: f64,
    /// Exact risk `‖s − ŝ_m‖²` when the sampling density is known.
    pub risk: Option<f64>,
    /// Ideal penalty `2 Σ_λ a_λ (a_λ − ⟨s, ψ_λ⟩)` when the density is known.
    pub ideal_pen: Option<f64>,
}

impl CriterionRow {
    /// The penalized criterion `contrast + pen`.
    pub fn criterion(&self) -> f64 {
        self.contrast + self.pen
    }
}

/// Outcome of a selection run over a model collection.
#[derive(Debug, Clone, Serialize)]
pub struct SelectionReport {
    pub rows: Vec<CriterionRow>,
    /// Index of the selected model.
    pub selected: usize,
    pub selected_dim: usize,
    /// Criterion value at the selected model.
    pub criterion: f64,
    /// Index of the risk-minimizing model, when risks are available.
    pub oracle: Option<usize>,
    pub oracle_risk: Option<f64>,
    pub selected_risk: Option<f64>,
    /// `risk(selected) / risk(oracle)`; 1 when both vanish.
    pub oracle_ratio: Option<f64>,
}

/// Picks the criterion minimizer among `rows`.
///
/// Any non-finite criterion is an error; ties go to the smaller dimension,
/// then the smaller model index.
pub fn select_model(rows: Vec<CriterionRow>) -> Result<SelectionReport> {
    if rows.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut best: Option<usize> = None;
    for (i, row) in rows.iter().enumerate() {
        let crit = row.criterion();
        if !crit.is_finite() {
            return Err(Error::NonFiniteCriterion { model: row.model_index });
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let cur = &rows[b];
                let better = (crit, row.dim, row.model_index)
                    < (cur.criterion(), cur.dim, cur.model_index);
                Some(if better { i } else { b })
            }
        };
    }
    let best = best.expect("non-empty rows");
    let selected = rows[best].model_index;
    let selected_dim = rows[best].dim;
    let criterion = rows[best].criterion();

    // Oracle bookkeeping only when every row carries a risk value.
    let (oracle, oracle_risk, selected_risk, oracle_ratio) =
        if rows.iter().all(|r| r.risk.is_some()) {
            let mut o = 0;
            for (i, row) in rows.iter().enumerate() {
                let (r, or) = (row.risk.unwrap(), rows[o].risk.unwrap());
                if (r, row.dim, row.model_index) < (or, rows[o].dim, rows[o].model_index) {
                    o = i;
                }
            }
            let or = rows[o].risk.unwrap();
            let sr = rows[best].risk.unwrap();
            let ratio = if or == 0.0 {
                if sr == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                sr / or
            };
            (Some(rows[o].model_index), Some(or), Some(sr), Some(ratio))
        } else {
            (None, None, None, None)
        };

    Ok(SelectionReport {
        rows,
        selected,
        selected_dim,
        criterion,
        oracle,
        oracle_risk,
        selected_risk,
        oracle_ratio,
    })
}

/// Computes the full criterion table for a collection on one sample.
///
/// When `density` is given, exact risks and ideal penalties are attached to
/// every row, enabling oracle comparisons.
pub fn criterion_rows(
    sample: &BlockedSample,
    collection: &ModelCollection,
    config: &PenaltyConfig,
    density: Option<&TrueDensity>,
) -> Result<Vec<CriterionRow>> {
    let law = WeightLaw::new(config.weight_kind, sample.scheme().p)?;
    let c_tilde = law.c_tilde_w()?;
    let c = config.c_multiplier * c_tilde;

    let mut rows = Vec::with_capacity(collection.models.len());
    for model in &collection.models {
        let (fit, p_w, pen, std_error) = match config.evaluation {
            PenaltyEvaluation::ClosedForm => {
                let stats = crate::blocks::model_block_stats(sample, model);
                let p_w = p_w_from_stats(&stats);
                let fit = fit_from_coefficients(model, stats.coeffs);
                (fit, p_w, 2.0 * config.c_multiplier * p_w, 0.0)
            }
            PenaltyEvaluation::MonteCarlo { replicates } => {
                let seed = derive_seed(config.seed, model.index() as u64, tag::WEIGHTS);
                let record = penalty_monte_carlo(sample, model, &law, c, replicates, seed)?;
                let fit = project(sample, model);
                (fit, record.p_w, record.pen, record.std_error)
            }
        };
        let (risk, ideal_pen) = match density {
            Some(d) => (
                Some(risk_against(&fit, d)?.total),
                Some(ideal_penalty(&fit, d)?),
            ),
            None => (None, None),
        };
        rows.push(CriterionRow {
            model_index: model.index(),
            dim: model.dim(),
            contrast: fit.contrast(),
            p_w,
            pen,
            pen_unit: 2.0 * p_w,
            std_error,
            risk,
            ideal_pen,
        });
    }
    Ok(rows)
}

/// One-shot penalized projection estimation: criterion table plus argmin.
pub fn run_ppe(
    sample: &BlockedSample,
    collection: &ModelCollection,
    config: &PenaltyConfig,
    density: Option<&TrueDensity>,
) -> Result<SelectionReport> {
    select_model(criterion_rows(sample, collection, config, density)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate_models, CollectionKind};
    use crate::blocks::BlockedSample;
    use crate::density::{DensitySpec, TrueDensity};
    use approx::assert_abs_diff_eq;

    fn row(model_index: usize, dim: usize, contrast: f64, pen: f64) -> CriterionRow {
        CriterionRow {
            model_index,
            dim,
            contrast,
            p_w: pen / 2.0,
            pen,
            pen_unit: pen,
            std_error: 0.0,
            risk: None,
            ideal_pen: None,
        }
    }

    #[test]
    fn picks_the_criterion_minimizer() {
        let rows = vec![
            row(1, 1, -1.0, 0.1),
            row(2, 2, -1.2, 0.05),
            row(3, 3, -1.1, 0.2),
        ];
        let report = select_model(rows).unwrap();
        assert_eq!(report.selected, 2);
        assert_abs_diff_eq!(report.criterion, -1.15, epsilon = 1e-15);
    }

    #[test]
    fn ties_break_toward_smaller_dimension_then_index() {
        let rows = vec![row(4, 8, -1.0, 0.5), row(7, 2, -1.3, 0.8), row(9, 2, -0.8, 0.3)];
        // Criteria: -0.5, -0.5, -0.5. Two rows have dim 2; index 7 wins.
        let report = select_model(rows).unwrap();
        assert_eq!(report.selected, 7);

        let rows = vec![row(5, 2, -1.0, 0.5), row(3, 2, -1.0, 0.5)];
        let report = select_model(rows).unwrap();
        assert_eq!(report.selected, 3);
    }

    #[test]
    fn rejects_non_finite_criteria_and_empty_collections() {
        let err = select_model(vec![row(2, 2, f64::NAN, 0.0)]).unwrap_err();
        assert_eq!(err, Error::NonFiniteCriterion { model: 2 });
        assert_eq!(select_model(Vec::new()).unwrap_err(), Error::EmptySelection);
    }

    #[test]
    fn zero_penalty_selects_the_largest_nested_model() {
        // With pen ≡ 0 the criterion is −Σ a² which only decreases along a
        // nested chain, so the largest model wins.
        let rows = vec![row(1, 2, -0.4, 0.0), row(2, 4, -0.9, 0.0), row(3, 8, -1.3, 0.0)];
        assert_eq!(select_model(rows).unwrap().selected, 3);
    }

    #[test]
    fn hand_instance_selects_the_constant_histogram() {
        // Sample {0.2, 0.8}, p = 2 blocks of length 1; histograms d = 1, 2.
        // d = 1: contrast −1, p_w = 0. d = 2: contrast −1, p_w = 1, so the
        // multinomial penalty at multiplier 1 is 2, criterion +1.
        let sample = BlockedSample::from_odd_blocks(&[0.2, 0.8], 1).unwrap();
        let collection = enumerate_models(CollectionKind::Histogram, 4).unwrap();
        let config = PenaltyConfig::default();
        let density = TrueDensity::new(&DensitySpec::Uniform).unwrap();
        let report = run_ppe(&sample, &collection, &config, Some(&density)).unwrap();

        assert_eq!(report.rows.len(), 2);
        assert_abs_diff_eq!(report.rows[0].contrast, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.rows[1].contrast, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.rows[0].pen, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.rows[1].pen, 2.0, epsilon = 1e-12);
        assert_eq!(report.selected, 1);
        assert_eq!(report.selected_dim, 1);

        // Both fits reproduce the uniform density exactly on this sample
        // (the d = 2 bins are balanced), so both risks vanish and the oracle
        // ratio is 1 by convention.
        assert_eq!(report.oracle, Some(1));
        assert_abs_diff_eq!(report.oracle_risk.unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.oracle_ratio.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn monte_carlo_rows_match_the_closed_form_within_error() {
        let data: Vec<f64> = (0..32).map(|i| ((i as f64) * 0.37 + 0.11) % 1.0).collect();
        let sample = BlockedSample::from_odd_blocks(&data, 2).unwrap();
        let collection = enumerate_models(CollectionKind::Histogram, 8).unwrap();
        let closed = criterion_rows(&sample, &collection, &PenaltyConfig::default(), None).unwrap();
        let mc_config = PenaltyConfig {
            evaluation: PenaltyEvaluation::MonteCarlo { replicates: 20_000 },
            seed: 99,
            ..PenaltyConfig::default()
        };
        let mc = criterion_rows(&sample, &collection, &mc_config, None).unwrap();
        for (a, b) in closed.iter().zip(&mc) {
            assert_eq!(a.model_index, b.model_index);
            assert_abs_diff_eq!(a.contrast, b.contrast, epsilon = 1e-12);
            let tol = 4.0 * b.std_error + 1e-12;
            assert!(
                (a.pen - b.pen).abs() <= tol,
                "model {}: closed {} vs mc {} ± {}",
                a.model_index,
                a.pen,
                b.pen,
                b.std_error
            );
        }
    }

    #[test]
    fn criterion_rows_report_unit_penalties() {
        let data: Vec<f64> = (0..16).map(|i| ((i as f64) * 0.61 + 0.07) % 1.0).collect();
        let sample = BlockedSample::from_odd_blocks(&data, 2).unwrap();
        let collection = enumerate_models(CollectionKind::Fourier, 8).unwrap();
        let config = PenaltyConfig { c_multiplier: 1.7, ..PenaltyConfig::default() };
        let rows = criterion_rows(&sample, &collection, &config, None).unwrap();
        for row in &rows {
            assert_abs_diff_eq!(row.pen, 1.7 * row.pen_unit, epsilon = 1e-12);
            assert_abs_diff_eq!(row.pen_unit, 2.0 * row.p_w, epsilon = 1e-15);
        }
    }
}
