//! The slope heuristic: data-driven calibration of the penalty multiplier.
//!
//! For a grid of multipliers `K` the path `K ↦ m̂(K)` records the minimizer
//! of `γ(ŝ_m) + K Δ_m` over the collection, where `Δ_m` is a positive
//! complexity measure. The dimension of `m̂(K)` drops as `K` grows; the
//! heuristic locates the largest drop, calls its right endpoint `K̃`, and
//! returns the minimizer at `2 K̃`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selection::CriterionRow;

/// The complexity measure `Δ_m` driving the slope path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaMeasure {
    /// `Δ_m = pen_W(m, 1) = 2 p_w(m)`: the resampling penalty at unit
    /// multiplier. The default; no density knowledge required.
    PenWUnit,
    /// `Δ_m = D_m / n`: model dimension over sample size.
    DimOverN,
}

impl FromStr for DeltaMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pen-w-unit" => Ok(DeltaMeasure::PenWUnit),
            "dim-over-n" => Ok(DeltaMeasure::DimOverN),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// Per-model input to the slope path: contrast plus complexity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeRow {
    pub model_index: usize,
    pub dim: usize,
    pub contrast: f64,
    pub delta: f64,
}

/// The path entry at one grid multiplier.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathPoint {
    pub k: f64,
    pub selected: usize,
    pub selected_dim: usize,
}

/// What the jump detector saw along the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JumpOutcome {
    /// `k_tilde` is the right endpoint of the maximal dimension drop.
    Jump { k_tilde: f64 },
    /// The selected dimension never changed along the grid.
    Flat,
}

/// Outcome of a slope-heuristic selection.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub rows: Vec<SlopeRow>,
    pub path: Vec<PathPoint>,
    /// Multiplier at the detected jump (or the grid's middle element when
    /// the path is flat).
    pub k_tilde: f64,
    /// True when no jump was found and `k_tilde` fell back to the grid
    /// middle; callers should surface a warning.
    pub fallback: bool,
    /// Final multiplier `2 k_tilde` (evaluated off-grid).
    pub final_k: f64,
    pub selected: usize,
    pub selected_dim: usize,
}

/// Builds slope inputs from criterion rows.
///
/// `n` is only consulted by [`DeltaMeasure::DimOverN`].
pub fn slope_rows(rows: &[CriterionRow], measure: DeltaMeasure, n: usize) -> Vec<SlopeRow> {
    rows.iter()
        .map(|r| SlopeRow {
            model_index: r.model_index,
            dim: r.dim,
            contrast: r.contrast,
            delta: match measure {
                DeltaMeasure::PenWUnit => r.pen_unit,
                DeltaMeasure::DimOverN => r.dim as f64 / n as f64,
            },
        })
        .collect()
}

/// An evenly spaced multiplier grid `start, start+step, …` up to `stop`
/// (inclusive, within floating-point slack).
pub fn k_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::InvalidGrid("grid endpoints and step must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
    }
    if stop < start {
        return Err(Error::InvalidGrid(format!("empty range: start {start} > stop {stop}")));
    }
    if start < 0.0 {
        return Err(Error::InvalidGrid(format!("multipliers must be nonnegative, got {start}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// The default grid: 81 multipliers from 0 to 4 in steps of 0.05.
pub fn default_k_grid() -> Vec<f64> {
    k_grid(0.0, 4.0, 0.05).expect("static grid")
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty".into()));
    }
    for (i, &k) in grid.iter().enumerate() {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::InvalidGrid(format!("grid[{i}] = {k} is not a valid multiplier")));
        }
        if i > 0 && k <= grid[i - 1] {
            return Err(Error::InvalidGrid(format!(
                "grid must be strictly increasing, got {} then {k}",
                grid[i - 1]
            )));
        }
    }
    Ok(())
}

fn validate_rows(rows: &[SlopeRow]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptySelection);
    }
    for row in rows {
        if !row.contrast.is_finite() {
            return Err(Error::NonFiniteCriterion { model: row.model_index });
        }
        if !(row.delta.is_finite() && row.delta > 0.0) {
            return Err(Error::NonPositiveComplexity {
                model: row.model_index,
                value: row.delta,
            });
        }
    }
    Ok(())
}

/// The minimizer of `contrast + k·delta`, ties toward smaller dimension
/// then smaller index. Assumes `rows` already validated.
fn argmin_at(rows: &[SlopeRow], k: f64) -> &SlopeRow {
    let mut best = &rows[0];
    for row in &rows[1..] {
        let (cur, cand) = (best.contrast + k * best.delta, row.contrast + k * row.delta);
        if (cand, row.dim, row.model_index) < (cur, best.dim, best.model_index) {
            best = row;
        }
    }
    best
}

/// Traces the selected model along the multiplier grid.
///
/// Every `Δ_m` must be strictly positive; with the `pen-w-unit` measure a
/// model whose coefficients are block-constant (e.g. the trivial one-bin
/// histogram) has `Δ_m = 0` and is rejected — drop it from the collection or
/// switch to `dim-over-n`.
pub fn complexity_path(rows: &[SlopeRow], grid: &[f64]) -> Result<Vec<PathPoint>> {
    validate_rows(rows)?;
    validate_grid(grid)?;
    Ok(grid
        .iter()
        .map(|&k| {
            let best = argmin_at(rows, k);
            PathPoint { k, selected: best.model_index, selected_dim: best.dim }
        })
        .collect())
}

/// Finds the maximal dimension drop along the path.
///
/// Returns the right endpoint of the steepest change `|d_{i−1} − d_i|`;
/// equal drops resolve to the smallest multiplier. A path whose dimension
/// never changes yields [`JumpOutcome::Flat`].
pub fn detect_jump(path: &[PathPoint]) -> JumpOutcome {
    let mut best_drop = 0usize;
    let mut best_k = None;
    for pair in path.windows(2) {
        let drop = pair[0].selected_dim.abs_diff(pair[1].selected_dim);
        if drop > best_drop {
            best_drop = drop;
            best_k = Some(pair[1].k);
        }
    }
    match best_k {
        Some(k_tilde) => JumpOutcome::Jump { k_tilde },
        None => JumpOutcome::Flat,
    }
}

/// Runs the full slope heuristic over a multiplier grid.
///
/// When the path is flat the multiplier falls back to the grid's middle
/// element and the report's `fallback` flag is set.
pub fn slope_select(rows: &[SlopeRow], grid: &[f64]) -> Result<SlopeReport> {
    let path = complexity_path(rows, grid)?;
    let (k_tilde, fallback) = match detect_jump(&path) {
        JumpOutcome::Jump { k_tilde } => (k_tilde, false),
        JumpOutcome::Flat => (grid[grid.len() / 2], true),
    };
    let final_k = 2.0 * k_tilde;
    let best = argmin_at(rows, final_k);
    Ok(SlopeReport {
        rows: rows.to_vec(),
        path,
        k_tilde,
        fallback,
        final_k,
        selected: best.model_index,
        selected_dim: best.dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn srow(model_index: usize, dim: usize, contrast: f64, delta: f64) -> SlopeRow {
        SlopeRow { model_index, dim, contrast, delta }
    }

    fn dims_path(dims: &[usize], grid: &[f64]) -> Vec<PathPoint> {
        dims.iter()
            .zip(grid)
            .map(|(&d, &k)| PathPoint { k, selected: d, selected_dim: d })
            .collect()
    }

    #[test]
    fn grid_generation_includes_both_endpoints() {
        let grid = default_k_grid();
        assert_eq!(grid.len(), 81);
        assert_abs_diff_eq!(grid[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(grid[80], 4.0, epsilon = 1e-12);

        let grid = k_grid(0.5, 3.0, 0.5).unwrap();
        assert_eq!(grid.len(), 6);
        assert_abs_diff_eq!(grid[5], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_generation_rejects_bad_parameters() {
        assert!(matches!(k_grid(0.0, 4.0, 0.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(k_grid(0.0, 4.0, -0.1), Err(Error::InvalidGrid(_))));
        assert!(matches!(k_grid(2.0, 1.0, 0.5), Err(Error::InvalidGrid(_))));
        assert!(matches!(k_grid(-1.0, 1.0, 0.5), Err(Error::InvalidGrid(_))));
        assert!(matches!(k_grid(0.0, f64::NAN, 0.5), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn path_rejects_invalid_grids_and_complexities() {
        let rows = vec![srow(0, 2, -1.0, 0.5)];
        assert!(matches!(complexity_path(&rows, &[]), Err(Error::InvalidGrid(_))));
        assert!(matches!(complexity_path(&rows, &[0.0, 0.0]), Err(Error::InvalidGrid(_))));
        assert!(matches!(complexity_path(&rows, &[1.0, 0.5]), Err(Error::InvalidGrid(_))));
        assert!(matches!(complexity_path(&rows, &[-0.5, 0.5]), Err(Error::InvalidGrid(_))));

        let rows = vec![srow(0, 2, -1.0, 0.5), srow(1, 4, -1.5, 0.0)];
        assert_eq!(
            complexity_path(&rows, &[0.0, 1.0]).unwrap_err(),
            Error::NonPositiveComplexity { model: 1, value: 0.0 }
        );
        assert!(complexity_path(&[], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn crossover_switches_models_at_the_predicted_multiplier() {
        // A beats B iff −1 + 0.5k < −0.4 + 0.1k, i.e. k < 1.5. At k = 1.5
        // the criteria tie and the smaller dimension (B) wins.
        let rows = vec![srow(0, 8, -1.0, 0.5), srow(1, 2, -0.4, 0.1)];
        let grid = k_grid(0.0, 3.0, 0.5).unwrap();
        let path = complexity_path(&rows, &grid).unwrap();
        let dims: Vec<usize> = path.iter().map(|p| p.selected_dim).collect();
        assert_eq!(dims, vec![8, 8, 8, 2, 2, 2, 2]);
        assert_eq!(detect_jump(&path), JumpOutcome::Jump { k_tilde: 1.5 });

        let report = slope_select(&rows, &grid).unwrap();
        assert!(!report.fallback);
        assert_abs_diff_eq!(report.k_tilde, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(report.final_k, 3.0, epsilon = 1e-12);
        assert_eq!(report.selected, 1);
        assert_eq!(report.selected_dim, 2);
    }

    #[test]
    fn jump_detector_takes_the_largest_drop() {
        let grid = k_grid(0.5, 3.0, 0.5).unwrap();
        let path = dims_path(&[512, 512, 480, 64, 32, 32], &grid);
        assert_eq!(detect_jump(&path), JumpOutcome::Jump { k_tilde: 2.0 });
    }

    #[test]
    fn equal_drops_resolve_to_the_smallest_multiplier() {
        let grid = k_grid(0.0, 1.5, 0.5).unwrap();
        let path = dims_path(&[12, 8, 8, 4], &grid);
        assert_eq!(detect_jump(&path), JumpOutcome::Jump { k_tilde: 0.5 });
    }

    #[test]
    fn flat_path_falls_back_to_the_grid_middle() {
        let rows = vec![srow(3, 4, -1.0, 0.2)];
        let grid = default_k_grid();
        let report = slope_select(&rows, &grid).unwrap();
        assert!(report.fallback);
        assert_abs_diff_eq!(report.k_tilde, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.final_k, 4.0, epsilon = 1e-12);
        assert_eq!(report.selected, 3);
    }

    #[test]
    fn path_dimension_is_monotone_for_co_monotone_complexities() {
        // Nested-style rows: contrast decreases, delta increases with dim.
        let rows = vec![
            srow(0, 2, -0.50, 0.010),
            srow(1, 4, -0.70, 0.024),
            srow(2, 8, -0.82, 0.051),
            srow(3, 16, -0.90, 0.105),
            srow(4, 32, -0.95, 0.210),
        ];
        let path = complexity_path(&rows, &default_k_grid()).unwrap();
        for pair in path.windows(2) {
            assert!(pair[1].selected_dim <= pair[0].selected_dim);
        }
    }

    #[test]
    fn delta_measures_pull_the_right_columns() {
        let crow = CriterionRow {
            model_index: 5,
            dim: 10,
            contrast: -2.0,
            p_w: 0.3,
            pen: 1.2,
            pen_unit: 0.6,
            std_error: 0.0,
            risk: None,
            ideal_pen: None,
        };
        let rows = slope_rows(std::slice::from_ref(&crow), DeltaMeasure::PenWUnit, 100);
        assert_abs_diff_eq!(rows[0].delta, 0.6, epsilon = 1e-15);
        let rows = slope_rows(&[crow], DeltaMeasure::DimOverN, 100);
        assert_abs_diff_eq!(rows[0].delta, 0.1, epsilon = 1e-15);

        assert_eq!("pen-w-unit".parse::<DeltaMeasure>().unwrap(), DeltaMeasure::PenWUnit);
        assert_eq!("dim-over-n".parse::<DeltaMeasure>().unwrap(), DeltaMeasure::DimOverN);
        assert!(matches!("slope".parse::<DeltaMeasure>(), Err(Error::UnknownKind(_))));
    }
}
