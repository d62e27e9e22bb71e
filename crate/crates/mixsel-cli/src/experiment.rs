//! The replicated oracle-ratio study behind the `experiment` subcommand.
//!
//! Replications run in parallel, but every random stream is derived from
//! `(master seed, replication index)` and results are collected in
//! replication order, so the output bytes do not depend on the worker count.
//! Replication `r` reuses the same derived seed across every `(n, q)` combo,
//! which couples the combos for paired comparisons.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use mixsel::seed::{derive_seed, tag};
use mixsel::{
    criterion_rows, enumerate_models_with, make_blocks, select_model, simulate, slope_rows,
    slope_select, BlockedSample, ModelCollection, PenaltyConfig, TrueDensity,
};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{runtime, validation, CliError, Result};

/// Everything recorded about one replication of one `(n, q)` combo.
#[derive(Debug, Clone, Serialize)]
pub struct RepRecord {
    pub replication: usize,
    pub n: usize,
    pub q: usize,
    /// Derived seed fed to the simulator for this replication.
    pub seed: u64,
    pub respen_model: usize,
    pub respen_dim: usize,
    pub respen_risk: f64,
    pub oracle_model: usize,
    pub oracle_risk: f64,
    pub respen_ratio: f64,
    pub slope_model: usize,
    pub slope_dim: usize,
    pub slope_risk: f64,
    pub slope_ratio: f64,
    pub k_tilde: f64,
    pub fallback: bool,
}

/// Selected dimension counts at one grid multiplier.
#[derive(Debug, Clone, Serialize)]
pub struct DimCountRow {
    pub n: usize,
    pub q: usize,
    pub k: f64,
    pub dim: usize,
    pub count: u64,
}

/// First, second and third quartiles (linear interpolation between order
/// statistics, the R type-7 rule).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuantileTriple {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

/// Interpolated quantile of an ascending-sorted slice (R type 7).
pub fn quantile(sorted: &[f64], prob: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty slice");
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn triple(values: &mut Vec<f64>) -> QuantileTriple {
    values.sort_unstable_by(f64::total_cmp);
    QuantileTriple {
        q1: quantile(values, 0.25),
        median: quantile(values, 0.5),
        q3: quantile(values, 0.75),
    }
}

/// Aggregate over the replications of one `(n, q)` combo.
#[derive(Debug, Clone, Serialize)]
pub struct ComboSummary {
    pub n: usize,
    pub q: usize,
    /// Number of odd blocks.
    pub p: usize,
    pub replications: usize,
    pub respen_ratio: QuantileTriple,
    pub slope_ratio: QuantileTriple,
    pub respen_dim: QuantileTriple,
    pub slope_dim: QuantileTriple,
    pub k_tilde: QuantileTriple,
    /// Share of replications where the jump detector fell back to the grid
    /// middle because the path was flat.
    pub fallback_share: f64,
}

/// The `summary.json` payload.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub combos: Vec<ComboSummary>,
}

struct ComboContext<'a> {
    config: &'a ExperimentConfig,
    density: &'a TrueDensity,
    grid: &'a [f64],
    collection: ModelCollection,
    n: usize,
    q: usize,
}

fn run_replication(ctx: &ComboContext<'_>, rep: usize) -> Result<(RepRecord, Vec<usize>)> {
    let seed = derive_seed(ctx.config.seed, rep as u64, tag::REPLICATION);
    let mut spec = ctx.config.process.clone();
    spec.seed = seed;
    let data = simulate(&spec, ctx.n).map_err(runtime)?;
    let scheme = make_blocks(ctx.n, Some(ctx.q)).map_err(runtime)?;
    let sample = BlockedSample::new(data, scheme).map_err(runtime)?;

    let pen_cfg = PenaltyConfig {
        weight_kind: ctx.config.penalty.law,
        c_multiplier: ctx.config.penalty.c_multiplier,
        evaluation: ctx.config.penalty.method.evaluation(),
        seed,
    };
    let rows =
        criterion_rows(&sample, &ctx.collection, &pen_cfg, Some(ctx.density)).map_err(runtime)?;

    let srows = slope_rows(&rows, ctx.config.slope.delta, ctx.n);
    let slope = slope_select(&srows, ctx.grid).map_err(runtime)?;
    let slope_risk = rows
        .iter()
        .find(|r| r.model_index == slope.selected)
        .and_then(|r| r.risk)
        .ok_or_else(|| runtime(format!("no risk recorded for model {}", slope.selected)))?;

    let report = select_model(rows).map_err(runtime)?;
    let oracle_risk = report.oracle_risk.expect("risks attached to every row");
    let slope_ratio = if oracle_risk == 0.0 {
        if slope_risk == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        slope_risk / oracle_risk
    };

    let path_dims = slope.path.iter().map(|pt| pt.selected_dim).collect();
    let record = RepRecord {
        replication: rep,
        n: ctx.n,
        q: ctx.q,
        seed,
        respen_model: report.selected,
        respen_dim: report.selected_dim,
        respen_risk: report.selected_risk.expect("risks attached"),
        oracle_model: report.oracle.expect("risks attached"),
        oracle_risk,
        respen_ratio: report.oracle_ratio.expect("risks attached"),
        slope_model: slope.selected,
        slope_dim: slope.selected_dim,
        slope_risk,
        slope_ratio,
        k_tilde: slope.k_tilde,
        fallback: slope.fallback,
    };
    Ok((record, path_dims))
}

fn aggregate(records: &[RepRecord], n: usize, q: usize, p: usize) -> ComboSummary {
    let pick = |f: fn(&RepRecord) -> f64| -> QuantileTriple {
        let mut values: Vec<f64> = records.iter().map(f).collect();
        triple(&mut values)
    };
    let fallbacks = records.iter().filter(|r| r.fallback).count();
    ComboSummary {
        n,
        q,
        p,
        replications: records.len(),
        respen_ratio: pick(|r| r.respen_ratio),
        slope_ratio: pick(|r| r.slope_ratio),
        respen_dim: pick(|r| r.respen_dim as f64),
        slope_dim: pick(|r| r.slope_dim as f64),
        k_tilde: pick(|r| r.k_tilde),
        fallback_share: fallbacks as f64 / records.len() as f64,
    }
}

fn write_per_replication_csv(path: &Path, records: &[RepRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let mut wtr = csv::Writer::from_writer(file);
    let ctx = |e: csv::Error| runtime(format!("{}: {e}", path.display()));
    wtr.write_record([
        "replication",
        "n",
        "q",
        "seed",
        "respen_model",
        "respen_dim",
        "respen_risk",
        "oracle_model",
        "oracle_risk",
        "respen_ratio",
        "slope_model",
        "slope_dim",
        "slope_risk",
        "slope_ratio",
        "k_tilde",
        "fallback",
    ])
    .map_err(ctx)?;
    for r in records {
        wtr.write_record([
            r.replication.to_string(),
            r.n.to_string(),
            r.q.to_string(),
            r.seed.to_string(),
            r.respen_model.to_string(),
            r.respen_dim.to_string(),
            r.respen_risk.to_string(),
            r.oracle_model.to_string(),
            r.oracle_risk.to_string(),
            r.respen_ratio.to_string(),
            r.slope_model.to_string(),
            r.slope_dim.to_string(),
            r.slope_risk.to_string(),
            r.slope_ratio.to_string(),
            r.k_tilde.to_string(),
            r.fallback.to_string(),
        ])
        .map_err(ctx)?;
    }
    wtr.flush().map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn write_dimension_by_k_csv(path: &Path, rows: &[DimCountRow]) -> Result<()> {
    let file = File::create(path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let mut wtr = csv::Writer::from_writer(file);
    let ctx = |e: csv::Error| runtime(format!("{}: {e}", path.display()));
    wtr.write_record(["n", "q", "k", "dim", "count"]).map_err(ctx)?;
    for r in rows {
        wtr.write_record([
            r.n.to_string(),
            r.q.to_string(),
            r.k.to_string(),
            r.dim.to_string(),
            r.count.to_string(),
        ])
        .map_err(ctx)?;
    }
    wtr.flush().map_err(|e| runtime(format!("{}: {e}", path.display())))
}

/// Runs the full study and writes `per_replication.csv`,
/// `dimension_by_k.csv` and `summary.json` into `out_dir`.
///
/// On a mid-run failure the per-replication rows completed so far are still
/// flushed before the error propagates; `summary.json` is only written when
/// every replication succeeded.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentSummary> {
    config.validate()?;
    let density = TrueDensity::new(&config.process.target).map_err(validation)?;
    let grid = config.slope.grid.build().map_err(validation)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| runtime(format!("{}: {e}", out_dir.display())))?;

    let default_q = |n: usize| make_blocks(n, None).map(|s| s.q);
    let mut combos: Vec<(usize, usize)> = Vec::new();
    for &n in &config.n {
        match &config.q {
            Some(qs) => {
                for &q in qs {
                    combos.push((n, q));
                }
            }
            None => combos.push((n, default_q(n).map_err(validation)?)),
        }
    }

    // Validate every combo's block layout and collection before any
    // replication work, so a bad (n, q) pair is a validation failure and a
    // mid-run error can only be a runtime one (which still flushes the rows
    // completed so far).
    let mut prepared: Vec<(ModelCollection, usize)> = Vec::with_capacity(combos.len());
    for &(n, q) in &combos {
        let scheme = make_blocks(n, Some(q)).map_err(validation)?;
        let collection = enumerate_models_with(config.collection.kind, n, &config.collection.limits())
            .map_err(validation)?;
        prepared.push((collection, scheme.p));
    }

    let mut records: Vec<RepRecord> = Vec::new();
    let mut dim_counts: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
    let mut summaries: Vec<ComboSummary> = Vec::new();
    let mut failure: Option<CliError> = None;

    'combos: for (combo_idx, (&(n, q), (collection, p))) in
        combos.iter().zip(prepared).enumerate()
    {
        let ctx = ComboContext { config, density: &density, grid: &grid, collection, n, q };

        let results: Vec<Result<(RepRecord, Vec<usize>)>> =
            (0..config.replications).into_par_iter().map(|rep| run_replication(&ctx, rep)).collect();

        let mut combo_records: Vec<RepRecord> = Vec::with_capacity(results.len());
        for result in results {
            match result {
                Ok((record, path_dims)) => {
                    for (k_idx, dim) in path_dims.into_iter().enumerate() {
                        *dim_counts.entry((combo_idx, k_idx, dim)).or_insert(0) += 1;
                    }
                    combo_records.push(record);
                }
                Err(e) => {
                    records.extend(combo_records);
                    failure = Some(e);
                    break 'combos;
                }
            }
        }
        summaries.push(aggregate(&combo_records, n, q, p));
        records.extend(combo_records);
    }

    let dim_rows: Vec<DimCountRow> = dim_counts
        .iter()
        .map(|(&(combo_idx, k_idx, dim), &count)| DimCountRow {
            n: combos[combo_idx].0,
            q: combos[combo_idx].1,
            k: grid[k_idx],
            dim,
            count,
        })
        .collect();

    write_per_replication_csv(&out_dir.join("per_replication.csv"), &records)?;
    write_dimension_by_k_csv(&out_dir.join("dimension_by_k.csv"), &dim_rows)?;
    if let Some(e) = failure {
        return Err(e);
    }

    let summary =
        ExperimentSummary { schema_version: SCHEMA_VERSION, config: config.clone(), combos: summaries };
    crate::report::write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}
