//! Argument parsing and subcommand dispatch.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use mixsel::{
    criterion_rows, enumerate_models_with, make_blocks, run_ppe, slope_rows, slope_select,
    simulate, BlockedSample, CollectionKind, CollectionLimits, CriterionRow, DeltaMeasure,
    DensitySpec, PenaltyConfig, PenaltyEvaluation, ProcessKind, ProcessSpec, TrueDensity,
    WeightKind,
};

use crate::config::{self, GridConfig, SCHEMA_VERSION};
use crate::error::{runtime, validation, CliError, Result};
use crate::{checks, experiment, report};

#[derive(Parser)]
#[command(
    name = "mixsel",
    version,
    about = "Block-resampling penalization and slope calibration for projection density estimators on dependent data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a stationary sample and write it as CSV.
    Simulate(SimulateArgs),
    /// Run one penalized selection and write the criterion table.
    Select(SelectArgs),
    /// Trace the slope-calibration path on one sample.
    Slope(SlopeArgs),
    /// Run a replicated oracle-ratio study from a JSON config.
    Experiment(ExperimentArgs),
    /// Run the built-in fixture checks.
    Check,
}

#[derive(Args)]
struct ProcessArgs {
    /// Process kind: iid | ar-bernoulli | gaussian-ar1.
    #[arg(long, default_value = "iid")]
    process: String,
    /// AR(1) coefficient (gaussian-ar1 only).
    #[arg(long)]
    a: Option<f64>,
    /// Target marginal density: uniform | linear.
    #[arg(long)]
    target: Option<String>,
    /// JSON file holding a density spec; overrides --target.
    #[arg(long)]
    target_file: Option<PathBuf>,
    /// Burn-in steps before recording starts.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CollectionArgs {
    /// Model collection: histogram | fourier | wavelet-haar.
    #[arg(long, default_value = "histogram")]
    collection: String,
    /// Cap on the histogram/fourier resolution index.
    #[arg(long)]
    model_cap: Option<u32>,
    /// Cap on the Haar level J.
    #[arg(long)]
    level_cap: Option<u32>,
}

impl CollectionArgs {
    fn kind(&self) -> Result<CollectionKind> {
        self.collection.parse().map_err(validation)
    }

    fn limits(&self) -> CollectionLimits {
        let mut limits = CollectionLimits::default();
        if let Some(cap) = self.model_cap {
            limits.model_cap = cap;
        }
        limits.level_cap = self.level_cap;
        limits
    }
}

#[derive(Args)]
struct PenaltyArgs {
    /// Weight law: multinomial | poisson | exponential | constant.
    #[arg(long, default_value = "multinomial")]
    law: String,
    /// Law parameter: the mean for poisson/exponential, the value for
    /// constant. Defaults to 1.
    #[arg(long)]
    law_param: Option<f64>,
    /// Multiplier kappa on the law's own constant, i.e. C = kappa * C_W.
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    /// Evaluate the penalty by Monte Carlo with this many weight draws
    /// instead of the closed form.
    #[arg(long)]
    mc_replicates: Option<usize>,
}

impl PenaltyArgs {
    fn config(&self, seed: u64) -> Result<PenaltyConfig> {
        let param = self.law_param.unwrap_or(1.0);
        let weight_kind = match self.law.as_str() {
            "multinomial" | "multinomial-block-bootstrap" => {
                WeightKind::MultinomialBlockBootstrap
            }
            "poisson" => WeightKind::Poisson { mean: param },
            "exponential" => WeightKind::Exponential { mean: param },
            "constant" => WeightKind::Constant { value: param },
            other => return Err(validation(format!("unknown weight law `{other}`"))),
        };
        if !self.multiplier.is_finite() || self.multiplier < 0.0 {
            return Err(validation(format!(
                "--multiplier {} is not a finite nonnegative number",
                self.multiplier
            )));
        }
        let evaluation = match self.mc_replicates {
            None => PenaltyEvaluation::ClosedForm,
            Some(0) => return Err(validation("--mc-replicates must be positive")),
            Some(replicates) => PenaltyEvaluation::MonteCarlo { replicates },
        };
        Ok(PenaltyConfig {
            weight_kind,
            c_multiplier: self.multiplier,
            evaluation,
            seed,
        })
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Sample size.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    process: ProcessArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct InputArgs {
    /// Sample size (when simulating).
    #[arg(long, conflicts_with = "data")]
    n: Option<usize>,
    /// Block length override (default: the sqrt(n)/(2 ln^2 n) rule).
    #[arg(long)]
    q: Option<usize>,
    /// Read the sample from a CSV file (one value per line) instead of
    /// simulating; risks are reported only if a target is also given.
    #[arg(long)]
    data: Option<PathBuf>,
    #[command(flatten)]
    process: ProcessArgs,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    collection: CollectionArgs,
    #[command(flatten)]
    penalty: PenaltyArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SlopeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    collection: CollectionArgs,
    #[command(flatten)]
    penalty: PenaltyArgs,
    /// Multiplier grid as start:stop:step.
    #[arg(long, default_value = "0:4:0.05")]
    grid: String,
    /// Complexity measure: pen-w-unit | dim-over-n.
    #[arg(long, default_value = "pen-w-unit")]
    delta: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured replication count.
    #[arg(long)]
    reps: Option<usize>,
    /// Override the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses argv and runs the selected subcommand.
pub fn run() -> Result<()> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Validation(e.to_string())),
    };
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Select(args) => cmd_select(args),
        Command::Slope(args) => cmd_slope(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Check => checks::run_checks(),
    }
}

fn parse_target(args: &ProcessArgs) -> Result<Option<DensitySpec>> {
    if let Some(path) = &args.target_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| validation(format!("cannot read target {}: {e}", path.display())))?;
        let mut de = serde_json::Deserializer::from_str(&text);
        let spec: DensitySpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            validation(format!(
                "malformed target {}: key path `{}`: {}",
                path.display(),
                e.path(),
                e.inner()
            ))
        })?;
        return Ok(Some(spec));
    }
    match args.target.as_deref() {
        None => Ok(None),
        Some("uniform") => Ok(Some(DensitySpec::Uniform)),
        Some("linear") => Ok(Some(DensitySpec::Linear)),
        Some(other) => Err(validation(format!(
            "unknown target `{other}` (use uniform, linear or --target-file)"
        ))),
    }
}

fn build_process(args: &ProcessArgs, target: DensitySpec) -> Result<ProcessSpec> {
    let kind = match args.process.as_str() {
        "iid" => ProcessKind::Iid,
        "ar-bernoulli" => ProcessKind::ArBernoulli,
        "gaussian-ar1" => ProcessKind::GaussianAr1 {
            a: args.a.ok_or_else(|| validation("gaussian-ar1 requires --a"))?,
        },
        other => return Err(validation(format!("unknown process `{other}`"))),
    };
    if args.a.is_some() && !matches!(kind, ProcessKind::GaussianAr1 { .. }) {
        return Err(validation("--a only applies to gaussian-ar1"));
    }
    let mut spec = ProcessSpec::new(kind, target, args.seed);
    if let Some(burn_in) = args.burn_in {
        spec.burn_in = burn_in;
    }
    spec.validate().map_err(validation)?;
    Ok(spec)
}

fn ensure_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| runtime(format!("{}: {e}", out.display())))
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let target = parse_target(&args.process)?.unwrap_or(DensitySpec::Uniform);
    let spec = build_process(&args.process, target)?;
    let data = simulate(&spec, args.n).map_err(validation)?;
    ensure_out_dir(&args.out)?;
    let path = args.out.join("sample.csv");
    report::write_sample_csv(&path, &data)?;
    println!("wrote {} ({} observations)", path.display(), data.len());
    Ok(())
}

/// Data plus the density to score risks against, if one is known.
fn load_input(args: &InputArgs) -> Result<(Vec<f64>, Option<TrueDensity>)> {
    match &args.data {
        Some(path) => {
            let data = report::read_sample_csv(path)?;
            let density = parse_target(&args.process)?
                .map(|spec| TrueDensity::new(&spec))
                .transpose()
                .map_err(validation)?;
            Ok((data, density))
        }
        None => {
            let n = args
                .n
                .ok_or_else(|| validation("either --n (simulate) or --data (file) is required"))?;
            let target = parse_target(&args.process)?.unwrap_or(DensitySpec::Uniform);
            let spec = build_process(&args.process, target)?;
            let density = TrueDensity::new(&spec.target).map_err(validation)?;
            let data = simulate(&spec, n).map_err(validation)?;
            Ok((data, Some(density)))
        }
    }
}

/// Everything `select` and `slope` share: blocked sample, collection and
/// criterion rows.
fn prepare_rows(
    input: &InputArgs,
    collection: &CollectionArgs,
    penalty: &PenaltyArgs,
) -> Result<(Vec<CriterionRow>, usize, usize, usize)> {
    let (data, density) = load_input(input)?;
    let n = data.len();
    let scheme = make_blocks(n, input.q).map_err(validation)?;
    let (p, q) = (scheme.p, scheme.q);
    let sample = BlockedSample::new(data, scheme).map_err(validation)?;
    let models = enumerate_models_with(collection.kind()?, n, &collection.limits())
        .map_err(validation)?;
    let pen_cfg = penalty.config(input.process.seed)?;
    let rows = criterion_rows(&sample, &models, &pen_cfg, density.as_ref()).map_err(runtime)?;
    Ok((rows, n, p, q))
}

#[derive(serde::Serialize)]
struct SelectSummary {
    schema_version: u32,
    n: usize,
    p: usize,
    q: usize,
    collection: String,
    selected: usize,
    selected_dim: usize,
    criterion: f64,
    oracle: Option<usize>,
    oracle_risk: Option<f64>,
    selected_risk: Option<f64>,
    oracle_ratio: Option<f64>,
}

fn cmd_select(args: SelectArgs) -> Result<()> {
    let (data, density) = load_input(&args.input)?;
    let n = data.len();
    let scheme = make_blocks(n, args.input.q).map_err(validation)?;
    let (p, q) = (scheme.p, scheme.q);
    let sample = BlockedSample::new(data, scheme).map_err(validation)?;
    let models = enumerate_models_with(args.collection.kind()?, n, &args.collection.limits())
        .map_err(validation)?;
    let pen_cfg = args.penalty.config(args.input.process.seed)?;
    let report_ = run_ppe(&sample, &models, &pen_cfg, density.as_ref()).map_err(runtime)?;

    ensure_out_dir(&args.out)?;
    report::write_criterion_csv(&args.out.join("criterion.csv"), &report_.rows)?;
    let summary = SelectSummary {
        schema_version: SCHEMA_VERSION,
        n,
        p,
        q,
        collection: args.collection.collection.clone(),
        selected: report_.selected,
        selected_dim: report_.selected_dim,
        criterion: report_.criterion,
        oracle: report_.oracle,
        oracle_risk: report_.oracle_risk,
        selected_risk: report_.selected_risk,
        oracle_ratio: report_.oracle_ratio,
    };
    report::write_json(&args.out.join("summary.json"), &summary)?;
    println!(
        "selected model {} (dim {}) out of {} candidates",
        report_.selected,
        report_.selected_dim,
        report_.rows.len()
    );
    Ok(())
}

#[derive(serde::Serialize)]
struct SlopeSummary {
    schema_version: u32,
    n: usize,
    p: usize,
    q: usize,
    collection: String,
    delta: DeltaMeasure,
    k_tilde: f64,
    fallback: bool,
    final_k: f64,
    selected: usize,
    selected_dim: usize,
    selected_risk: Option<f64>,
    oracle: Option<usize>,
    oracle_risk: Option<f64>,
    oracle_ratio: Option<f64>,
}

fn cmd_slope(args: SlopeArgs) -> Result<()> {
    let delta: DeltaMeasure = args.delta.parse().map_err(validation)?;
    let grid_cfg: GridConfig = args.grid.parse()?;
    let grid = grid_cfg.build().map_err(validation)?;
    let (rows, n, p, q) = prepare_rows(&args.input, &args.collection, &args.penalty)?;

    let srows = slope_rows(&rows, delta, n);
    let slope = slope_select(&srows, &grid).map_err(runtime)?;
    if slope.fallback {
        eprintln!(
            "warning: no dimension jump along the grid; falling back to k_tilde = {}",
            slope.k_tilde
        );
    }

    // Oracle comparison for the slope choice, when risks are known.
    let risk_of = |index: usize| rows.iter().find(|r| r.model_index == index).and_then(|r| r.risk);
    let (oracle, oracle_risk, oracle_ratio, selected_risk) =
        if rows.iter().all(|r| r.risk.is_some()) {
            let best = rows
                .iter()
                .min_by(|a, b| {
                    (a.risk.unwrap(), a.dim, a.model_index)
                        .partial_cmp(&(b.risk.unwrap(), b.dim, b.model_index))
                        .expect("finite risks")
                })
                .expect("non-empty rows");
            let sr = risk_of(slope.selected).expect("selected row has a risk");
            let or = best.risk.unwrap();
            let ratio = if or == 0.0 {
                if sr == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            } else {
                sr / or
            };
            (Some(best.model_index), Some(or), Some(ratio), Some(sr))
        } else {
            (None, None, None, None)
        };

    ensure_out_dir(&args.out)?;
    report::write_criterion_csv(&args.out.join("criterion.csv"), &rows)?;
    report::write_slope_path_csv(&args.out.join("slope_path.csv"), &slope)?;
    let summary = SlopeSummary {
        schema_version: SCHEMA_VERSION,
        n,
        p,
        q,
        collection: args.collection.collection.clone(),
        delta,
        k_tilde: slope.k_tilde,
        fallback: slope.fallback,
        final_k: slope.final_k,
        selected: slope.selected,
        selected_dim: slope.selected_dim,
        selected_risk,
        oracle,
        oracle_risk,
        oracle_ratio,
    };
    report::write_json(&args.out.join("summary.json"), &summary)?;
    println!(
        "k_tilde = {}, final multiplier {} selects model {} (dim {})",
        slope.k_tilde, slope.final_k, slope.selected, slope.selected_dim
    );
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let mut config = config::load_config(&args.config)?;
    if let Some(reps) = args.reps {
        config.replications = reps;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = args.out {
        config.output_dir = Some(out);
    }
    config.validate()?;
    let out_dir = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let summary = experiment::run_experiment(&config, &out_dir)?;
    let total: usize = summary.combos.iter().map(|c| c.replications).sum();
    println!(
        "ran {} combo(s) x {} replication(s) ({} runs); results in {}",
        summary.combos.len(),
        config.replications,
        total,
        out_dir.display()
    );
    Ok(())
}
