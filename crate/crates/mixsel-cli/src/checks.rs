//! Built-in fixtures behind the `check` subcommand: fast, deterministic
//! sanity checks with hand-verifiable answers. One line per check; any
//! failure makes the command exit 2.

use mixsel::quad;
use mixsel::{
    penalty_closed_form, penalty_monte_carlo, project, risk_against, simulate, slope_select,
    BlockedSample, DensitySpec, Model, ProcessKind, ProcessSpec, SlopeRow, TrueDensity,
    WeightKind, WeightLaw,
};

use crate::error::{CliError, Result};

type Check = (&'static str, fn() -> std::result::Result<(), String>);

fn block_layout() -> std::result::Result<(), String> {
    let sample = BlockedSample::from_odd_blocks(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6], 2)
        .map_err(|e| e.to_string())?;
    let scheme = sample.scheme();
    if (scheme.p, scheme.q) != (3, 2) {
        return Err(format!("expected p = 3, q = 2, got p = {}, q = {}", scheme.p, scheme.q));
    }
    for (k, start) in [(0usize, 0usize), (1, 4), (2, 8)] {
        let range = scheme.block_range(k);
        if range != (start..start + 2) {
            return Err(format!("block {k} spans {range:?}, expected {start}..{}", start + 2));
        }
    }
    Ok(())
}

fn hand_instance() -> std::result::Result<(), String> {
    let sample =
        BlockedSample::from_odd_blocks(&[0.2, 0.8], 1).map_err(|e| e.to_string())?;
    let model = Model::histogram(2, 2);
    let law = WeightLaw::new(WeightKind::MultinomialBlockBootstrap, 2)
        .map_err(|e| e.to_string())?;
    let c_tilde = law.c_tilde_w().map_err(|e| e.to_string())?;
    if c_tilde != 2.0 {
        return Err(format!("multinomial constant at p = 2 should be 2, got {c_tilde}"));
    }
    let closed = penalty_closed_form(&sample, &model, &law, c_tilde).map_err(|e| e.to_string())?;
    if (closed.p_w - 1.0).abs() > 1e-12 || (closed.pen - 2.0).abs() > 1e-12 {
        return Err(format!(
            "closed form should give p_w = 1 and pen = C = 2, got p_w = {}, pen = {}",
            closed.p_w, closed.pen
        ));
    }
    let mc = penalty_monte_carlo(&sample, &model, &law, c_tilde, 2000, 11)
        .map_err(|e| e.to_string())?;
    if (mc.pen - closed.pen).abs() > 4.0 * mc.std_error {
        return Err(format!(
            "Monte Carlo pen {} is more than 4 standard errors ({}) from {}",
            mc.pen, mc.std_error, closed.pen
        ));
    }
    Ok(())
}

fn fourier_orthonormality() -> std::result::Result<(), String> {
    let model = Model::fourier(2, 2);
    let cuts: Vec<f64> = (0..=16).map(|i| f64::from(i) / 16.0).collect();
    for (i, &a) in model.labels().iter().enumerate() {
        for &b in &model.labels()[i..] {
            let fa = model.function(a).map_err(|e| e.to_string())?;
            let fb = model.function(b).map_err(|e| e.to_string())?;
            let inner = quad::integrate_piecewise(&|x| fa.eval(x) * fb.eval(x), &cuts, 1e-11)
                .map_err(|e| e.to_string())?;
            let want = if a == b { 1.0 } else { 0.0 };
            if (inner - want).abs() > 1e-9 {
                return Err(format!("<{a:?}, {b:?}> = {inner}, expected {want}"));
            }
        }
    }
    Ok(())
}

fn pythagoras() -> std::result::Result<(), String> {
    let spec = ProcessSpec::new(ProcessKind::Iid, DensitySpec::Linear, 5);
    let data = simulate(&spec, 512).map_err(|e| e.to_string())?;
    let sample = BlockedSample::from_odd_blocks(&data, 4).map_err(|e| e.to_string())?;
    let density = TrueDensity::new(&DensitySpec::Linear).map_err(|e| e.to_string())?;
    let model = Model::histogram(8, 8);
    let fit = project(&sample, &model);
    let risk = risk_against(&fit, &density).map_err(|e| e.to_string())?;
    let gap = (risk.bias + risk.variance_part - risk.total).abs();
    if gap > 1e-12 {
        return Err(format!("bias + variance misses total by {gap}"));
    }
    Ok(())
}

fn simulator_determinism() -> std::result::Result<(), String> {
    let spec = ProcessSpec::new(ProcessKind::ArBernoulli, DensitySpec::Uniform, 42);
    let one = simulate(&spec, 256).map_err(|e| e.to_string())?;
    let two = simulate(&spec, 256).map_err(|e| e.to_string())?;
    if one != two {
        return Err("same seed produced different samples".into());
    }
    let other = simulate(&ProcessSpec::new(ProcessKind::ArBernoulli, DensitySpec::Uniform, 43), 256)
        .map_err(|e| e.to_string())?;
    if one == other {
        return Err("different seeds produced identical samples".into());
    }
    Ok(())
}

fn slope_crossover() -> std::result::Result<(), String> {
    let rows = [
        SlopeRow { model_index: 1, dim: 8, contrast: -1.0, delta: 0.5 },
        SlopeRow { model_index: 2, dim: 2, contrast: -0.4, delta: 0.1 },
    ];
    let grid: Vec<f64> = (0..=6).map(|i| 0.5 * f64::from(i)).collect();
    let report = slope_select(&rows, &grid).map_err(|e| e.to_string())?;
    if report.fallback {
        return Err("crossover fixture should produce a jump, not a fallback".into());
    }
    if report.k_tilde != 1.5 || report.final_k != 3.0 || report.selected != 2 {
        return Err(format!(
            "expected k_tilde = 1.5, final 3 selecting model 2; got k_tilde = {}, final {}, model {}",
            report.k_tilde, report.final_k, report.selected
        ));
    }
    Ok(())
}

/// Runs every fixture, printing one line per check.
pub fn run_checks() -> Result<()> {
    let checks: &[Check] = &[
        ("block-layout", block_layout),
        ("hand-instance", hand_instance),
        ("fourier-orthonormality", fourier_orthonormality),
        ("pythagoras", pythagoras),
        ("simulator-determinism", simulator_determinism),
        ("slope-crossover", slope_crossover),
    ];
    let mut failed = 0usize;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("check {name}: ok"),
            Err(msg) => {
                failed += 1;
                println!("check {name}: FAIL ({msg})");
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Runtime(format!("{failed} of {} checks failed", checks.len())));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}
